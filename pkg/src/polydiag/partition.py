"""Tagged partitions and their generalized polydiagonal subspaces.

A tagged partition of cells ``1..n`` is stored as a signed labeling: label
``+k`` puts a cell in part ``P_k``, ``-k`` in the counterpart ``P̄_k`` and ``0``
in the zero part ``P_0``. The associated subspace is

    Δ_P = {x : x_i = x_j for equal labels, x_i = -x_j for opposite labels,
               x_i = 0 for label 0}.

Swapping a part with its counterpart leaves Δ_P unchanged, so every subspace
has exactly one canonical labeling: classes numbered by first occurrence,
first occurrence positive.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Literal, Sequence

import numpy as np

__all__ = [
    "PartitionError",
    "AmbiguityError",
    "TaggedPartition",
    "GeneralizedPolydiagonal",
    "BlockDecomposition",
    "canonicalize",
    "parse_partition",
    "enumerate_tagged_partitions",
    "count_tagged_partitions",
    "membership_basis",
    "block_decomposition",
    "minimal_polydiagonal_containing",
    "intersect",
    "is_subspace_of",
    "satisfies",
    "null_partition",
    "full_partition",
]


class PartitionError(ValueError):
    """Malformed partition input."""


class AmbiguityError(ValueError):
    """Tolerance-based comparison could not decide a cell relation."""


@dataclass(frozen=True, order=True)
class TaggedPartition:
    """Canonical signed labeling of cells ``1..n``.

    Use :func:`canonicalize` or :func:`parse_partition` to build one from an
    arbitrary labeling; the constructor only accepts canonical labels.

    Attributes
    ----------
    labels : tuple of int
        ``labels[c]`` is the signed class of cell ``c + 1``.
    """

    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise PartitionError("a tagged partition needs at least one cell")
        nxt = 1
        for x in labels:
            k = abs(x)
            if k == 0:
                continue
            if k > nxt or (k == nxt and x < 0):
                raise PartitionError(f"labels are not canonical: {list(labels)}")
            if k == nxt:
                nxt += 1

    # -- shape -----------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def p(self) -> int:
        return max((abs(x) for x in self.labels), default=0)

    @cached_property
    def q(self) -> int:
        return len({-x for x in self.labels if x < 0})

    @cached_property
    def r(self) -> int:
        return int(0 in self.labels)

    @property
    def dim(self) -> int:
        return self.p

    @property
    def is_standard(self) -> bool:
        return self.q == 0 and self.r == 0

    @property
    def is_null(self) -> bool:
        return self.p == 0

    @property
    def is_full(self) -> bool:
        """True for the all-singletons partition (Δ_P is the whole space)."""
        return self.p == self.n

    # -- parts (1-indexed cells) -----------------------------------------

    def part(self, k: int) -> tuple[int, ...]:
        """Cells of ``P_k``."""
        return tuple(c + 1 for c, x in enumerate(self.labels) if x == k)

    def counterpart(self, k: int) -> tuple[int, ...]:
        """Cells of ``P̄_k`` (empty if the class has no counterpart)."""
        return tuple(c + 1 for c, x in enumerate(self.labels) if x == -k)

    def zero_part(self) -> tuple[int, ...]:
        return tuple(c + 1 for c, x in enumerate(self.labels) if x == 0)

    def has_counterpart(self, k: int) -> bool:
        return -k in self.labels

    def representative(self, k: int) -> int:
        """Smallest cell of ``P_k``."""
        return self.labels.index(k) + 1

    def __str__(self):
        return ",".join(str(x) for x in self.labels)

    def to_dict(self) -> dict:
        return {"labels": list(self.labels)}


def null_partition(n: int) -> TaggedPartition:
    return TaggedPartition((0,) * n)


def full_partition(n: int) -> TaggedPartition:
    return TaggedPartition(tuple(range(1, n + 1)))


def canonicalize(raw_labels: Iterable[int]) -> TaggedPartition:
    """Canonical labeling of the subspace described by ``raw_labels``.

    Classes are renumbered in order of first occurrence and each class is
    sign-flipped so that its first occurrence is positive.

    Examples
    --------
    >>> canonicalize([-3, -3, 5, 0]).labels
    (1, 1, 2, 0)
    >>> canonicalize([1, 1, -2, 2]).labels
    (1, 1, 2, -2)
    """
    raw = [int(x) for x in raw_labels]
    if not raw:
        raise PartitionError("empty labeling")
    index: dict[int, tuple[int, int]] = {}
    out = []
    for x in raw:
        if x == 0:
            out.append(0)
            continue
        k = abs(x)
        if k not in index:
            index[k] = (len(index) + 1, 1 if x > 0 else -1)
        new, flip = index[k]
        out.append(new * flip * (1 if x > 0 else -1))
    return TaggedPartition(tuple(out))


_TOKEN = re.compile(r"[,\s]+")


def parse_partition(s: str, n: int | None = None) -> TaggedPartition:
    """Parse ``"1,1,2,-2"`` (commas and/or whitespace) into a canonical partition.

    Raises
    ------
    PartitionError
        On a non-integer token or, when ``n`` is given, a length mismatch.
    """
    tokens = [t for t in _TOKEN.split(s.strip().strip("[]")) if t]
    vals = []
    for t in tokens:
        try:
            vals.append(int(t))
        except ValueError:
            raise PartitionError(f"non-integer label {t!r}") from None
    if n is not None and len(vals) != n:
        raise PartitionError(f"partition length mismatch: got {len(vals)} labels for n={n}")
    return canonicalize(vals)


Filter = Literal["all", "standard_only", "nonstandard_only"]


def enumerate_tagged_partitions(n: int, filter: Filter = "all") -> Iterator[TaggedPartition]:
    """Yield every canonical tagged partition of ``n`` cells, in lexicographic order.

    Parameters
    ----------
    n : int
        Number of cells, at least 1.
    filter : {"all", "standard_only", "nonstandard_only"}
        ``standard_only`` keeps partitions without counterparts or zero part.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if filter not in ("all", "standard_only", "nonstandard_only"):
        raise ValueError(f"unknown filter {filter!r}")
    for labels in _iter_labels(n, filter):
        yield TaggedPartition(labels)


def _iter_labels(n: int, filter: Filter = "all") -> Iterator[tuple[int, ...]]:
    """Canonical label tuples in lexicographic order, without validation."""
    standard = filter == "standard_only"
    labels = [0] * n

    # DFS over the prefix tree; choices ascend so output is lexicographic.
    def rec(pos: int, top: int, nonstd: bool):
        if pos == n:
            if filter != "nonstandard_only" or nonstd:
                yield tuple(labels)
            return
        if standard:
            choices = range(1, top + 2)
        else:
            choices = [*range(-top, 0), 0, *range(1, top + 2)]
        for x in choices:
            labels[pos] = x
            yield from rec(pos + 1, max(top, x), nonstd or x <= 0)

    yield from rec(0, 0, False)


def count_tagged_partitions(n: int) -> int:
    """Number of tagged partitions of ``n`` cells.

    Choose the zero part, then set-partition the rest and split every block
    into a part containing its first cell and an optional counterpart.
    """
    # a[m] = sum over set partitions of m cells of prod 2^(|B|-1)
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(math.comb(m - 1, s - 1) * 2 ** (s - 1) * a[m - s] for s in range(1, m + 1)))
    return sum(math.comb(n, m) * a[m] for m in range(n + 1))


# -- subspace membership --------------------------------------------------


@dataclass(frozen=True)
class GeneralizedPolydiagonal:
    """Δ_P together with its standard basis ``b_k = Σ_{P_k} e_i - Σ_{P̄_k} e_i``."""

    partition: TaggedPartition
    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> np.ndarray:
        """Basis vectors as the columns of an ``n x p`` integer array."""
        return _basis_matrix(self.partition)

    def contains(self, x: Sequence, tol: float = 0) -> bool:
        return satisfies(self.partition, x, tol)


def _basis_matrix(P: TaggedPartition) -> np.ndarray:
    B = np.zeros((P.n, P.p), dtype=np.int64)
    for c, x in enumerate(P.labels):
        if x:
            B[c, abs(x) - 1] = 1 if x > 0 else -1
    return B


def membership_basis(P: TaggedPartition) -> GeneralizedPolydiagonal:
    """Basis of Δ_P, one vector per class."""
    B = _basis_matrix(P)
    return GeneralizedPolydiagonal(P, tuple(tuple(int(v) for v in B[:, k]) for k in range(P.p)))


def satisfies(P: TaggedPartition, x: Sequence, tol: float = 0) -> bool:
    """True when ``x`` satisfies every defining equation of Δ_P (within ``tol``)."""
    if len(x) != P.n:
        raise PartitionError(f"vector length {len(x)} does not match n={P.n}")
    reps: dict[int, int] = {}
    for c, lab in enumerate(P.labels):
        if lab == 0:
            if abs(x[c]) > tol:
                return False
            continue
        k = abs(lab)
        if k not in reps:
            reps[k] = c
            continue
        ref = x[reps[k]]
        target = ref if lab > 0 else -ref
        if abs(x[c] - target) > tol:
            return False
    return True


# -- signed union-find ----------------------------------------------------


class _SignedUnionFind:
    """Union-find over cells with a parity bit (0: equal, 1: opposite).

    A component is marked zero when a cell is forced equal to its own
    negation or when any member is pinned to zero.
    """

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.parity = [0] * n
        self.rank = [0] * n
        self.zero = [False] * n

    def find(self, i: int) -> tuple[int, int]:
        path = []
        while self.parent[i] != i:
            path.append(i)
            i = self.parent[i]
        root = i
        # compress, accumulating parity from the top of the path down
        acc = 0
        for node in reversed(path):
            acc ^= self.parity[node]
            self.parity[node] = acc
            self.parent[node] = root
        return root, (self.parity[path[0]] if path else 0)

    def union(self, a: int, b: int, rel: int) -> None:
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            if pa ^ pb != rel:
                self.zero[ra] = True
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb, pa, pb = rb, ra, pb, pa
        self.parent[rb] = ra
        self.parity[rb] = pa ^ pb ^ rel
        self.zero[ra] = self.zero[ra] or self.zero[rb]
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1

    def pin_zero(self, a: int) -> None:
        self.zero[self.find(a)[0]] = True

    def labels(self) -> TaggedPartition:
        raw = []
        for c in range(len(self.parent)):
            root, par = self.find(c)
            raw.append(0 if self.zero[root] else (root + 1) * (-1 if par else 1))
        return canonicalize(raw)


def _add_constraints(uf: _SignedUnionFind, P: TaggedPartition) -> None:
    reps: dict[int, int] = {}
    for c, lab in enumerate(P.labels):
        if lab == 0:
            uf.pin_zero(c)
            continue
        k = abs(lab)
        if k in reps:
            uf.union(reps[k], c, 0 if lab > 0 else 1)
        else:
            reps[k] = c


def intersect(P1: TaggedPartition, P2: TaggedPartition) -> TaggedPartition:
    """Canonical partition of Δ_{P1} ∩ Δ_{P2}."""
    if P1.n != P2.n:
        raise PartitionError(f"size mismatch: {P1.n} vs {P2.n}")
    uf = _SignedUnionFind(P1.n)
    _add_constraints(uf, P1)
    _add_constraints(uf, P2)
    return uf.labels()


def is_subspace_of(P1: TaggedPartition, P2: TaggedPartition) -> bool:
    """True when Δ_{P1} ⊆ Δ_{P2}."""
    if P1.n != P2.n:
        raise PartitionError(f"size mismatch: {P1.n} vs {P2.n}")
    return all(satisfies(P2, b) for b in membership_basis(P1).basis)


def minimal_polydiagonal_containing(vectors: Sequence[Sequence], tol: float = 0) -> TaggedPartition:
    """Smallest generalized polydiagonal containing every vector in ``vectors``.

    Parameters
    ----------
    vectors : sequence of vectors
        Rational or real vectors of a common length ``n``.
    tol : float
        Absolute tolerance for comparing coordinates. Use 0 for exact input.

    Raises
    ------
    AmbiguityError
        If the tolerance produces relations that are not transitive.
    """
    vecs = [list(v) for v in vectors]
    if not vecs:
        raise PartitionError("need at least one vector")
    n = len(vecs[0])
    if n == 0 or any(len(v) != n for v in vecs):
        raise PartitionError("vectors must share a positive length")
    if tol > 0:
        V = np.array(vecs, dtype=float)
    else:
        V = np.array(vecs, dtype=object)
    absV = np.abs(V)
    zero = [bool(np.all(absV[:, c] <= tol)) for c in range(n)]
    uf = _SignedUnionFind(n)
    for c in range(n):
        if zero[c]:
            uf.pin_zero(c)
    for i in range(n):
        if zero[i]:
            continue
        for j in range(i + 1, n):
            if zero[j]:
                continue
            eq = bool(np.all(np.abs(V[:, i] - V[:, j]) <= tol))
            opp = bool(np.all(np.abs(V[:, i] + V[:, j]) <= tol))
            if eq and opp:
                raise AmbiguityError(f"cells {i + 1} and {j + 1} are both equal and opposite within tol={tol}")
            if eq:
                uf.union(i, j, 0)
            elif opp:
                uf.union(i, j, 1)
    P = uf.labels()
    # transitive closure under a tolerance can relate cells that differ
    if tol > 0 and not all(satisfies(P, V[k], tol) for k in range(len(V))):
        raise AmbiguityError(f"tolerance {tol} relates cells whose coordinates differ")
    return P


# -- adapted block form ---------------------------------------------------


@dataclass(frozen=True)
class BlockDecomposition:
    """Cell enumeration adapted to a tagged partition, with named blocks.

    Block indices ``1..p`` are internal: classes that have a counterpart come
    first (``1..q``), then the others, each group in canonical class order.
    ``class_of_block[b - 1]`` is the canonical class of block index ``b``.

    Block names follow the adapted form

        [ Q  R  Z_·0 ]      rows P_i,   columns P_j | P̄_j | P_0
        [ R̄  Q̄  Z̄_·0 ]      rows P̄_i
        [ Z_0· Z̄_0· Z_00 ]  rows P_0

    Attributes
    ----------
    permutation : tuple of int
        Cells (1-indexed) in adapted order: P_1..P_p, P̄_1..P̄_q, P_0.
    ranges : dict
        ``("P", i)``, ``("Pbar", i)`` and ``("P0",)`` map to half-open index
        ranges of the permuted matrix.
    """

    matrix: np.ndarray
    partition: TaggedPartition
    class_of_block: tuple[int, ...]
    permutation: tuple[int, ...]
    ranges: dict

    @property
    def p(self) -> int:
        return self.partition.p

    @property
    def q(self) -> int:
        return self.partition.q

    @property
    def r(self) -> int:
        return self.partition.r

    @cached_property
    def permuted(self) -> np.ndarray:
        idx = [c - 1 for c in self.permutation]
        return self.matrix[np.ix_(idx, idx)]

    def rows(self, key) -> list[int]:
        """0-based original cell indices of a part key such as ``("P", 1)``."""
        a, b = self.ranges[key]
        return [self.permutation[t] - 1 for t in range(a, b)]

    def _sub(self, rkey, ckey) -> np.ndarray:
        return self.matrix[np.ix_(self.rows(rkey), self.rows(ckey))]

    def block(self, name: str, i: int = 0, j: int = 0) -> np.ndarray:
        """Named block of the adapted form.

        Names: ``Q, R, Z`` (rows ``P_i``; columns ``P_j``, ``P̄_j``, ``P_0``),
        ``Rbar, Qbar, Zbar`` (rows ``P̄_i``), ``Z0, Z0bar`` (rows ``P_0``;
        columns ``P_j``, ``P̄_j``) and ``Z00``.
        """
        P, Pb, P0 = ("P", i), ("Pbar", i), ("P0",)
        table = {
            "Q": (P, ("P", j)),
            "R": (P, ("Pbar", j)),
            "Z": (P, P0),
            "Rbar": (Pb, ("P", j)),
            "Qbar": (Pb, ("Pbar", j)),
            "Zbar": (Pb, P0),
            "Z0": (P0, ("P", j)),
            "Z0bar": (P0, ("Pbar", j)),
            "Z00": (P0, P0),
        }
        if name not in table:
            raise KeyError(f"unknown block {name!r}")
        rkey, ckey = table[name]
        if rkey not in self.ranges or ckey not in self.ranges:
            raise KeyError(f"block {name}[{i},{j}] does not exist for this partition")
        return self._sub(rkey, ckey)

    def rs(self, name: str, i: int = 0, j: int = 0) -> np.ndarray:
        """Row sums of a named block, or an empty vector if it does not exist."""
        try:
            B = self.block(name, i, j)
        except KeyError:
            return np.array([], dtype=object)
        return np.array([sum(row, Fraction(0)) for row in B], dtype=object)

    def has(self, key) -> bool:
        return key in self.ranges


def block_decomposition(M, P: TaggedPartition) -> BlockDecomposition:
    """Adapted cell enumeration and named blocks of ``M`` for partition ``P``."""
    M = np.asarray(M if not hasattr(M, "W") else M.W, dtype=object)
    if M.shape != (P.n, P.n):
        raise PartitionError(f"matrix shape {M.shape} does not match n={P.n}")
    with_cp = [k for k in range(1, P.p + 1) if P.has_counterpart(k)]
    without = [k for k in range(1, P.p + 1) if not P.has_counterpart(k)]
    order = with_cp + without
    perm: list[int] = []
    ranges: dict = {}
    for b, k in enumerate(order, start=1):
        start = len(perm)
        perm.extend(P.part(k))
        ranges[("P", b)] = (start, len(perm))
    for b, k in enumerate(with_cp, start=1):
        start = len(perm)
        perm.extend(P.counterpart(k))
        ranges[("Pbar", b)] = (start, len(perm))
    if P.r:
        start = len(perm)
        perm.extend(P.zero_part())
        ranges[("P0",)] = (start, len(perm))
    return BlockDecomposition(M, P, tuple(order), tuple(perm), ranges)
