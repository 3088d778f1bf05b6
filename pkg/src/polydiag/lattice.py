"""Lattices of generalized polydiagonals invariant under a matrix.

Two enumeration strategies are provided. :func:`lattice_bruteforce` filters
every tagged partition and is authoritative. :func:`lattice_eigen` seeds
candidates from the real invariant subspaces of the spectral decomposition
and accepts a candidate only after an exact rational invariance check.
"""

from __future__ import annotations

import itertools
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numba
import numpy as np
import scipy.linalg as sla

from .core import Network, integer_form, rational_matrix
from .invariance import CLASS_ORDER, InvarianceTester, classify
from .partition import (
    AmbiguityError,
    TaggedPartition,
    _iter_labels,
    count_tagged_partitions,
    enumerate_tagged_partitions,
    full_partition,
    intersect,
    is_subspace_of,
    minimal_polydiagonal_containing,
    null_partition,
)

__all__ = [
    "LatticeSizeError",
    "InvariantLattice",
    "EigenSeed",
    "lattice_bruteforce",
    "lattice_eigen",
    "synchrony_antisynchrony_report",
    "hasse_dot",
    "default_jobs",
]

JOBS_ENV = "POLYDIAG_JOBS"


def default_jobs() -> int:
    """Worker count from the ``POLYDIAG_JOBS`` environment variable (default 1)."""
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


class LatticeSizeError(ValueError):
    """Brute-force enumeration refused because ``n`` exceeds the limit."""


@dataclass(frozen=True)
class InvariantLattice:
    """Invariant generalized polydiagonals of one matrix, ordered by inclusion."""

    matrix_tag: str
    n: int
    elements: tuple[TaggedPartition, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted(set(self.elements))))

    def __len__(self):
        return len(self.elements)

    def __contains__(self, P):
        return P in set(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def hasse_edges(self) -> list[tuple[TaggedPartition, TaggedPartition]]:
        """Covering pairs ``(A, B)`` with ``A ⊊ B`` and nothing strictly between."""
        els = self.elements
        below = {
            B: [A for A in els if A != B and A.p < B.p and is_subspace_of(A, B)] for B in els
        }
        edges = []
        for B in els:
            under = below[B]
            for A in under:
                if not any(C.p > A.p and is_subspace_of(A, C) for C in under if C != A):
                    edges.append((A, B))
        return sorted(edges)

    def is_intersection_closed(self) -> bool:
        s = set(self.elements)
        return all(intersect(a, b) in s for a, b in itertools.combinations(self.elements, 2))


@dataclass(frozen=True)
class EigenSeed:
    """One invariant flat of a spectral component and its minimal polydiagonal."""

    eigenvalues: tuple[complex, ...]
    dim: int
    partition: TaggedPartition


# -- brute force ----------------------------------------------------------


@numba.njit(cache=True)
def _batch_invariant(K, labels):
    """Exact invariance of every labeling row under the integer matrix ``K``."""
    N, n = labels.shape
    out = np.zeros(N, dtype=np.bool_)
    y = np.empty(n, dtype=np.int64)
    first = np.empty(n + 1, dtype=np.int64)
    for r in range(N):
        lab = labels[r]
        p = 0
        for c in range(n):
            a = lab[c]
            if a > p:
                p = a
                first[a] = c
        ok = True
        for k in range(1, p + 1):
            for i in range(n):
                s = 0
                for c in range(n):
                    if lab[c] == k:
                        s += K[i, c]
                    elif lab[c] == -k:
                        s -= K[i, c]
                y[i] = s
            for i in range(n):
                a = lab[i]
                if a == 0:
                    if y[i] != 0:
                        ok = False
                        break
                elif a > 0:
                    if y[i] != y[first[a]]:
                        ok = False
                        break
                elif y[i] != -y[first[-a]]:
                    ok = False
                    break
            if not ok:
                break
        out[r] = ok
    return out


def _filter_chunk(args):
    K, labels = args
    return labels[_batch_invariant(K, labels)]


def _safe_int64(K: np.ndarray, n: int) -> bool:
    # column sums and their negations must stay inside int64
    return K.dtype != object and int(np.abs(K).max(initial=0)) * n < 2**62


def lattice_bruteforce(M, n_limit: int = 8, *, tag: str = "M", jobs: int | None = None) -> InvariantLattice:
    """Every invariant generalized polydiagonal of ``M``, by exhaustive filtering.

    Raises
    ------
    LatticeSizeError
        If ``n > n_limit``; the message carries the partition count.
    """
    M = M.W if isinstance(M, Network) else M
    M = rational_matrix(M)
    n = M.shape[0]
    if n > n_limit:
        raise LatticeSizeError(
            f"n={n} exceeds the brute-force limit {n_limit} "
            f"({count_tagged_partitions(n)} tagged partitions to test)"
        )
    K, _ = integer_form(M)
    if not _safe_int64(K, n):
        test = InvarianceTester(M)
        return InvariantLattice(tag, n, tuple(P for P in enumerate_tagged_partitions(n) if test(P)))
    K = np.ascontiguousarray(K, dtype=np.int64)
    labels = np.array(list(_iter_labels(n)), dtype=np.int64).reshape(-1, n)
    jobs = default_jobs() if jobs is None else max(1, jobs)
    if jobs == 1 or n < 7:
        kept = _filter_chunk((K, labels))
    else:
        size = -(-len(labels) // jobs)
        chunks = [(K, labels[a:a + size]) for a in range(0, len(labels), size)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            kept = np.concatenate(list(ex.map(_filter_chunk, chunks)))
    return InvariantLattice(tag, n, tuple(TaggedPartition(tuple(int(x) for x in row)) for row in kept))


# -- eigen-seeded ---------------------------------------------------------


def _constraints(n: int) -> list[np.ndarray]:
    out = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        out.append(e)
    for i in range(n):
        for j in range(i + 1, n):
            for s in (-1.0, 1.0):
                c = np.zeros(n)
                c[i], c[j] = 1.0, s
                out.append(c / np.sqrt(2.0))
    return out


def _satisfied(C: np.ndarray, B: np.ndarray, tol: float) -> frozenset:
    if B.shape[1] == 0:
        return frozenset(range(C.shape[0]))
    norms = np.linalg.norm(C @ B, axis=1)
    return frozenset(np.flatnonzero(norms <= tol).tolist())


def _flats(B: np.ndarray, C: np.ndarray, tol: float) -> list[np.ndarray]:
    """All intersections of ``span(B)`` with coordinate hyperplanes of the arrangement.

    Each flat is returned with an orthonormal basis. Flats are identified by
    the set of arrangement hyperplanes that contain them.
    """
    start = _satisfied(C, B, tol)
    seen = {start: B}
    stack = [B]
    while stack:
        F = stack.pop()
        if F.shape[1] == 0:
            continue
        sat = _satisfied(C, F, tol)
        for k in range(C.shape[0]):
            if k in sat:
                continue
            N = sla.null_space((C[k] @ F)[None, :], rcond=tol)
            G = F @ N
            if G.shape[1]:
                G, _ = np.linalg.qr(G)
            key = _satisfied(C, G, tol)
            if key not in seen:
                seen[key] = G
                stack.append(G)
    return list(seen.values())


def _is_invariant_flat(A: np.ndarray, F: np.ndarray, tol: float) -> bool:
    if F.shape[1] == 0:
        return True
    AF = A @ F
    resid = AF - F @ (F.T @ AF)
    return float(np.linalg.norm(resid)) <= tol * max(1.0, float(np.linalg.norm(A)))


def _components(A: np.ndarray, cluster_tol: float, skip_complex: bool):
    """Real invariant subspaces of clustered eigenvalues (conjugate pairs merged)."""
    eig = np.linalg.eigvals(A)
    scale = max(1.0, float(np.max(np.abs(eig)))) if eig.size else 1.0
    groups: list[list[complex]] = []
    for lam in sorted(eig, key=lambda z: (z.real, abs(z.imag))):
        for g in groups:
            if any(min(abs(lam - mu), abs(lam - np.conj(mu))) <= cluster_tol * scale for mu in g):
                g.append(lam)
                break
        else:
            groups.append([lam])
    # merging may have made two groups close; repeat until stable
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(range(len(groups)), 2):
            if any(min(abs(x - y), abs(x - np.conj(y))) <= cluster_tol * scale
                   for x in groups[a] for y in groups[b]):
                groups[a].extend(groups.pop(b))
                changed = True
                break
    comps = []
    for g in groups:
        is_complex = any(abs(z.imag) > cluster_tol * scale for z in g)
        if is_complex and skip_complex:
            warnings.warn(f"skipping complex eigenvalues {np.round(g, 6).tolist()}", RuntimeWarning)
            continue
        centers = list(g)

        def select(x, y, centers=centers):
            z = complex(x, y)
            return any(min(abs(z - c), abs(z - np.conj(c))) <= cluster_tol * scale * 1.5 for c in centers)

        try:
            _, Z, sdim = sla.schur(A, output="real", sort=select)
        except (np.linalg.LinAlgError, ValueError):
            # reordering failed: fall back to one component for everything
            return [(tuple(eig), np.eye(A.shape[0]))]
        comps.append((tuple(g), Z[:, :sdim]))
    return comps


def lattice_eigen(
    M,
    tol: float = 1e-9,
    *,
    cluster_tol: float = 1e-4,
    skip_complex: bool = False,
    tag: str = "M",
    return_seeds: bool = False,
):
    """Invariant lattice seeded by the spectral structure of ``M``.

    Every invariant subspace is the direct sum of its intersections with the
    real generalized eigenspaces, and each such intersection is an invariant
    flat of that eigenspace cut out by coordinate hyperplanes. The method
    therefore

    1. splits ``R^n`` into real generalized eigenspaces (Schur ordering;
       eigenvalues within ``cluster_tol`` and conjugate pairs are merged),
    2. lists the flats of each eigenspace and keeps the invariant ones
       (eigenvectors and Jordan-chain prefixes are among them),
    3. forms the minimal generalized polydiagonal of every sum of one kept
       flat per eigenspace, accepting it only if it is exactly invariant,
    4. closes the result under intersection.

    Parameters
    ----------
    M : Network or square rational matrix
    tol : float
        Entry tolerance for coordinate comparisons.
    cluster_tol : float
        Relative distance under which eigenvalues share a component. Coarser
        clustering is always safe, only slower.
    skip_complex : bool
        Drop non-real eigenvalue pairs with a warning instead of handling
        their real invariant subspaces.
    return_seeds : bool
        Also return the list of :class:`EigenSeed`.
    """
    M = M.W if isinstance(M, Network) else M
    M = rational_matrix(M)
    n = M.shape[0]
    A = np.array(M, dtype=float)
    exact = InvarianceTester(M)
    C = np.array(_constraints(n))
    flat_tol = max(tol, 1e-9) * 10
    comps = _components(A, cluster_tol, skip_complex)
    per_comp: list[list[np.ndarray]] = []
    seeds: list[EigenSeed] = []
    for lams, B in comps:
        if B.shape[1] == n:
            # the flats of R^n are exactly the generalized polydiagonals
            keep = [_basis_columns(P) for P in enumerate_tagged_partitions(n) if exact(P)]
        else:
            keep = [F for F in _flats(B, C, flat_tol) if _is_invariant_flat(A, F, 1e-7)]
        per_comp.append(keep)
        for F in keep:
            if F.shape[1]:
                P = _poly_of(F, tol)
                if P is not None and exact(P):
                    seeds.append(EigenSeed(lams, F.shape[1], P))
    found: set[TaggedPartition] = {null_partition(n), full_partition(n)}
    for choice in itertools.product(*per_comp):
        cols = [F for F in choice if F.shape[1]]
        if not cols:
            continue
        P = _poly_of(np.hstack(cols), tol)
        if P is not None and P not in found and exact(P):
            found.add(P)
    closed = _intersection_closure(found)
    lat = InvariantLattice(tag, n, tuple(closed))
    return (lat, seeds) if return_seeds else lat


def _basis_columns(P: TaggedPartition) -> np.ndarray:
    B = np.array([[float(x == k) - float(x == -k) for k in range(1, P.p + 1)] for x in P.labels])
    B = B.reshape(P.n, P.p)
    return B / np.linalg.norm(B, axis=0) if P.p else B


def _poly_of(F: np.ndarray, tol: float) -> TaggedPartition | None:
    # basis vectors are O(1); scale tolerance to the basis entries
    try:
        return minimal_polydiagonal_containing(list(F.T), tol=max(tol, 1e-9) * 100)
    except AmbiguityError:
        return None


def _intersection_closure(items: Iterable[TaggedPartition]) -> set[TaggedPartition]:
    s = set(items)
    frontier = list(s)
    while frontier:
        new = []
        for a in frontier:
            for b in list(s):
                c = intersect(a, b)
                if c not in s:
                    s.add(c)
                    new.append(c)
        frontier = new
    return s


# -- report ---------------------------------------------------------------


@dataclass
class SynchronyReport:
    """Union of ℒ_W and ℒ_L with per-element classification."""

    network: Network
    lattice_W: InvariantLattice
    lattice_L: InvariantLattice
    method: str
    rows: list = field(default_factory=list)
    agreement: dict = field(default_factory=dict)

    @property
    def union(self) -> tuple[TaggedPartition, ...]:
        return tuple(sorted(set(self.lattice_W.elements) | set(self.lattice_L.elements)))

    def counts(self) -> dict:
        keys = ["balanced", "exo_balanced", "strictly_exo_balanced", "odd_balanced",
                "linear_balanced", "even_odd_balanced"]
        out = {k: sum(1 for r in self.rows if getattr(r["flags"], k)) for k in keys}
        for c in CLASS_ORDER:
            out[c.value] = sum(1 for r in self.rows if c in r["flags"].preserving)
        return out

    def members(self, flag: str) -> list[TaggedPartition]:
        return [r["partition"] for r in self.rows if getattr(r["flags"], flag)]

    def to_dict(self) -> dict:
        return {
            "n": self.network.n,
            "method": self.method,
            "size_W": len(self.lattice_W),
            "size_L": len(self.lattice_L),
            "size_union": len(self.union),
            "agreement": self.agreement,
            "counts": self.counts(),
            "elements": [
                {
                    "labels": list(r["partition"].labels),
                    "dim": r["partition"].p,
                    "in_W": r["in_W"],
                    "in_L": r["in_L"],
                    "flags": r["flags"].to_dict(),
                }
                for r in self.rows
            ],
        }


def _lattice(M, method: str, tag: str, n_limit: int, tol: float, jobs: int | None):
    if method == "brute":
        return lattice_bruteforce(M, n_limit, tag=tag, jobs=jobs), None
    if method == "eigen":
        return lattice_eigen(M, tol, tag=tag), None
    brute = lattice_bruteforce(M, n_limit, tag=tag, jobs=jobs)
    eig = lattice_eigen(M, tol, tag=tag)
    return brute, eig.elements == brute.elements


def synchrony_antisynchrony_report(
    net: Network,
    method: str = "brute",
    *,
    n_limit: int = 8,
    tol: float = 1e-9,
    jobs: int | None = None,
) -> SynchronyReport:
    """Both lattices, their union and the classification of every element.

    With ``method="both"`` the brute-force lattices are reported and
    ``agreement`` records whether the eigen method reproduced them.
    """
    if method not in ("brute", "eigen", "both"):
        raise ValueError(f"unknown method {method!r}")
    LW, agree_w = _lattice(net.W, method, "W", n_limit, tol, jobs)
    LL, agree_l = _lattice(net.L, method, "L", n_limit, tol, jobs)
    rep = SynchronyReport(net, LW, LL, method)
    if method == "both":
        rep.agreement = {"W": agree_w, "L": agree_l}
    w_test, l_test = InvarianceTester(net.W), InvarianceTester(net.L)
    sw, sl = set(LW.elements), set(LL.elements)
    for P in rep.union:
        rep.rows.append({
            "partition": P,
            "in_W": P in sw,
            "in_L": P in sl,
            "flags": classify(net, P, w_test=w_test, l_test=l_test),
        })
    return rep


def hasse_dot(lat: InvariantLattice, name: str | None = None) -> str:
    """DOT digraph of the covering relation, bottom to top, nodes in label order."""
    ids = {P: f"n{k}" for k, P in enumerate(lat.elements)}
    title = name or f"lattice_{lat.matrix_tag}"
    lines = [f"digraph {title} {{", "  rankdir=BT;", "  node [shape=box];"]
    for P in lat.elements:
        lines.append(f'  {ids[P]} [label="[{P}] dim {P.p}"];')
    for A, B in lat.hasse_edges():
        lines.append(f"  {ids[A]} -> {ids[B]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
