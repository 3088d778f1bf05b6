"""Invariance of generalized polydiagonals under W and L, and balance classes.

The direct basis-action test (:func:`leaves_invariant`) is authoritative.
The block-condition checks restate the same question on the adapted block
form so that a failure can be traced to a specific pair of blocks.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .core import Network, format_rational, integer_form
from .partition import (
    BlockDecomposition,
    PartitionError,
    TaggedPartition,
    _basis_matrix,
    block_decomposition,
)

__all__ = [
    "SystemClass",
    "Condition",
    "BlockConditionReport",
    "ClassificationFlags",
    "InvarianceTester",
    "leaves_invariant",
    "check_block_conditions",
    "check_block_conditions_W",
    "check_block_conditions_L_via_W",
    "check_odd_conditions",
    "classify",
    "preserving_system_classes",
    "classification_report",
]


class SystemClass(str, enum.Enum):
    """Admissible input-additive system classes."""

    I_G = "I_G"
    I_G0 = "I_G0"
    I_Godd = "I_Godd"
    I_Gl = "I_Gl"
    I_Geo = "I_Geo"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, s: "str | SystemClass") -> "SystemClass":
        if isinstance(s, SystemClass):
            return s
        try:
            return cls(s)
        except ValueError:
            raise ValueError(f"unknown system class {s!r}; expected one of {[c.value for c in cls]}") from None


CLASS_ORDER = tuple(SystemClass)


# -- direct test ----------------------------------------------------------


class InvarianceTester:
    """Exact invariance tests against one fixed matrix.

    The matrix is scaled once to integers so that repeated tests (lattice
    enumeration) avoid rational arithmetic.
    """

    def __init__(self, M):
        M = M.W if isinstance(M, Network) else M
        self.K, self.D = integer_form(M)
        self.n = self.K.shape[0]

    def __call__(self, P: TaggedPartition) -> bool:
        if P.n != self.n:
            raise PartitionError(f"partition has {P.n} cells, matrix is {self.n}x{self.n}")
        if P.p == 0:
            return True
        B = _basis_matrix(P)
        if self.K.dtype == object:
            B = B.astype(object)
        Y = self.K @ B
        labels = np.asarray(P.labels)
        first = {}
        for c, lab in enumerate(P.labels):
            if lab > 0 and lab not in first:
                first[lab] = c
        nz = labels != 0
        if np.any(Y[~nz] != 0):
            return False
        rep = np.array([first[abs(x)] if x else 0 for x in P.labels])
        sgn = np.sign(labels)
        expected = Y[rep] * sgn[:, None]
        return bool(np.all(Y[nz] == expected[nz]))


def leaves_invariant(M, P: TaggedPartition) -> bool:
    """True when ``M·Δ_P ⊆ Δ_P`` (exact).

    Parameters
    ----------
    M : Network or square rational matrix
        A :class:`Network` is read as its adjacency matrix.
    P : TaggedPartition
    """
    return InvarianceTester(M)(P)


# -- block reports --------------------------------------------------------


@dataclass(frozen=True)
class Condition:
    """One checked block condition.

    ``values`` holds the row-sum vectors that were compared and ``valency``
    the common value when the condition passes.
    """

    rule: str
    i: int
    j: int
    terms: tuple[str, ...]
    values: tuple[tuple[Fraction, ...], ...]
    passed: bool
    valency: Fraction | None = None

    def to_dict(self) -> dict:
        d = {
            "rule": self.rule,
            "i": self.i,
            "j": self.j,
            "terms": list(self.terms),
            "row_sums": [[format_rational(v) for v in vec] for vec in self.values],
            "passed": self.passed,
        }
        if self.valency is not None:
            d["valency"] = format_rational(self.valency)
        return d


@dataclass(frozen=True)
class BlockConditionReport:
    """All conditions checked for one (matrix, partition) pair."""

    partition: TaggedPartition
    conditions: tuple[Condition, ...]
    class_of_block: tuple[int, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    @property
    def failures(self) -> tuple[Condition, ...]:
        return tuple(c for c in self.conditions if not c.passed)

    def find(self, rule: str, i: int = 0, j: int = 0) -> Condition:
        for c in self.conditions:
            if c.rule == rule and c.i == i and c.j == j:
                return c
        raise KeyError((rule, i, j))

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "block_classes": list(self.class_of_block),
            "conditions": [c.to_dict() for c in self.conditions],
        }


def _common(vec) -> Fraction | None:
    vals = list(vec)
    if not vals:
        return None
    return vals[0] if all(v == vals[0] for v in vals) else None


def _tup(vec) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in vec)


class _Builder:
    def __init__(self):
        self.items: list[Condition] = []

    def regular(self, rule, i, j, terms, *vecs):
        """All vectors constant with one shared value."""
        vals = [_common(v) for v in vecs]
        ok = all(v is not None for v in vals) and len(set(vals)) == 1
        self.items.append(
            Condition(rule, i, j, tuple(terms), tuple(_tup(v) for v in vecs), ok, vals[0] if ok else None)
        )

    def equal(self, rule, i, j, terms, a, b):
        ok = bool(np.all(a == b))
        self.items.append(Condition(rule, i, j, tuple(terms), (_tup(a), _tup(b)), ok))

    def zero(self, rule, i, j, terms, a):
        ok = all(v == 0 for v in a)
        self.items.append(Condition(rule, i, j, tuple(terms), (_tup(a),), ok, Fraction(0) if ok else None))


def _require_nonnull(P: TaggedPartition):
    if P.is_null:
        raise PartitionError("block conditions are defined for non-null partitions only")


def check_block_conditions(M, P: TaggedPartition) -> BlockConditionReport:
    """Block conditions for ``M·Δ_P ⊆ Δ_P`` on the adapted form of any square ``M``.

    Block indices ``i, j`` are internal (see :class:`BlockDecomposition`).
    Rules:

    - ``QR`` (i, j ≤ q): rs(Q_ij) − rs(R_ij) and rs(Q̄_ij) − rs(R̄_ij) regular, same valency
    - ``QRbar`` (i ≤ q < j): rs(Q_ij) and −rs(R̄_ij) regular, same valency
    - ``QR_free`` (q < i, j ≤ q): rs(Q_ij) − rs(R_ij) regular
    - ``Q`` (q < i, j): Q_ij regular
    - ``Z0`` (r = 1, j ≤ q): rs(Z_0j) = rs(Z̄_0j)
    - ``Z0_zero`` (r = 1, j > q): rs(Z_0j) = 0
    """
    _require_nonnull(P)
    bd = block_decomposition(M, P)
    p, q, r = P.p, P.q, P.r
    rs = bd.rs
    out = _Builder()
    for i in range(1, p + 1):
        for j in range(1, p + 1):
            if i <= q and j <= q:
                out.regular(
                    "QR", i, j, ("rs(Q)-rs(R)", "rs(Qbar)-rs(Rbar)"),
                    rs("Q", i, j) - rs("R", i, j), rs("Qbar", i, j) - rs("Rbar", i, j),
                )
            elif i <= q:
                out.regular("QRbar", i, j, ("rs(Q)", "-rs(Rbar)"), rs("Q", i, j), -rs("Rbar", i, j))
            elif j <= q:
                out.regular("QR_free", i, j, ("rs(Q)-rs(R)",), rs("Q", i, j) - rs("R", i, j))
            else:
                out.regular("Q", i, j, ("rs(Q)",), rs("Q", i, j))
    if r:
        for j in range(1, p + 1):
            if j <= q:
                out.equal("Z0", 0, j, ("rs(Z0)", "rs(Z0bar)"), rs("Z0", 0, j), rs("Z0bar", 0, j))
            else:
                out.zero("Z0_zero", 0, j, ("rs(Z0)",), rs("Z0", 0, j))
    return BlockConditionReport(P, tuple(out.items), bd.class_of_block)


def check_block_conditions_W(net: Network, P: TaggedPartition) -> BlockConditionReport:
    """Block conditions for invariance under the adjacency matrix."""
    return check_block_conditions(net.W, P)


def check_block_conditions_L_via_W(net: Network, P: TaggedPartition) -> BlockConditionReport:
    """Conditions for invariance under ``L = D − W`` stated on the blocks of ``W``.

    Rules (internal block indices, ``rs`` = row sum of a ``W`` block):

    - ``r_i`` (i ≤ q): Σ_{j≠i} rs(Q_ij) + Σ_{j≠i, j≤q} rs(R_ij) + 2 rs(R_ii) + rs(Z_i0)
      and Σ_{j≠i, j≤q} rs(Q̄_ij) + Σ_{j≠i} rs(R̄_ij) + 2 rs(R̄_ii) + rs(Z̄_i0)
      regular with the same valency ``r_i``
    - ``q_ij`` (i ≠ j ≤ q): −rs(Q_ij) + rs(R_ij) and rs(R̄_ij) − rs(Q̄_ij) regular, same valency
    - ``q_ij_free`` (i ≤ q < j): −rs(Q_ij) and rs(R̄_ij) regular, same valency
    - ``r_i_free`` (q < i): Σ_{j≠i} rs(Q_ij) + Σ_{j≤q} rs(R_ij) + rs(Z_i0) regular
    - ``q_ij_mixed`` (q < i, j ≤ q): −rs(Q_ij) + rs(R_ij) regular
    - ``Q_neg`` (q < i ≠ j, j > q): −Q_ij regular
    - ``Z0`` and ``Z0_zero`` as for the adjacency matrix
    """
    _require_nonnull(P)
    bd = block_decomposition(net.W, P)
    p, q, r = P.p, P.q, P.r
    rs = bd.rs
    out = _Builder()

    def zeros(key):
        a, b = bd.ranges[key]
        return np.array([Fraction(0)] * (b - a), dtype=object)

    for i in range(1, p + 1):
        Pi = ("P", i)
        if i <= q:
            Pb = ("Pbar", i)
            a = zeros(Pi)
            b = zeros(Pb)
            for j in range(1, p + 1):
                if j != i:
                    a = a + rs("Q", i, j)
                    b = b + rs("Rbar", i, j)
            for j in range(1, q + 1):
                if j != i:
                    a = a + rs("R", i, j)
                    b = b + rs("Qbar", i, j)
            a = a + 2 * rs("R", i, i)
            b = b + 2 * rs("Rbar", i, i)
            if r:
                a = a + rs("Z", i)
                b = b + rs("Zbar", i)
            out.regular("r_i", i, i, ("P_i row sum", "Pbar_i row sum"), a, b)
            for j in range(1, p + 1):
                if j == i:
                    continue
                if j <= q:
                    out.regular(
                        "q_ij", i, j, ("-rs(Q)+rs(R)", "rs(Rbar)-rs(Qbar)"),
                        -rs("Q", i, j) + rs("R", i, j), rs("Rbar", i, j) - rs("Qbar", i, j),
                    )
                else:
                    out.regular("q_ij_free", i, j, ("-rs(Q)", "rs(Rbar)"), -rs("Q", i, j), rs("Rbar", i, j))
        else:
            a = zeros(Pi)
            for j in range(1, p + 1):
                if j != i:
                    a = a + rs("Q", i, j)
            for j in range(1, q + 1):
                a = a + rs("R", i, j)
            if r:
                a = a + rs("Z", i)
            out.regular("r_i_free", i, i, ("P_i row sum",), a)
            for j in range(1, p + 1):
                if j == i:
                    continue
                if j <= q:
                    out.regular("q_ij_mixed", i, j, ("-rs(Q)+rs(R)",), -rs("Q", i, j) + rs("R", i, j))
                else:
                    out.regular("Q_neg", i, j, ("-rs(Q)",), -rs("Q", i, j))
    if r:
        for j in range(1, p + 1):
            if j <= q:
                out.equal("Z0", 0, j, ("rs(Z0)", "rs(Z0bar)"), rs("Z0", 0, j), rs("Z0bar", 0, j))
            else:
                out.zero("Z0_zero", 0, j, ("rs(Z0)",), rs("Z0", 0, j))
    return BlockConditionReport(P, tuple(out.items), bd.class_of_block)


def check_odd_conditions(net: Network, P: TaggedPartition) -> BlockConditionReport:
    """Block tests for odd-balance on the adjacency matrix.

    Rules (internal block indices):

    - ``a``: every block except Q_ii, Q̄_ii, Z_0j, Z̄_0j and Z_00 is regular
    - ``b``: for i, j ≤ q the pairs (Q_ij, Q̄_ij) with i ≠ j, (R_ij, R̄_ij) and
      (Z_i0, Z̄_i0) share valencies
    - ``c``: rs(Z_0j) = rs(Z̄_0j) for j ≤ q
    - ``d``: rs(Z_0j) = 0 for j > q
    - ``e``: for i ≤ q < j, Q_ij and R̄_ij have valency 0

    Rule ``e`` is needed for the class to coincide with invariance under
    every odd system: h(a, b) and h(a, −b) are independent for generic odd h,
    so the P_j and P̄_i contributions cannot cancel each other.
    """
    bd = block_decomposition(net.W, P)
    p, q, r = P.p, P.q, P.r
    rs = bd.rs
    out = _Builder()
    for i in range(1, p + 1):
        for j in range(1, p + 1):
            if i != j:
                out.regular("a", i, j, ("rs(Q)",), rs("Q", i, j))
        for j in range(1, q + 1):
            out.regular("a", i, j, ("rs(R)",), rs("R", i, j))
        if r:
            out.regular("a", i, 0, ("rs(Z)",), rs("Z", i))
    for i in range(1, q + 1):
        for j in range(1, q + 1):
            if i != j:
                out.regular("a", i, j, ("rs(Qbar)",), rs("Qbar", i, j))
        for j in range(1, p + 1):
            out.regular("a", i, j, ("rs(Rbar)",), rs("Rbar", i, j))
        if r:
            out.regular("a", i, 0, ("rs(Zbar)",), rs("Zbar", i))
    for i in range(1, q + 1):
        for j in range(1, q + 1):
            if i != j:
                out.regular("b", i, j, ("rs(Q)", "rs(Qbar)"), rs("Q", i, j), rs("Qbar", i, j))
            out.regular("b", i, j, ("rs(R)", "rs(Rbar)"), rs("R", i, j), rs("Rbar", i, j))
        if r:
            out.regular("b", i, 0, ("rs(Z)", "rs(Zbar)"), rs("Z", i), rs("Zbar", i))
    if r:
        for j in range(1, q + 1):
            out.equal("c", 0, j, ("rs(Z0)", "rs(Z0bar)"), rs("Z0", 0, j), rs("Z0bar", 0, j))
        for j in range(q + 1, p + 1):
            out.zero("d", 0, j, ("rs(Z0)",), rs("Z0", 0, j))
    for i in range(1, q + 1):
        for j in range(q + 1, p + 1):
            out.zero("e", i, j, ("rs(Q)",), rs("Q", i, j))
            out.zero("e", i, j, ("rs(Rbar)",), rs("Rbar", i, j))
    return BlockConditionReport(P, tuple(out.items), bd.class_of_block)


# -- classification -------------------------------------------------------


@dataclass(frozen=True)
class ClassificationFlags:
    """Balance predicates for one (network, partition) pair.

    ``balanced``/``exo_balanced``/``strictly_exo_balanced`` are only set for
    standard partitions; ``odd_balanced``/``linear_balanced``/
    ``even_odd_balanced`` only for non-standard ones. The raw invariance
    flags are reported for every partition.
    """

    standard: bool
    balanced: bool
    exo_balanced: bool
    strictly_exo_balanced: bool
    odd_balanced: bool
    linear_balanced: bool
    even_odd_balanced: bool
    invariant_under_W: bool
    invariant_under_L: bool
    preserving: frozenset = field(default_factory=frozenset)

    def to_dict(self) -> dict:
        return {
            "standard": self.standard,
            "balanced": self.balanced,
            "exo_balanced": self.exo_balanced,
            "strictly_exo_balanced": self.strictly_exo_balanced,
            "odd_balanced": self.odd_balanced,
            "linear_balanced": self.linear_balanced,
            "even_odd_balanced": self.even_odd_balanced,
            "invariant_under_W": self.invariant_under_W,
            "invariant_under_L": self.invariant_under_L,
            "preserving_system_classes": [c.value for c in CLASS_ORDER if c in self.preserving],
        }


def _preserving(std: bool, bal: bool, exo: bool, odd: bool, lin: bool, eo: bool) -> frozenset:
    S = SystemClass
    out = set()
    if std:
        if bal:
            out |= {S.I_G, S.I_Geo}
        if exo:
            out |= {S.I_G0, S.I_Godd, S.I_Gl}
    else:
        if odd:
            out.add(S.I_Godd)
        if lin:
            out.add(S.I_Gl)
        if eo:
            out.add(S.I_Geo)
    return frozenset(out)


def classify(
    net: Network,
    P: TaggedPartition,
    *,
    w_test: InvarianceTester | None = None,
    l_test: InvarianceTester | None = None,
) -> ClassificationFlags:
    """Classify ``P`` for ``net``.

    Parameters
    ----------
    w_test, l_test : InvarianceTester, optional
        Precomputed testers for ``W`` and ``L`` (speeds up bulk use).
    """
    if P.n != net.n:
        raise PartitionError(f"partition length mismatch: {P.n} labels for n={net.n}")
    inv_w = (w_test or InvarianceTester(net.W))(P)
    inv_l = (l_test or InvarianceTester(net.L))(P)
    std = P.is_standard
    if std:
        bal, exo = inv_w, inv_l
        odd = lin = eo = False
    else:
        bal = exo = False
        lin, eo = inv_l, inv_w
        odd = check_odd_conditions(net, P).passed
    return ClassificationFlags(
        standard=std,
        balanced=bal,
        exo_balanced=exo,
        strictly_exo_balanced=exo and not bal,
        odd_balanced=odd,
        linear_balanced=lin,
        even_odd_balanced=eo,
        invariant_under_W=inv_w,
        invariant_under_L=inv_l,
        preserving=_preserving(std, bal, exo, odd, lin, eo),
    )


def preserving_system_classes(net: Network, P: TaggedPartition) -> frozenset:
    """System classes whose every member leaves Δ_P flow-invariant."""
    return classify(net, P).preserving


def classification_report(net: Network, P: TaggedPartition) -> dict:
    """Flags plus the block-condition diagnostics as a JSON-ready dict."""
    flags = classify(net, P)
    out = {"partition": list(P.labels), "p": P.p, "q": P.q, "r": P.r, "flags": flags.to_dict()}
    if not P.is_null:
        out["conditions_W"] = check_block_conditions_W(net, P).to_dict()
        out["conditions_L_via_W"] = check_block_conditions_L_via_W(net, P).to_dict()
        if not P.is_standard:
            out["conditions_odd"] = check_odd_conditions(net, P).to_dict()
    return out


def sorted_classes(classes: Iterable[SystemClass]) -> list[SystemClass]:
    s = set(classes)
    return [c for c in CLASS_ORDER if c in s]
