"""Quotient and symbolic-quotient networks of balanced tagged partitions.

Quotient cells are named after the smallest cell of their part, ``"[i]"``.
Symbolic quotients also carry negative-state cells ``"-[i]"`` for
counterparts and a zero-state cell for the zero part.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .core import Network, format_rational, valency_relative_to_part
from .invariance import classify
from .partition import TaggedPartition

__all__ = [
    "QuotientError",
    "QuotientNetwork",
    "quotient_balanced",
    "quotient_exo",
    "quotient_odd_symbolic",
    "quotient_linear_symbolic",
    "quotient_eo_symbolic",
    "quotient",
    "quotient_to_dot",
]

Kind = Literal["balanced", "exo", "odd_symbolic", "linear_symbolic", "eo_symbolic"]


class QuotientError(ValueError):
    """The partition does not belong to the class the quotient needs."""


@dataclass(frozen=True)
class QuotientNetwork:
    """Quotient network.

    Attributes
    ----------
    kind : str
        One of ``balanced``, ``exo``, ``odd_symbolic``, ``linear_symbolic``,
        ``eo_symbolic``.
    cells : tuple of str
        Cell identifiers. Rows of ``matrix`` follow this order.
    tags : tuple of str
        ``"state"``, ``"negative"`` or ``"zero"`` per cell.
    members : tuple of tuple of int
        Original cells (1-indexed) represented by each quotient cell.
    matrix : ndarray
        Rational weights; ``matrix[i, j]`` is the weight of the edge from
        cell ``j`` to cell ``i``. For ``linear_symbolic`` it has ``p + 1``
        columns and the last holds ``r_i``.
    """

    kind: str
    partition: TaggedPartition
    cells: tuple[str, ...]
    tags: tuple[str, ...]
    members: tuple[tuple[int, ...], ...]
    matrix: np.ndarray

    @property
    def p(self) -> int:
        return self.partition.p

    def edges(self) -> list[tuple[str, str, Fraction]]:
        """Nonzero edges as ``(source, target, weight)``."""
        out = []
        rows = self.matrix.shape[0]
        for i in range(rows):
            for j in range(self.matrix.shape[1]):
                w = self.matrix[i, j]
                if w == 0:
                    continue
                src = self.cells[j] if j < len(self.cells) else "0"
                out.append((src, self.cells[i], w))
        return out

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "partition": list(self.partition.labels),
            "cells": [
                {"id": c, "tag": t, "members": list(m)}
                for c, t, m in zip(self.cells, self.tags, self.members)
            ],
            "matrix": [[format_rational(v) for v in row] for row in self.matrix],
            "edges": [{"from": s, "to": t, "weight": format_rational(w)} for s, t, w in self.edges()],
        }
        if self.kind == "linear_symbolic":
            d["r"] = [format_rational(v) for v in self.matrix[:, -1]]
        return d


def _common_over(net: Network, rows, fn, what: str) -> Fraction:
    vals = {fn(c) for c in rows}
    if len(vals) != 1:
        raise QuotientError(f"{what} is not regular: values {sorted(vals)} over cells {list(rows)}")
    return vals.pop()


def _v(net: Network, c: int, cells) -> Fraction:
    return valency_relative_to_part(net, c, cells)


def _state_cells(P: TaggedPartition):
    names = tuple(f"[{P.representative(k)}]" for k in range(1, P.p + 1))
    members = tuple(P.part(k) for k in range(1, P.p + 1))
    return names, members


def _matrix(rows) -> np.ndarray:
    M = np.array(rows, dtype=object)
    if M.ndim == 1:
        M = M.reshape(len(rows), 0)
    M.flags.writeable = False
    return M


def _require(ok: bool, P: TaggedPartition, what: str):
    if not ok:
        raise QuotientError(f"partition {P} is not {what} for this network")


def quotient_balanced(net: Network, P: TaggedPartition) -> QuotientNetwork:
    """``p x p`` quotient with ``q_ij`` the common row sum of block ``Q_ij``."""
    _require(classify(net, P).balanced, P, "balanced")
    names, members = _state_cells(P)
    p = P.p
    M = [[_common_over(net, P.part(i), lambda c, j=j: _v(net, c, P.part(j)), f"Q_{i}{j}")
          for j in range(1, p + 1)] for i in range(1, p + 1)]
    return QuotientNetwork("balanced", P, names, ("state",) * p, members, _matrix(M))


def quotient_exo(net: Network, P: TaggedPartition) -> QuotientNetwork:
    """Quotient for exo-balanced ``P``: valencies of ``Q_ij`` off the diagonal, zero diagonal."""
    _require(classify(net, P).exo_balanced, P, "exo-balanced")
    names, members = _state_cells(P)
    p = P.p
    M = [[Fraction(0) if i == j else
          _common_over(net, P.part(i), lambda c, j=j: _v(net, c, P.part(j)), f"Q_{i}{j}")
          for j in range(1, p + 1)] for i in range(1, p + 1)]
    return QuotientNetwork("exo", P, names, ("state",) * p, members, _matrix(M))


def quotient_odd_symbolic(net: Network, P: TaggedPartition) -> QuotientNetwork:
    """Symbolic quotient of an odd-balanced ``P`` on ``p + q + r`` cells.

    Edges enter only the state cells ``[i]``: from ``[j]`` (j ≠ i) with the
    valency of ``Q_ij``, from ``-[j]`` with the valency of ``R_ij`` and from
    the zero cell with the valency of ``Z_i0``. Rows of the negative and zero
    cells are left empty.
    """
    _require(classify(net, P).odd_balanced, P, "odd-balanced")
    names, members = _state_cells(P)
    p = P.p
    neg = [k for k in range(1, p + 1) if P.has_counterpart(k)]
    cells = list(names) + [f"-[{P.representative(k)}]" for k in neg]
    tags = ["state"] * p + ["negative"] * len(neg)
    mem = list(members) + [P.counterpart(k) for k in neg]
    sources = [P.part(k) for k in range(1, p + 1)] + [P.counterpart(k) for k in neg]
    if P.r:
        z = P.zero_part()
        cells.append(f"[{z[0]}]")
        tags.append("zero")
        mem.append(z)
        sources.append(z)
    m = len(cells)
    M = [[Fraction(0)] * m for _ in range(m)]
    for i in range(1, p + 1):
        for col, src in enumerate(sources):
            if col == i - 1:
                continue
            M[i - 1][col] = _common_over(
                net, P.part(i), lambda c, src=src: _v(net, c, src), f"block {cells[col]}->{cells[i - 1]}"
            )
    return QuotientNetwork("odd_symbolic", P, tuple(cells), tuple(tags), tuple(mem), _matrix(M))


def _linear_coeffs(net: Network, P: TaggedPartition, c: int, i: int):
    """(q_i1..q_ip, r_i) seen from cell ``c`` of ``P_i`` for the Laplacian action."""
    p = P.p
    q_row = []
    r_val = Fraction(0)
    for j in range(1, p + 1):
        vp = _v(net, c, P.part(j))
        vn = _v(net, c, P.counterpart(j))
        if j == i:
            q_row.append(Fraction(0))
            r_val += 2 * vn
        else:
            q_row.append(-vp + vn)
            r_val += vp + vn
    r_val += _v(net, c, P.zero_part())
    return tuple(q_row), r_val


def quotient_linear_symbolic(net: Network, P: TaggedPartition) -> QuotientNetwork:
    """``p x (p+1)`` matrix ``[q_ij | r_i]`` for a linear-balanced ``P``.

    For a linear system with ``h(x, y) = β(x − y)`` the restriction to Δ_P reads
    ``ẏ_i = g(y_i) + Σ_{j≠i} q_ij h(y_j, 0) + r_i h(y_i, 0)``.
    """
    _require(classify(net, P).linear_balanced, P, "linear-balanced")
    names, members = _state_cells(P)
    p = P.p
    rows = []
    for i in range(1, p + 1):
        seen = {_linear_coeffs(net, P, c, i) for c in P.part(i)}
        if len(seen) != 1:
            raise QuotientError(f"linear coefficients of part {i} are not regular")
        q_row, r_val = seen.pop()
        rows.append(list(q_row) + [r_val])
    return QuotientNetwork("linear_symbolic", P, names, ("state",) * p, members, _matrix(rows))


def quotient_eo_symbolic(net: Network, P: TaggedPartition) -> QuotientNetwork:
    """``p x p`` matrix with ``q_ij`` the valency of ``rs(Q_ij) − rs(R_ij)`` (diagonal included)."""
    _require(classify(net, P).even_odd_balanced, P, "even-odd-balanced")
    names, members = _state_cells(P)
    p = P.p
    M = [[_common_over(
        net, P.part(i),
        lambda c, j=j: _v(net, c, P.part(j)) - _v(net, c, P.counterpart(j)),
        f"rs(Q_{i}{j})-rs(R_{i}{j})",
    ) for j in range(1, p + 1)] for i in range(1, p + 1)]
    return QuotientNetwork("eo_symbolic", P, names, ("state",) * p, members, _matrix(M))


_BUILDERS = {
    "balanced": quotient_balanced,
    "exo": quotient_exo,
    "odd_symbolic": quotient_odd_symbolic,
    "linear_symbolic": quotient_linear_symbolic,
    "eo_symbolic": quotient_eo_symbolic,
}
_ALIASES = {"odd": "odd_symbolic", "linear": "linear_symbolic", "eo": "eo_symbolic"}


def quotient(net: Network, P: TaggedPartition, kind: str) -> QuotientNetwork:
    """Dispatch on ``kind`` (short aliases ``odd``, ``linear``, ``eo`` accepted)."""
    kind = _ALIASES.get(kind, kind)
    if kind not in _BUILDERS:
        raise ValueError(f"unknown quotient kind {kind!r}")
    return _BUILDERS[kind](net, P)


def _dot_id(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def quotient_to_dot(Qn: QuotientNetwork) -> str:
    """Graphviz DOT text. Negative cells are boxes and the zero cell is dashed."""
    lines = [f"digraph quotient_{Qn.kind} {{", "  rankdir=LR;"]
    style = {
        "state": "shape=circle",
        "negative": "shape=box",
        "zero": "shape=circle, style=dashed",
    }
    for c, t in zip(Qn.cells, Qn.tags):
        lines.append(f"  {_dot_id(c)} [{style[t]}];")
    if Qn.kind == "linear_symbolic":
        lines.append('  "0" [shape=circle, style=dashed, label="0"];')
    for s, t, w in Qn.edges():
        lines.append(f"  {_dot_id(s)} -> {_dot_id(t)} [label={_dot_id(format_rational(w))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
