"""Exact-rational weighted networks, row sums, Laplacians and valencies.

Matrices are numpy arrays of ``dtype=object`` holding ``fractions.Fraction``
entries, so every arithmetic operation is exact. Cells are 1-indexed in all
public signatures and 0-indexed internally.

The edge convention is fixed: ``W[i, j]`` is the weight of the edge from cell
``j + 1`` to cell ``i + 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "NetworkFormatError",
    "parse_rational",
    "format_rational",
    "rational_matrix",
    "Network",
    "row_sum",
    "laplacian",
    "is_regular",
    "valency_relative_to_part",
    "integer_form",
    "load_network",
]


class NetworkFormatError(ValueError):
    """Raised when a network description cannot be parsed."""


def parse_rational(value) -> Fraction:
    """Convert an integer, fraction or rational string to an exact ``Fraction``.

    Accepted strings are integers (``"-3"``), ratios (``"3/2"``) and finite
    decimals (``"2.3"`` becomes ``23/10``). Binary floats are rejected because
    they would silently carry representation error into exact computations.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise NetworkFormatError(f"boolean is not a weight: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            out = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise NetworkFormatError(f"not a rational number: {value!r}") from exc
        return out
    raise NetworkFormatError(
        f"weights must be integers or strings, got {type(value).__name__}: {value!r}"
    )


def format_rational(x: Fraction) -> str:
    """Canonical string form: ``"3"``, ``"-3/2"``, ``"23/10"``."""
    return str(Fraction(x))


def rational_matrix(rows) -> np.ndarray:
    """Build a read-only 2-D object array of ``Fraction`` from nested rows."""
    arr = np.array(rows, dtype=object)
    if arr.ndim != 2:
        raise NetworkFormatError("matrix must be two-dimensional")
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = parse_rational(v) if not isinstance(v, Fraction) else v
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class Network:
    """Weighted directed network on cells ``1..n``.

    Parameters
    ----------
    W : array-like
        ``n x n`` adjacency matrix; ``W[i][j]`` is the weight of the edge from
        cell ``j`` to cell ``i``. Entries may be ints, Fractions or rational
        strings.
    """

    W: np.ndarray

    def __post_init__(self):
        M = rational_matrix(self.W)
        if M.shape[0] != M.shape[1] or M.shape[0] < 1:
            raise NetworkFormatError(f"adjacency matrix must be square and nonempty, got {M.shape}")
        object.__setattr__(self, "W", M)

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @cached_property
    def L(self) -> np.ndarray:
        return laplacian(self)

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.n == other.n and bool(np.all(self.W == other.W))

    def __hash__(self):
        return hash(tuple(self.W.ravel()))

    def __repr__(self):
        return f"Network(n={self.n})"

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Mapping]) -> "Network":
        """Build from an edge list of ``{"to": i, "from": j, "weight": w}`` records."""
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise NetworkFormatError(f"n must be a positive integer, got {n!r}")
        W = [[Fraction(0)] * n for _ in range(n)]
        seen = set()
        for e in edges:
            try:
                i, j, w = e["to"], e["from"], e["weight"]
            except (KeyError, TypeError) as exc:
                raise NetworkFormatError(f"edge needs 'to', 'from' and 'weight': {e!r}") from exc
            for c in (i, j):
                if not isinstance(c, int) or isinstance(c, bool) or not 1 <= c <= n:
                    raise NetworkFormatError(f"cell index out of range 1..{n}: {c!r}")
            if (i, j) in seen:
                raise NetworkFormatError(f"duplicate edge to={i} from={j}")
            seen.add((i, j))
            W[i - 1][j - 1] = parse_rational(w)
        return cls(W)

    @classmethod
    def from_dict(cls, data: Mapping) -> "Network":
        if not isinstance(data, Mapping) or "n" not in data:
            raise NetworkFormatError("network JSON needs an 'n' field")
        n = data["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise NetworkFormatError(f"n must be a positive integer, got {n!r}")
        has_w, has_e = "weights" in data, "edges" in data
        if has_w == has_e:
            raise NetworkFormatError("network JSON needs exactly one of 'weights' or 'edges'")
        if has_e:
            return cls.from_edges(n, data["edges"])
        rows = data["weights"]
        if not isinstance(rows, list) or len(rows) != n or any(
            not isinstance(r, list) or len(r) != n for r in rows
        ):
            raise NetworkFormatError(f"'weights' must be a {n}x{n} list of lists")
        return cls([[parse_rational(v) for v in r] for r in rows])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "weights": [[format_rational(v) for v in row] for row in self.W],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def load_network(path: str | Path) -> Network:
    """Read a network JSON file (matrix or edge-list form)."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise NetworkFormatError(f"{path}: invalid JSON ({exc})") from exc
    return Network.from_dict(data)


def _as_matrix(M) -> np.ndarray:
    if isinstance(M, Network):
        return M.W
    if isinstance(M, np.ndarray) and M.dtype == object:
        return M
    return rational_matrix(M)


def row_sum(M) -> np.ndarray:
    """Row sums of a matrix as a 1-D object array of ``Fraction``.

    For the adjacency matrix these are the input valencies ``v(i)``.
    """
    M = _as_matrix(M)
    out = np.array([sum(row, Fraction(0)) for row in M], dtype=object)
    return out


def laplacian(net: Network) -> np.ndarray:
    """Return ``L = D - W`` with ``D`` the diagonal matrix of input valencies."""
    W = net.W
    L = -W
    v = row_sum(W)
    for i in range(net.n):
        L[i, i] = L[i, i] + v[i]
    L.flags.writeable = False
    return L


def is_regular(M) -> Fraction | None:
    """Common row sum of ``M`` if all row sums agree, else ``None``."""
    rs = row_sum(M)
    if len(rs) == 0:
        return None
    first = rs[0]
    return first if all(x == first for x in rs) else None


def valency_relative_to_part(net: Network, i: int, part: Iterable[int]) -> Fraction:
    """Sum of weights of edges into cell ``i`` from the cells in ``part`` (1-indexed)."""
    n = net.n
    if not 1 <= i <= n:
        raise IndexError(f"cell {i} out of range 1..{n}")
    total = Fraction(0)
    for j in part:
        if not 1 <= j <= n:
            raise IndexError(f"cell {j} out of range 1..{n}")
        total += net.W[i - 1, j - 1]
    return total


def integer_form(M) -> tuple[np.ndarray, int]:
    """Scale a rational matrix to integers.

    Returns
    -------
    K : ndarray
        Integer matrix with ``K / D == M``. It is ``int64`` when every entry
        and every row of absolute values fits comfortably, otherwise an
        object array of Python ints.
    D : int
        Positive common denominator.
    """
    M = _as_matrix(M)
    D = 1
    for v in M.ravel():
        D = D * v.denominator // math.gcd(D, v.denominator)
    ints = [[int(v * D) for v in row] for row in M]
    bound = max((sum(abs(v) for v in row) for row in ints), default=0)
    if bound < 2**50:
        return np.array(ints, dtype=np.int64).reshape(M.shape), D
    return np.array(ints, dtype=object).reshape(M.shape), D


def _matrix_to_strings(M: Sequence[Sequence[Fraction]]) -> list[list[str]]:
    return [[format_rational(v) for v in row] for row in M]
