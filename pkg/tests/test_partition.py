import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polydiag import (
    TaggedPartition,
    block_decomposition,
    canonicalize,
    enumerate_tagged_partitions,
    intersect,
    is_subspace_of,
    load_fixture,
    membership_basis,
    minimal_polydiagonal_containing,
    parse_partition,
)
from polydiag.partition import (
    AmbiguityError,
    PartitionError,
    count_tagged_partitions,
    full_partition,
    null_partition,
    satisfies,
)

from conftest import qp


# -- independent oracle: a subspace as its reduced row echelon form ---------


def rref(rows, n):
    rows = [list(map(Fraction, r)) for r in rows]
    out, col = [], 0
    for col in range(n):
        piv = next((r for r in rows if r[col] != 0), None)
        if piv is None:
            continue
        rows.remove(piv)
        piv = [x / piv[col] for x in piv]
        rows = [[a - r[col] * b for a, b in zip(r, piv)] for r in rows]
        out = [[a - o[col] * b for a, b in zip(o, piv)] for o in out]
        out.append(piv)
    return tuple(sorted(tuple(r) for r in out if any(r)))


def span_of_labels(raw):
    n = len(raw)
    vecs = []
    for k in {abs(x) for x in raw if x}:
        vecs.append([1 if x == k else -1 if x == -k else 0 for x in raw])
    return rref(vecs, n)


def oracle_count(n):
    return len({span_of_labels(raw) for raw in itertools.product(range(-n, n + 1), repeat=n)})


# frozen from oracle_count before the library was written
FROZEN_COUNTS = {1: 2, 2: 6, 3: 24, 4: 116}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_counts_match_frozen_oracle(n):
    parts = list(enumerate_tagged_partitions(n))
    assert len(parts) == len(set(parts)) == FROZEN_COUNTS[n]
    assert count_tagged_partitions(n) == FROZEN_COUNTS[n]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_oracle_reproduces_frozen_counts(n):
    assert oracle_count(n) == FROZEN_COUNTS[n]


def test_counts_closed_form_up_to_8():
    assert [count_tagged_partitions(n) for n in range(1, 9)] == [2, 6, 24, 116, 648, 4088, 28640, 219920]


def test_enumeration_matches_oracle_subspaces_n3():
    ours = {span_of_labels(P.labels) for P in enumerate_tagged_partitions(3)}
    assert len(ours) == 24


def test_enumerate_n1_n2():
    assert [P.labels for P in enumerate_tagged_partitions(1)] == sorted([(1,), (0,)])
    got = {P.labels for P in enumerate_tagged_partitions(2)}
    assert got == {(1, 1), (1, 2), (1, -1), (1, 0), (0, 1), (0, 0)}
    assert {P.labels for P in enumerate_tagged_partitions(2, "standard_only")} == {(1, 1), (1, 2)}


def test_enumeration_is_lexicographic():
    labels = [P.labels for P in enumerate_tagged_partitions(4)]
    assert labels == sorted(labels)


def test_nonstandard_filter_complements_standard():
    a = set(enumerate_tagged_partitions(4, "standard_only"))
    b = set(enumerate_tagged_partitions(4, "nonstandard_only"))
    assert not a & b and len(a) + len(b) == 116 and len(a) == 15


@pytest.mark.parametrize("raw,want", [
    ([-3, -3, 5, 0], (1, 1, 2, 0)),
    ([1, 1, -2, 2], (1, 1, 2, -2)),
    ([2, 2, 2, 2], (1, 1, 1, 1)),
])
def test_canonicalize(raw, want):
    assert canonicalize(raw).labels == want


def test_canonicalize_rejects_empty():
    with pytest.raises(PartitionError):
        canonicalize([])


def test_noncanonical_constructor_rejected():
    with pytest.raises(PartitionError):
        TaggedPartition((2, 1))


def test_parse_partition():
    assert parse_partition("1,1,2,-2", 4).labels == (1, 1, 2, -2)
    assert parse_partition("0,0,0", 3).is_null
    assert parse_partition("1 -1 2", 3).labels == (1, -1, 2)
    with pytest.raises(PartitionError, match="partition length mismatch"):
        parse_partition("1,1", 4)
    with pytest.raises(PartitionError):
        parse_partition("1,x", 2)


def test_pqr():
    P = parse_partition("1,2,2,-1,0")
    assert (P.p, P.q, P.r) == (2, 1, 1)
    assert not P.is_standard
    assert parse_partition("1,2,1").is_standard


def test_membership_basis():
    assert membership_basis(parse_partition("1,1,2,-2")).basis == ((1, 1, 0, 0), (0, 0, 1, -1))
    assert membership_basis(qp("P1")).basis == ((1, -1, 0, 0),)
    B = membership_basis(null_partition(3))
    assert B.basis == () and B.dim == 0


@pytest.mark.parametrize("vecs,want", [
    ([(1, 1, -2, 2)], "1,1,2,-2"),
    ([(1, 1, 0, 0), (1, 1, 1, 1)], "1,1,2,2"),
    ([(0, -2, 2, -2)], "0,1,-1,1"),
])
def test_minimal_polydiagonal(vecs, want):
    assert minimal_polydiagonal_containing(vecs) == parse_partition(want)


def test_minimal_polydiagonal_float_and_ambiguity():
    assert minimal_polydiagonal_containing([(0.5, 0.5 + 1e-12, -0.5)], tol=1e-9) == parse_partition("1,1,-1")
    # 1 ~ 2 and 2 ~ 3 within tol, but 1 and 3 are not
    with pytest.raises(AmbiguityError):
        minimal_polydiagonal_containing([(1.0, 1.0 + 8e-10, 1.0 + 1.6e-9)], tol=1e-9)


def test_intersect_examples():
    assert intersect(qp("P1"), qp("P2")).is_null
    assert intersect(parse_partition("1,1,2,2"), parse_partition("1,2,2,2")) == parse_partition("1,1,1,1")
    assert intersect(qp("P7"), qp("P7")) == qp("P7")


def test_is_subspace_examples():
    assert is_subspace_of(qp("P1"), qp("P7"))
    assert is_subspace_of(null_partition(4), qp("P3"))
    assert not is_subspace_of(parse_partition("1,1,2,2"), qp("P7"))


def test_block_decomposition_five_cell():
    B = block_decomposition(load_fixture("five_cell").W, parse_partition("1,2,2,-1,0"))
    F = Fraction
    assert B.block("Q", 1, 1).tolist() == [[0]]
    assert B.block("Q", 1, 2).tolist() == [[F(-3, 2), F(-3, 2)]]
    assert B.block("R", 1, 1).tolist() == [[1]]
    assert B.block("Z", 1, 0).tolist() == [[F(23, 10)]]


def test_block_decomposition_notequal():
    B = block_decomposition(load_fixture("ex_notequal").W, parse_partition("1,1,-1,-1"))
    assert B.block("Q", 1, 1).tolist() == [[3, 1], [1, 1]]
    assert B.block("R", 1, 1).tolist() == [[1, 1], [0, 0]]
    assert B.block("Rbar", 1, 1).tolist() == [[0, 0], [4, 2]]
    assert B.block("Qbar", 1, 1).tolist() == [[5, -3], [5, 3]]


def test_block_decomposition_single_part():
    M = load_fixture("ex_qutro").W
    B = block_decomposition(M, full_partition(4).__class__((1, 1, 1, 1)))
    assert B.block("Q", 1, 1).tolist() == M.tolist()


def test_block_decomposition_counterpart_classes_first():
    B = block_decomposition(load_fixture("ex_qutro").W, parse_partition("1,2,2,-2"))
    assert B.class_of_block[0] == 2


# -- properties ---------------------------------------------------------------


@st.composite
def raw_labels(draw, n=None):
    n = n or draw(st.integers(1, 6))
    return draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n))


@given(raw_labels(), st.permutations([1, 2, 3]), st.lists(st.sampled_from([1, -1]), min_size=3, max_size=3))
def test_canonicalize_invariances(raw, perm, signs):
    P = canonicalize(raw)
    assert canonicalize(P.labels) == P
    relabel = [0 if x == 0 else (1 if x > 0 else -1) * perm[abs(x) - 1] * signs[abs(x) - 1] for x in raw]
    assert canonicalize(relabel) == P
    assert span_of_labels(raw) == span_of_labels(P.labels)


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(raw_labels(n), raw_labels(n), raw_labels(n))))
@settings(max_examples=200)
def test_intersection_lattice_laws(t):
    A, B, C = (canonicalize(x) for x in t)
    assert intersect(A, B) == intersect(B, A)
    assert intersect(A, intersect(B, C)) == intersect(intersect(A, B), C)
    assert intersect(A, A) == A
    assert is_subspace_of(intersect(A, B), A)
    # exact oracle: intersection of subspaces via the RREF of the stacked constraints
    n = A.n
    ker = _constraint_rows(A) + _constraint_rows(B)
    assert _nullity(ker, n) == intersect(A, B).p


def _constraint_rows(P):
    rows = []
    for i in range(P.n):
        a = P.labels[i]
        if a == 0:
            rows.append([int(k == i) for k in range(P.n)])
        for j in range(i + 1, P.n):
            b = P.labels[j]
            if a and abs(a) == abs(b):
                rows.append([1 if k == i else (-1 if a == b else 1) if k == j else 0 for k in range(P.n)])
    return rows


def _nullity(rows, n):
    return n - len(rref(rows, n)) if rows else n


@given(raw_labels())
def test_basis_and_membership(raw):
    P = canonicalize(raw)
    B = membership_basis(P)
    assert B.dim == P.p == len(B.basis)
    for b in B.basis:
        assert satisfies(P, b)
    x = np.zeros(P.n)
    for k, b in enumerate(B.basis):
        x += (k + 1.5) * np.asarray(b, dtype=float)
    if P.p:
        assert minimal_polydiagonal_containing([x], tol=1e-12) == P or P.p > 1


@given(raw_labels(), st.integers(0, 10**6))
def test_block_round_trip(raw, seed):
    P = canonicalize(raw)
    rng = np.random.default_rng(seed)
    M = np.array([[Fraction(int(v)) for v in row] for row in rng.integers(-3, 4, (P.n, P.n))], dtype=object)
    B = block_decomposition(M, P)
    perm = [c - 1 for c in B.permutation]
    back = np.empty_like(M)
    back[np.ix_(perm, perm)] = B.permuted
    assert (back == M).all()
