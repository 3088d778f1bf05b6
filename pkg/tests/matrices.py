"""Random integer matrices for lattice agreement tests."""

from fractions import Fraction

import numpy as np

from polydiag import Network, canonicalize, enumerate_tagged_partitions, leaves_invariant
from polydiag.core import rational_matrix


def real_spectrum_matrix(rng, n):
    """Integer matrix with a real spectrum, often with repeated or defective eigenvalues."""
    kind = rng.integers(3)
    if kind == 0:
        A = rng.integers(-2, 3, (n, n))
        return (A + A.T).tolist()
    if kind == 1:
        T = np.triu(rng.integers(-2, 3, (n, n)))
        np.fill_diagonal(T, rng.integers(-1, 2, n))
        perm = rng.permutation(n)
        return T[np.ix_(perm, perm)].tolist()
    # sparse 0/1 graph with a symmetric pattern plus a regular diagonal shift
    A = (rng.random((n, n)) < 0.4).astype(int)
    A = np.triu(A, 1)
    return (A + A.T).tolist()


def any_matrix(rng, n):
    return rng.choice([0, 0, 1, 1, -1, 2], size=(n, n)).tolist()


def random_cases(count, seed, n_max=6):
    """Sparse small-integer networks paired with tagged partitions.

    Half the pairs use partitions drawn from the network's own invariant set
    so that positive cases are well represented.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(2, n_max + 1))
        vals = rng.choice([0, 0, 0, 1, 1, -1, 2, Fraction(1, 2)], size=(n, n))
        W = rational_matrix(vals.tolist())
        net = Network(W)
        parts = list(enumerate_tagged_partitions(n)) if n <= 4 else None
        if parts is not None and rng.random() < 0.5:
            good = [P for P in parts if leaves_invariant(W, P) or leaves_invariant(net.L, P)]
            good = [P for P in good if not P.is_null]
            if good:
                out.append((net, good[int(rng.integers(len(good)))]))
                continue
        labels = rng.integers(-n, n + 1, size=n).tolist()
        if all(x == 0 for x in labels):
            labels[0] = 1
        out.append((net, canonicalize(labels)))
    return out


def regular_matrix(rng, n, valency=None):
    """Integer matrix with constant row sum."""
    v = int(rng.integers(-2, 4)) if valency is None else valency
    A = rng.choice([0, 0, 1, 1, -1, 2], size=(n, n))
    A[:, -1] = 0
    A[:, -1] = v - A.sum(axis=1)
    return A.tolist()
