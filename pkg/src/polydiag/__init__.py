"""Synchrony and anti-synchrony subspaces of weighted networks.

The package decides which generalized polydiagonals of a weighted network
are invariant under its adjacency and Laplacian matrices, classifies the
matching tagged partitions, builds quotient networks, enumerates the
invariant lattices and checks flow invariance numerically.
"""

from .core import (
    Network,
    NetworkFormatError,
    format_rational,
    is_regular,
    laplacian,
    load_network,
    parse_rational,
    row_sum,
    valency_relative_to_part,
)
from .dynamics import (
    SystemSpec,
    Trajectory,
    certify_flow_invariance,
    integrate,
    linear_span_check,
    restriction_consistency,
    sample_system,
    vector_field,
)
from .fixtures import fixture_names, load_fixture
from .invariance import (
    ClassificationFlags,
    SystemClass,
    check_block_conditions_L_via_W,
    check_block_conditions_W,
    check_odd_conditions,
    classify,
    leaves_invariant,
    preserving_system_classes,
)
from .lattice import (
    InvariantLattice,
    hasse_dot,
    lattice_bruteforce,
    lattice_eigen,
    synchrony_antisynchrony_report,
)
from .partition import (
    BlockDecomposition,
    GeneralizedPolydiagonal,
    TaggedPartition,
    block_decomposition,
    canonicalize,
    enumerate_tagged_partitions,
    intersect,
    is_subspace_of,
    membership_basis,
    minimal_polydiagonal_containing,
    parse_partition,
)
from .quotient import QuotientNetwork, quotient, quotient_to_dot

__version__ = "0.1.0"
