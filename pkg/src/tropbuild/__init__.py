"""Exact tropical linear algebra and the combinatorics of building points.

Valued fields (Q with a p-adic or trivial valuation, Q(t) with the t-adic
one), valuated matroids, tropical linear spaces, diagonalizable seminorms
and their projections, flags, and lattices over discrete valuation rings.
"""

from ._kernels import get_backend, set_backend
from .building import (
    DiagSeminorm,
    Flag,
    chart_sign_duality,
    class_equal,
    evaluate,
    evaluate_many,
    flag_to_seminorm,
    onto_hyperplane,
    seminorm_to_flag,
    tight_span_chart,
    trivial_project,
)
from .lattice import (
    LatticeClass,
    adjacent,
    gauge,
    jump_chain,
    membrane_roundtrip,
    relative_position,
    tree_ball,
    tree_neighbors,
    unit_ball,
)
from .tropcore import INF, TropPoint, min_attained_twice, normalize, tadd, tmul, trop_value
from .troplin import (
    Embedding,
    NotInLinearSpace,
    bergman_contains,
    check_small_circuits,
    local_tls_contains,
    project_pi,
    reconstruct_seminorm,
    section_J,
    tls_contains,
    universal_restriction,
)
from .valfield import FieldSpec, Mat, ValuedScalar, det, rank, solve_in_basis, valuation
from .valmatroid import (
    Matroid,
    ValuatedMatroid,
    check_plucker,
    flats,
    from_matrix,
    initial_matroid,
    restrict,
    underlying_matroid,
)

__version__ = "0.1.0"
