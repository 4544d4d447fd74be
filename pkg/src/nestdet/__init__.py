"""Trek separation, nested covariance determinants and their verification
for linear structural equation models on mixed graphs."""

from .graph import (
    CycleError,
    GraphError,
    GraphParseError,
    MixedGraph,
    SubdivisionMap,
    bidirected_subdivision,
    format_graph,
    graph_sha256,
    is_ancestral_vertex,
    is_globally_identifiable,
    parse_graph,
    relations,
    topological_order,
)
from .poly import Polynomial, Variable, evaluate, format_polynomial, lam, omega, parse_polynomial, sigma
from .symbolic import (
    SymbolicMatrix,
    determinant,
    minor,
    restricted_covariance,
    substitute_sigma,
    symbolic_covariance,
    trek_polynomial,
)
from .treks import (
    FlowNetwork,
    SeparationCertificate,
    Trek,
    TrekSystem,
    build_aux_graph,
    enumerate_trek_systems,
    generic_rank,
    is_restricted_trek_separated,
    min_restricted_cut,
)
from .constraints import (
    ConstraintError,
    ConstraintRecord,
    Det,
    Leaf,
    MinorRef,
    Scalar,
    candidate_pairs,
    expand_nested,
    expr_from_json,
    expr_to_json,
    f_ij,
    parental_matrix,
    theorem_constraint_set,
)
from .verify import (
    FitError,
    ModelWitness,
    SampleSpec,
    Verdict,
    check_swapping,
    fit_parameters,
    membership_check,
    sample_covariance,
    vanishes_numerically,
    vanishes_symbolically,
    verify_factorization,
)

__version__ = "0.1.0"
