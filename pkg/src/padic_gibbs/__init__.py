"""Exact p-adic Gibbs measures for two-spin models on Cayley trees."""

__version__ = "0.1.0"

from .padic import (
    ConfigurationError,
    ContractionViolationError,
    DomainError,
    IndeterminateValueError,
    NoConvergenceError,
    NormValue,
    PadicError,
    PadicNumber,
    ResourceLimitError,
    arithmetic,
    difference_norm,
    hensel_solve,
    in_exp_domain,
    iterate_contraction,
    padic_exp,
    padic_log,
)
from .tree import Address, TreeSlice, build_slice, default_path_window, direct_successors, distance
from .model import (
    EdgeWeights,
    FiniteVolumeMeasure,
    LambdaSpec,
    SpinConfiguration,
    TransitionMatrix,
    check_compatibility,
    finite_volume_measure,
    hamiltonian,
    marginal_path_measure,
    measure_norm_profile,
    stationary_vector,
    tilted_hamiltonian_domain_check,
    transition_matrix,
)
from .recursion import (
    BoundaryField,
    contraction_ratio_check,
    edge_field_map,
    propagate_inward,
    translation_invariant_solve,
    uniqueness_conditions,
)
from .ising import (
    IsingSpec,
    gibbs_report,
    homogeneous_fixed_point,
    ising_lambda,
    ising_uniqueness_check,
    to_lambda_spec,
)
