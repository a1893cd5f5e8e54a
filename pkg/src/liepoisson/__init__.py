"""Poisson structures on T*G and T*(R^n x G), their reductions, and Wong dynamics."""

__version__ = "0.1.0"

from .algebra import (
    LieAlgebra,
    ad_star,
    bracket_vectors,
    jacobi_defect,
    killing_form,
    load_algebra,
    quadratic_casimir,
)
from .dynamics import (
    Trajectory,
    integrate_wong,
    invariant_report,
    lorentz_field,
    wong_vector_field,
)
from .gauge import (
    CurvatureField,
    GaugeMap,
    VectorPotential,
    connection_eval,
    curvature,
    gauge_transform_curvature,
    gauge_transform_potential,
    potential_from_spec,
)
from .group import (
    GroupElement,
    adjoint_matrix,
    exp,
    identity,
    invariant_derivative,
    renormalize,
    semidirect_multiply,
    tangent_group_multiply,
    zeta_r,
)
from .poisson import (
    BivectorSpec,
    TrivializedCovector,
    bivector_bracket,
    hamiltonian_vector_field,
    jacobiator,
    lie_poisson_bracket,
    tstar_bivector_spec,
    tstar_g_bracket,
)
from .reduction import (
    CartanPoint,
    RootSystemData,
    WongState,
    cartan_gauged_bracket,
    cartan_reduced_bracket,
    coadjoint_orbit_bracket,
    gauged_bracket,
    kernel_rank,
    omega_f_matrix,
    root_system,
    wong_state,
)

__all__ = [
    "LieAlgebra",
    "GroupElement",
    "TrivializedCovector",
    "WongState",
    "CartanPoint",
    "RootSystemData",
    "BivectorSpec",
    "VectorPotential",
    "CurvatureField",
    "GaugeMap",
    "Trajectory",
    "load_algebra",
    "bracket_vectors",
    "ad_star",
    "killing_form",
    "quadratic_casimir",
    "jacobi_defect",
    "exp",
    "identity",
    "adjoint_matrix",
    "semidirect_multiply",
    "tangent_group_multiply",
    "zeta_r",
    "invariant_derivative",
    "renormalize",
    "lie_poisson_bracket",
    "tstar_g_bracket",
    "tstar_bivector_spec",
    "bivector_bracket",
    "hamiltonian_vector_field",
    "jacobiator",
    "curvature",
    "connection_eval",
    "gauge_transform_potential",
    "gauge_transform_curvature",
    "potential_from_spec",
    "omega_f_matrix",
    "kernel_rank",
    "coadjoint_orbit_bracket",
    "cartan_reduced_bracket",
    "gauged_bracket",
    "cartan_gauged_bracket",
    "root_system",
    "wong_state",
    "wong_vector_field",
    "lorentz_field",
    "integrate_wong",
    "invariant_report",
]
