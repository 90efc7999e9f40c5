"""Conformal duality between flat and cosmological oscillator detectors.

Geometry of the clock map, its symplectic and Bogoliubov shadows, regulated
Wightman kernels, deterministic adaptive quadrature, and the leading-order
entanglement-harvesting pipeline with its flat/cosmology duality check.
"""

from .geometry import (
    ConformalTakagiMap,
    FrwSpacetime,
    StaticTrajectory,
    SwitchingFunction,
    cos_squared_switching,
    gaussian_switching,
    proper_distance,
    separation,
    tabulated_switching,
    transform_switching,
)
from .gaussian import (
    SUITE_THRESHOLDS,
    BogoliubovPair,
    SymplecticMap,
    free_particle_matrix,
    heisenberg_q_relation_residual,
    mode_ode_residual,
    run_identity_suite,
    sym_rotation,
    sym_shear_scale,
    takagi_cross_identity_residual,
    takagi_free_particle_residual,
    transported_mode,
    vacuum_bogoliubov,
)
from .field import (
    WightmanKernel,
    mode_integrand_static,
    wightman_flat,
    wightman_flat_sep,
    wightman_frw,
    wightman_frw_sep,
)
from .quadrature import (
    IntegralResult,
    NumericalHardError,
    QuadratureConfig,
    adaptive_1d,
    default_epsilon_sequence,
    extrapolate_epsilon,
    fourier_oracle_L,
    integrate_ordered,
    integrate_square,
)
from .harvesting import (
    DetectorSpec,
    DualCheckReport,
    HarvestReport,
    HarvestScenario,
    MatrixElements,
    assemble_rho,
    compute_elements,
    compute_L,
    compute_M,
    compute_N,
    duality_backbone_residual,
    dualize,
    harvest,
    negativity_leading,
    negativity_pt_exact,
    run_dual_check,
)

__version__ = "0.1.0"

__all__ = [
    "SUITE_THRESHOLDS",
    "ConformalTakagiMap",
    "FrwSpacetime",
    "StaticTrajectory",
    "SwitchingFunction",
    "cos_squared_switching",
    "gaussian_switching",
    "proper_distance",
    "separation",
    "tabulated_switching",
    "transform_switching",
    "BogoliubovPair",
    "SymplecticMap",
    "free_particle_matrix",
    "heisenberg_q_relation_residual",
    "mode_ode_residual",
    "run_identity_suite",
    "sym_rotation",
    "sym_shear_scale",
    "takagi_cross_identity_residual",
    "takagi_free_particle_residual",
    "transported_mode",
    "vacuum_bogoliubov",
    "WightmanKernel",
    "mode_integrand_static",
    "wightman_flat",
    "wightman_flat_sep",
    "wightman_frw",
    "wightman_frw_sep",
    "IntegralResult",
    "NumericalHardError",
    "QuadratureConfig",
    "adaptive_1d",
    "default_epsilon_sequence",
    "extrapolate_epsilon",
    "fourier_oracle_L",
    "integrate_ordered",
    "integrate_square",
    "DetectorSpec",
    "DualCheckReport",
    "HarvestReport",
    "HarvestScenario",
    "MatrixElements",
    "assemble_rho",
    "compute_elements",
    "compute_L",
    "compute_M",
    "compute_N",
    "duality_backbone_residual",
    "dualize",
    "harvest",
    "negativity_leading",
    "negativity_pt_exact",
    "run_dual_check",
    "__version__",
]
