"""Rotationally invariant noncommutative space: exact algebra, composite systems and hydrogen spectra."""

from .algebra import (
    Generator,
    OperatorExpr,
    build_nc_coordinate,
    build_nc_momentum,
    commutator,
    expand_Xr_squared_check,
    jacobi,
    multiply,
    total_angular_momentum,
)
from .composite import (
    ParticleSpec,
    TwoParticleSystem,
    effective_theta_com,
    effective_theta_rel,
    verify_com_rel_algebra,
    verify_momentum_conservation,
)
from .quadrature import (
    GridConfig,
    InsResult,
    SpectralConfig,
    expansion_consistency_check,
    extract_constant,
    grid_oracle,
    ins_fixed_a,
    ins_gaussian_avg,
)
from .second_order import second_order_scaling_check
from .spectra import (
    CorrectionResult,
    PhysicalParams,
    QuantumNumbers,
    delta_E1_closed,
    delta_E1_oracle,
    delta_E_ns_asymptotic,
    hydrogen_radial,
    laguerre,
    oscillator_moments,
    unperturbed_energy,
)

__version__ = "0.1.0"
