"""Average-field energy minimization for extended anyons on a 2D grid."""

__version__ = "0.1.0"

from .errors import (
    AvfieldError,
    ConfigurationError,
    DomainError,
    FormatError,
    NumericalConsistencyError,
    NumericalFailureError,
    SolverStalledError,
)
from .grid import GridSpec, WaveFunction, gaussian_state
from .kernels import (
    HARMONIC,
    SmearedCoulomb,
    TrapPotential,
    alpha_of,
    eta0,
    lp_norm_grad_w,
)
from .functional import EnergyBreakdown, FunctionalParams, energy, energy_alt, gradient
from .solver import SolverConfig, SolveResult, minimize, sweep
from .manybody import (
    ManyBodyBreakdown,
    ManyBodyParams,
    mixed_term_crosscheck,
    product_state_energy,
    upper_bound_report,
)
from .geometry import Triangle, circumradius_bounds, counterexample_probe, cyclic_sum, verify_sandwich
from .stateio import load_state, save_state

__all__ = [
    "AvfieldError",
    "ConfigurationError",
    "DomainError",
    "FormatError",
    "NumericalConsistencyError",
    "NumericalFailureError",
    "SolverStalledError",
    "GridSpec",
    "WaveFunction",
    "gaussian_state",
    "HARMONIC",
    "SmearedCoulomb",
    "TrapPotential",
    "alpha_of",
    "eta0",
    "lp_norm_grad_w",
    "EnergyBreakdown",
    "FunctionalParams",
    "energy",
    "energy_alt",
    "gradient",
    "SolverConfig",
    "SolveResult",
    "minimize",
    "sweep",
    "ManyBodyBreakdown",
    "ManyBodyParams",
    "mixed_term_crosscheck",
    "product_state_energy",
    "upper_bound_report",
    "Triangle",
    "circumradius_bounds",
    "counterexample_probe",
    "cyclic_sum",
    "verify_sandwich",
    "load_state",
    "save_state",
    "__version__",
]
