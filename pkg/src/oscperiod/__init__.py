"""Period function of ``u'' + u - u**p = 0``: quadrature, convexity checks,
hyperbolic identity sweeps, direct simulation and bifurcation branches."""
from .errors import (
    DegenerateOrbit,
    DomainError,
    EnergyOutOfRange,
    NearCriticalPoint,
    NoConvergence,
    NoSignChange,
    OscPeriodError,
    QuadratureNoConvergence,
    RepresentationOverflow,
    StepFailure,
)
from .potential import (
    Exponent,
    TurningPair,
    energy_max,
    eval_d2V,
    eval_d3V,
    eval_dV,
    eval_V,
    eval_W,
    turning_points,
)
from .period import PeriodSample, PeriodScan, period, period_limit_zero, period_scan

__version__ = "0.1.0"

__all__ = [
    "DegenerateOrbit", "DomainError", "EnergyOutOfRange", "NearCriticalPoint",
    "NoConvergence", "NoSignChange", "OscPeriodError", "QuadratureNoConvergence",
    "RepresentationOverflow", "StepFailure",
    "Exponent", "TurningPair", "energy_max", "eval_V", "eval_dV", "eval_d2V",
    "eval_d3V", "eval_W", "turning_points",
    "PeriodSample", "PeriodScan", "period", "period_limit_zero", "period_scan",
    "__version__",
]
