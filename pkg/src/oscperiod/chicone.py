"""Chicone's convexity criterion for the period function.

The period increases with energy when ``R(u) = V / V'^2`` is convex on both
sides of the minimum.  Shifting the minimum to 0 and substituting
``u = e^t`` turns ``R'`` into

    C(t) = -(p-1)/(p+1) f_p(t) exp(-(p+3) t / 2),

so convexity is equivalent to ``C`` increasing in ``t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NearCriticalPoint, RepresentationOverflow
from .lemmas import f_p, f_p_prime, family, log_f_p
from .potential import as_exponent, eval_d2V, eval_d3V, eval_dV, eval_V

EXCLUSION = 1e-3
CURV_TOL = 1e-12
CROSSCHECK_TOL = 1e-9
_LOG_MAX = 709.0

CHICONE_P_GRID = (1.1, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 7.0, 9.0, 12.0)


@dataclass(frozen=True)
class ChiconePoint:
    u: float
    ratio: float
    C_u: float
    curv: float

    @property
    def scale(self) -> float:
        """Magnitude against which a small negative ``curv`` is judged."""
        return max(1.0, abs(self.ratio) / (self.u - 1.0) ** 2)


def chicone_curvature(p, u: float, exclusion: float = EXCLUSION) -> ChiconePoint:
    """``V/V'^2`` and its first two derivatives by the quotient rule."""
    p = as_exponent(p)
    u = float(u)
    if u <= 0:
        raise ValueError(f"u must be positive, got {u!r}")
    # grid endpoints 1 -+ exclusion are admissible; rounding puts them a hair inside
    if abs(u - 1.0) < exclusion * (1.0 - 1e-9):
        raise NearCriticalPoint(f"|u - 1| = {abs(u - 1.0):.3g} < {exclusion}")
    V = eval_V(p, u)
    d1 = eval_dV(p, u)
    d2 = eval_d2V(p, u)
    d3 = eval_d3V(p, u)
    ratio = V / (d1 * d1)
    C_u = (d1 * d1 - 2.0 * V * d2) / d1**3
    curv = (-2.0 * V * d3 * d1 - 3.0 * d2 * (d1 * d1 - 2.0 * V * d2)) / d1**4
    return ChiconePoint(u, ratio, C_u, curv)


def u_grid(count: int = 200, lo: float = 1e-4, hi: float = 20.0, exclusion: float = EXCLUSION) -> list:
    """Log-spaced points on ``[lo, 1-exclusion] U [1+exclusion, hi]``."""
    import numpy as np

    half = count // 2
    left = np.geomspace(lo, 1.0 - exclusion, half)
    right = np.geomspace(1.0 + exclusion, hi, count - half)
    return [float(u) for u in np.concatenate([left, right])]


@dataclass(frozen=True)
class CtPoint:
    """``C(t)`` and ``C'(t)`` with their log-magnitudes.

    ``C`` and ``Cprime`` are plain floats whenever representable; the log
    fields are always finite.
    """

    t: float
    C: float
    Cprime: float
    log_abs_C: float
    log_abs_Cprime: float
    sign_Cprime: float


def _ct_logs(p: float, t: float) -> tuple[float, float, float]:
    k = (p - 1.0) / (p + 1.0)
    decay = -0.5 * (p + 3.0) * t
    log_c = math.log(k) + log_f_p(p, t) + decay
    # C' = -k exp(decay) [f' - (p+3)/2 f]; its bracket divided by f
    bracket = f_p_prime(p, t) / f_p(p, t) - 0.5 * (p + 3.0)
    sign = -math.copysign(1.0, bracket) if bracket != 0 else 0.0
    log_cp = log_c + math.log(abs(bracket)) if bracket != 0 else -math.inf
    return log_c, log_cp, sign


def C_of_t(p, t: float) -> CtPoint:
    """Transformed Chicone derivative and its slope.

    Raises :class:`RepresentationOverflow` when ``C`` exceeds the float range
    (large negative ``t``); :func:`C_of_t_log` never overflows.
    """
    p = as_exponent(p)
    t = float(t)
    log_c, log_cp, sign = C_of_t_log(p, t)
    if max(log_c, log_cp) > _LOG_MAX:
        raise RepresentationOverflow(f"C({t}) overflows for p = {p}; use C_of_t_log")
    return CtPoint(t, -math.exp(log_c), sign * math.exp(log_cp), log_c, log_cp, sign)


def C_of_t_log(p, t: float) -> tuple[float, float, float]:
    """``(log|C|, log|C'|, sign C')``; ``C`` itself is always negative."""
    p = as_exponent(p)
    return _ct_logs(p, float(t))


def Cprime_margin(p, t: float) -> float:
    """``C'(t)`` divided by the magnitude of its leading small-``|t|`` term, via the lemma functions.

    For ``t > 0`` the sign of ``C'`` is the sign of ``-J(t)``; for ``t < 0``,
    by evenness of ``f_p``, the sign of ``H(|t|)``.  Both are normalized by
    their leading ``t^4`` coefficient, so a positive result certifies
    ``C' > 0`` away from rounding.
    """
    p = as_exponent(p)
    fam = family(p)
    T = abs(float(t))
    lead = p * (p - 1.0) ** 2 * (p + 1.0) * (p + 3.0) * T**4 / 96.0
    y = fam.J if t > 0 else fam.H
    sign, log_y = y.log_abs(T)
    if sign == 0.0:
        return 0.0
    value = (-sign if t > 0 else sign) * math.exp(min(log_y - math.log(lead), 700.0))
    return value


def crosscheck_C_forms(p, t: float, exclusion: float = EXCLUSION) -> float:
    """Relative gap between ``(W/W'^2)'`` at ``w = e^t - 1`` and :func:`C_of_t`."""
    p = as_exponent(p)
    t = float(t)
    w = math.expm1(t)
    if abs(w) < exclusion * (1.0 - 1e-9):
        raise NearCriticalPoint(f"w = e^t - 1 = {w:.3g} within {exclusion} of the minimum")
    u = 1.0 + w
    d1 = eval_dV(p, u)
    direct = (d1 * d1 - 2.0 * eval_V(p, u) * eval_d2V(p, u)) / d1**3
    log_c, _, _ = C_of_t_log(p, t)
    transformed = -math.exp(log_c)
    return abs(direct - transformed) / abs(transformed)
