"""Period function ``T(E)`` of the oscillator.

With ``u' ** 2 / 2 + V(u) = E`` the time for one closed orbit is

    T(E) = 2 * integral_{u-}^{u+} du / sqrt(2 (E - V(u))).

The substitution ``u = m + r sin(theta)`` (``m``, ``r`` the midpoint and
half-width of ``[u-, u+]``) removes both inverse-square-root endpoint
singularities: ``E - V`` has simple zeros at the turning points, so the
transformed integrand ``sqrt(2) r cos(theta) / sqrt(E - V)`` is smooth on
``[-pi/2, pi/2]`` and Gauss-Legendre converges spectrally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .errors import EnergyOutOfRange, OscPeriodError, QuadratureNoConvergence
from .potential import TurningPair, as_exponent, eval_dV_offset, turning_points

MIN_ORDER = 16
MAX_ORDER = 4096
REL_TOL = 1e-11


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    nodes, weights = roots_legendre(n)
    return nodes, weights


def _potential_drop(p: float, a: np.ndarray, d: np.ndarray, sign: int) -> np.ndarray:
    """``|V(a) - V(a + sign*d)|`` for ``d >= 0`` without subtracting nearly equal values."""
    if sign > 0:
        # a = u-, b = u- + d lies inside the well: V(a) - V(b)
        b = a + d
        rise = a ** (p + 1.0) * np.expm1((p + 1.0) * np.log1p(d / a)) / (p + 1.0)
        return -(rise - 0.5 * d * (a + b))
    # a = u+, b = u+ - d: V(a) - V(b)
    b = a - d
    drop = b ** (p + 1.0) * np.expm1((p + 1.0) * np.log1p(d / b)) / (p + 1.0)
    return drop - 0.5 * d * (a + b)


def period_integrand(p, pair: TurningPair, theta) -> np.ndarray:
    """Transformed integrand on ``(-pi/2, pi/2)``; integrates to ``T``."""
    p = as_exponent(p)
    theta = np.asarray(theta, dtype=float)
    r = pair.half_width
    s = np.sin(theta)
    c = np.cos(theta)
    out = np.empty_like(theta)
    upper = theta >= 0
    lower = ~upper
    if np.any(upper):
        su, cu = s[upper], c[upper]
        d = r * cu * cu / (1.0 + su)  # u+ - u
        drop = _potential_drop(p, np.full_like(d, pair.u_plus), d, -1)
        out[upper] = math.sqrt(2.0) * r * cu / np.sqrt(drop)
    if np.any(lower):
        sl, cl = s[lower], c[lower]
        d = r * cl * cl / (1.0 - sl)  # u - u-
        drop = _potential_drop(p, np.full_like(d, pair.u_minus), d, +1)
        out[lower] = math.sqrt(2.0) * r * cl / np.sqrt(drop)
    return out


def endpoint_integrand(p, pair: TurningPair) -> tuple[float, float]:
    """Limits of :func:`period_integrand` at ``theta = -pi/2`` and ``+pi/2``.

    Near a turning point ``E - V ~ |V'(u_pm)| r (1 -+ sin theta)``, which gives
    ``2 sqrt(r / |V'(u_pm)|)``.
    """
    p = as_exponent(p)
    r = pair.half_width
    lo = 2.0 * math.sqrt(r / abs(eval_dV_offset(p, pair.x_minus)))
    hi = 2.0 * math.sqrt(r / abs(eval_dV_offset(p, pair.x_plus)))
    return lo, hi


def quadrature(p, pair: TurningPair, order: int) -> float:
    """Fixed-order Gauss-Legendre estimate of the period."""
    nodes, weights = _gauss_legendre(order)
    half = 0.5 * math.pi
    return half * float(np.dot(weights, period_integrand(p, pair, half * nodes)))


@dataclass(frozen=True)
class PeriodSample:
    E: float
    turning: TurningPair
    T: float
    est_error: float
    order: int


def period(p, E: float, rel_tol: float = REL_TOL, max_order: int = MAX_ORDER) -> PeriodSample:
    """Period at energy ``E`` by Gauss-Legendre with order doubling.

    Doubling starts at 16 nodes and stops once two successive estimates agree
    to ``rel_tol``; the last difference is reported as ``est_error``.
    """
    p = as_exponent(p)
    pair = turning_points(p, E)
    order = MIN_ORDER
    prev = quadrature(p, pair, order)
    history = [(order, prev)]
    while order < max_order:
        order *= 2
        cur = quadrature(p, pair, order)
        history.append((order, cur))
        delta = abs(cur - prev)
        if delta <= rel_tol * abs(cur):
            return PeriodSample(float(E), pair, cur, delta, order)
        prev = cur
    raise QuadratureNoConvergence(
        f"period quadrature did not converge for p={p}, E={E}", history
    )


def period_limit_zero(p) -> float:
    """Small-oscillation period ``2 pi / sqrt(p - 1)``."""
    p = as_exponent(p)
    return 2.0 * math.pi / math.sqrt(p - 1.0)


@dataclass
class PeriodScan:
    p: float
    samples: list
    monotone: bool
    margins: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return bool(self.failures)

    @property
    def worst_margin(self) -> float:
        # smallest T[i+1] - T[i] - (err[i] + err[i+1]); +inf with fewer than two samples
        return min(self.margins) if self.margins else math.inf


def period_scan(p, energies, rel_tol: float = REL_TOL) -> PeriodScan:
    """Periods on an increasing energy grid with a strict monotonicity verdict.

    A step counts as increasing only if ``T[i+1] - T[i]`` exceeds the sum of
    both error estimates.  Failed samples mark the scan as failed and force
    ``monotone = False``.
    """
    p = as_exponent(p)
    energies = [float(e) for e in energies]
    if any(b <= a for a, b in zip(energies, energies[1:])):
        raise ValueError("energy grid must be strictly increasing")
    samples = []
    failures = []
    for E in energies:
        try:
            samples.append(period(p, E, rel_tol))
        except EnergyOutOfRange:
            raise
        except OscPeriodError as exc:
            failures.append((E, f"{type(exc).__name__}: {exc}"))
    margins = [
        (b.T - a.T) - (a.est_error + b.est_error) for a, b in zip(samples, samples[1:])
    ]
    monotone = not failures and all(m > 0 for m in margins)
    return PeriodScan(p, samples, monotone, margins, failures)


def energy_grid(p, lo: float, hi: float, count: int, spacing: str = "log") -> list:
    """Energies from ``lo`` to ``hi`` inclusive, linearly or log spaced."""
    if count < 1:
        raise ValueError("count must be positive")
    if count == 1:
        return [float(lo)]
    if spacing == "log":
        return [float(e) for e in np.geomspace(lo, hi, count)]
    if spacing == "linear":
        return [float(e) for e in np.linspace(lo, hi, count)]
    raise ValueError(f"unknown spacing {spacing!r}")
