"""The potential of the oscillator ``u'' + u - u**p = 0`` and its turning points.

``V(u) = u**(p+1)/(p+1) - u**2/2 - (1/(p+1) - 1/2)`` has its minimum ``V(1) = 0``
and a local maximum ``V(0) = E_max = (p-1)/(2(p+1))``.  Closed orbits exist for
``0 < E < E_max``.

Near ``u = 1`` every quantity is evaluated in the offset ``x = u - 1`` so that
small energies keep full relative precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, EnergyOutOfRange, NoConvergence

# |u - 1| below which V is summed as a power series in the offset
_SERIES_RADIUS = 0.5
_SERIES_TERMS = 200


@dataclass(frozen=True)
class Exponent:
    """Nonlinearity exponent ``p``; must exceed 1."""

    p: float

    def __post_init__(self):
        p = self.p
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise DomainError(f"exponent must be a real number, got {p!r}")
        if not math.isfinite(p) or p <= 1:
            raise DomainError(f"exponent must satisfy p > 1, got {p!r}")

    def __float__(self):
        return float(self.p)


def as_exponent(p) -> float:
    """Validate ``p`` and return it as a float."""
    if isinstance(p, Exponent):
        return float(p.p)
    return float(Exponent(p).p)


def _is_integer(p: float) -> bool:
    return float(p).is_integer()


def energy_max(p) -> float:
    """Height of the well, ``(p-1)/(2(p+1))``."""
    p = as_exponent(p)
    return (p - 1.0) / (2.0 * (p + 1.0))


def _check_u(p: float, u: float) -> None:
    if u < 0 and not _is_integer(p):
        raise DomainError(f"u = {u!r} < 0 with non-integer p = {p!r}")


def _offset_series(p: float, x: float) -> float:
    # V(1+x) = (p-1)/2 x^2 + sum_{k>=3} binom(p+1, k)/(p+1) x^k
    total = 0.5 * (p - 1.0) * x * x
    c = 0.5 * p  # binom(p+1, 2)/(p+1)
    xk = x * x
    for k in range(3, _SERIES_TERMS):
        c *= (p + 2.0 - k) / k
        xk *= x
        term = c * xk
        total += term
        if c == 0.0 or abs(term) <= 1e-18 * abs(total):
            break
    return total


def _far_V(p: float, u: float) -> float:
    # V = (p-1)/(p+1) [u^2 expm1((p-1) log u)/(p-1) - (u^2-1)/2]; keeps p near 1 accurate
    if u <= 0.0:
        return u ** (p + 1.0) / (p + 1.0) - 0.5 * u * u - (1.0 / (p + 1.0) - 0.5)
    em = math.expm1((p - 1.0) * math.log(u)) / (p - 1.0)
    return (p - 1.0) / (p + 1.0) * (u * u * em - 0.5 * (u - 1.0) * (u + 1.0))


def eval_V_offset(p, x: float) -> float:
    """``V(1 + x)``, accurate to full relative precision for small ``x``."""
    p = as_exponent(p)
    if abs(x) <= _SERIES_RADIUS:
        return _offset_series(p, x)
    return eval_V(p, 1.0 + x)


def eval_V(p, u: float) -> float:
    p = as_exponent(p)
    _check_u(p, u)
    if abs(u - 1.0) <= _SERIES_RADIUS:
        return _offset_series(p, u - 1.0)
    return _far_V(p, u)


def eval_dV(p, u: float) -> float:
    """``V'(u) = u**p - u``."""
    p = as_exponent(p)
    _check_u(p, u)
    if u > 0:
        return u * math.expm1((p - 1.0) * math.log(u))
    return u ** p - u


def eval_dV_offset(p, x: float) -> float:
    """``V'(1 + x)`` without cancellation near ``x = 0``."""
    p = as_exponent(p)
    if x <= -1.0:
        return eval_dV(p, 1.0 + x)
    return (1.0 + x) * math.expm1((p - 1.0) * math.log1p(x))


def eval_d2V(p, u: float) -> float:
    """``V''(u) = p u**(p-1) - 1``."""
    p = as_exponent(p)
    _check_u(p, u)
    if u > 0:
        return p * math.expm1((p - 1.0) * math.log(u)) + (p - 1.0)
    return p * u ** (p - 1.0) - 1.0


def eval_d3V(p, u: float) -> float:
    """``V'''(u) = p (p-1) u**(p-2)``; undefined at ``u = 0`` when ``p < 2``."""
    p = as_exponent(p)
    _check_u(p, u)
    if u == 0.0:
        if p < 2:
            raise DomainError(f"V''' diverges at u = 0 for p = {p!r} < 2")
        return 2.0 if p == 2 else 0.0
    return p * (p - 1.0) * u ** (p - 2.0)


def eval_W(p, w: float) -> float:
    """Shifted potential ``W(w) = V(w + 1)``, minimum 0 at ``w = 0``."""
    p = as_exponent(p)
    if w < -1.0:
        raise DomainError(f"W is defined for w >= -1, got {w!r}")
    if abs(w) <= _SERIES_RADIUS:
        return _offset_series(p, w)
    return _far_V(p, 1.0 + w)


@dataclass(frozen=True)
class TurningPair:
    """Orbit endpoints ``0 < u_minus < 1 < u_plus``.

    ``x_minus``/``x_plus`` are the same points as offsets from 1; they carry
    the full precision when the orbit is small.
    """

    u_minus: float
    u_plus: float
    x_minus: float
    x_plus: float

    @property
    def half_width(self) -> float:
        return 0.5 * (self.x_plus - self.x_minus)

    @property
    def center_offset(self) -> float:
        return 0.5 * (self.x_plus + self.x_minus)


def check_energy(p: float, E: float) -> float:
    E = float(E)
    emax = energy_max(p)
    if not (0.0 < E < emax):
        raise EnergyOutOfRange(f"E = {E!r} outside (0, {emax!r}) for p = {p!r}")
    return E


def _solve_offset(p: float, E: float, lo: float, hi: float) -> float:
    """Root of ``V(1+x) = E`` on a bracket where ``V - E`` changes sign."""
    g_lo = eval_V_offset(p, lo) - E
    g_hi = eval_V_offset(p, hi) - E
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if g_lo * g_hi > 0:
        raise NoConvergence(f"no sign change on [{lo}, {hi}] for E = {E}")
    # bisection to 1e-8, then safeguarded Newton
    for _ in range(200):
        if hi - lo <= 1e-8 * max(1.0, abs(lo), abs(hi)) and hi - lo <= 0.25 * max(abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        g_mid = eval_V_offset(p, mid) - E
        if g_mid == 0.0:
            return mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    x = 0.5 * (lo + hi)
    for _ in range(60):
        g = eval_V_offset(p, x) - E
        dg = eval_dV_offset(p, x)
        if dg == 0.0:
            break
        step = g / dg
        x_new = x - step
        if not lo <= x_new <= hi:
            x_new = 0.5 * (lo + hi)
        g_new = eval_V_offset(p, x_new) - E
        if g_new == 0.0:
            return x_new
        if (g_new > 0) == (g_lo > 0):
            lo = x_new
        else:
            hi = x_new
        if abs(x_new - x) <= 1e-15 * abs(x_new):
            x = x_new
            break
        x = x_new
    return x


def turning_points(p, E: float) -> TurningPair:
    """Solve ``V(u) = E`` on both sides of the minimum.

    Raises :class:`EnergyOutOfRange` unless ``0 < E < E_max(p)``.
    """
    p = as_exponent(p)
    E = check_energy(p, E)
    x_minus = _solve_offset(p, E, -1.0, 0.0)
    hi = 1.0
    while eval_V_offset(p, hi) <= E:
        hi *= 2.0
        if hi > 1e6:
            raise NoConvergence(f"outer turning point not bracketed for E = {E}")
    x_plus = _solve_offset(p, E, 0.0, hi)
    for x in (x_minus, x_plus):
        if abs(eval_V_offset(p, x) - E) > 1e-13 * E:
            raise NoConvergence(f"turning point residual too large at x = {x!r}")
    if not (-1.0 < x_minus < 0.0 < x_plus):
        raise NoConvergence(f"turning points out of order: {x_minus!r}, {x_plus!r}")
    return TurningPair(1.0 + x_minus, 1.0 + x_plus, x_minus, x_plus)
