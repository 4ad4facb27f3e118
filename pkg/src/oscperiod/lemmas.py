"""The hyperbolic function family behind the monotonicity proof, and sweeps over its claims.

``f_p(t) = (sinh(p t) - p sinh t) / (4 sinh^3((p-1) t / 2))`` controls the sign of
the derivative of the transformed Chicone quotient.  Its derivative and the
auxiliary functions ``h, H, J, S, T`` reduce, through product-to-sum identities,
to finite sinh/cosh sums in the three frequencies

    w1 = (p-3)/2,   w2 = (p+1)/2,   w3 = (3p-1)/2,

so each one is a :class:`~oscperiod.hyperbolic.HyperbolicSum` and its second
derivative is exact.  With ``s = sinh((p-1) t / 2)`` and
``Q = s (sinh pt - p sinh t)``:

    f'  = -h / (4 s^4)
    H   = s^4 (f' + (p+3)/2 f) = -h/4 + (p+3)/8 Q
    J   = s^4 (f' - (p+3)/2 f) = -h/4 - (p+3)/8 Q
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, NoSignChange
from .hyperbolic import (
    HyperbolicSum,
    cosh_scaled,
    frac,
    sinh_power_scaled,
    sinh_scaled,
)
from .potential import as_exponent

DEFAULT_P_GRID = (1.1, 1.5, 2.0, 2.5, 2.9, 3.0, 3.1, 4.0, 5.0, 7.0, 7.1, 9.0, 12.0, 20.0)
DEFAULT_T_GRID = tuple(float(t) for t in np.geomspace(1e-4, 30.0, 200))

SIGN_TOL = 1e-12
RESIDUAL_TOL = 1e-10
IDENTITY_TOL = 1e-13


@dataclass(frozen=True)
class Frequencies:
    omega1: float
    omega2: float
    omega3: float

    @classmethod
    def of(cls, p) -> "Frequencies":
        p = as_exponent(p)
        return cls((p - 3.0) / 2.0, (p + 1.0) / 2.0, (3.0 * p - 1.0) / 2.0)


class Family:
    """Exact sinh/cosh representations of every auxiliary function at one ``p``."""

    def __init__(self, p: float):
        self.p = p
        P = frac(p)
        w1, w2, w3 = (P - 3) / 2, (P + 1) / 2, (3 * P - 1) / 2
        self.w = (float(w1), float(w2), float(w3))
        self.half = float((P - 1) / 2)  # argument rate of s = sinh((p-1)t/2)
        self.numerator = HyperbolicSum.build(sinh=[(1, P), (-P, 1)])
        self.h = HyperbolicSum.build(
            sinh=[
                ((P - 3) / 4, w3),
                ((3 * P**2 - P) / 4, w1),
                (-(3 * P**2 - 10 * P + 3) / 4, w2),
            ]
        )
        self.Q = HyperbolicSum.build(
            cosh=[(Fraction(1, 2), w3), (-(P + 1) / 2, w2), (P / 2, w1)]
        )
        self.H = self.h.scale(Fraction(-1, 4)) + self.Q.scale((P + 3) / 8)
        self.J = self.h.scale(Fraction(-1, 4)) + self.Q.scale(-(P + 3) / 8)
        self.S = HyperbolicSum.build(
            cosh=[((P + 3) * (P + 1) / 8, w2), (-(P + 3) * (P + 1) / 8, w1)],
            sinh=[(-(3 * P - 1) * (P - 3) / 8, w2), ((3 * P - 1) * (P + 1) / 8, w1)],
        )
        self.T = HyperbolicSum.build(
            cosh=[((P + 1) * (P + 3) / 8, w1), (-(P + 1) * (P + 3) / 8, w2)],
            sinh=[((3 * P - 1) * (P + 1) / 8, w1), (-(P - 3) * (3 * P - 1) / 8, w2)],
        )
        # forcing of the h equation: p(p-1)(3p-1)/2 [(p-3) sinh(w2 t) - (p+1) sinh(w1 t)]
        k = P * (P - 1) * (3 * P - 1) / 2
        self.h_forcing = HyperbolicSum.build(sinh=[(k * (P - 3), w2), (-k * (P + 1), w1)])


@lru_cache(maxsize=256)
def family(p) -> Family:
    return Family(as_exponent(p))


# -- f_p and its derivative ---------------------------------------------------

def _taylor_coeffs(p: float) -> tuple[float, float, float, float]:
    """``f_p(t) = a0 (1 + b2 t^2 + b4 t^4 + b6 t^6 + ...)``."""
    a0 = p * (p + 1.0) / (3.0 * (p - 1.0) ** 2)
    core = (p - 3.0) * (3.0 * p - 1.0)
    b2 = -core / 40.0
    b4 = core * (17.0 * p * p - 46.0 * p + 17.0) / 13440.0
    b6 = -core * (261.0 * p**4 - 1324.0 * p**3 + 2206.0 * p**2 - 1324.0 * p + 261.0) / 4838400.0
    return a0, b2, b4, b6


def series_threshold(p) -> float:
    """``|t|`` below which the even Taylor polynomial of degree 4 is used."""
    p = as_exponent(p)
    b6 = abs(_taylor_coeffs(p)[3])
    limit = 0.02 / (p - 1.0)
    if b6 > 0:
        limit = min(limit, (1e-17 / b6) ** (1.0 / 6.0))
    return limit


def f_p_series(p, t: float) -> float:
    p = as_exponent(p)
    a0, b2, b4, _ = _taylor_coeffs(p)
    t2 = t * t
    return a0 * (1.0 + t2 * (b2 + t2 * b4))


def f_p_closed(p, t: float) -> float:
    """Quotient form; the numerator comes from its exact-coefficient expansion."""
    fam = family(p)
    T = abs(t)
    num = fam.numerator.scaled(T, rate=fam.p)
    den = 4.0 * sinh_power_scaled(fam.half, T, 3)
    return num / den * math.exp(-fam.w[0] * T)


def f_p(p, t: float) -> float:
    """Even, positive; identically 1 for ``p = 3``."""
    p = as_exponent(p)
    t = float(t)
    if abs(t) < series_threshold(p):
        return f_p_series(p, t)
    return f_p_closed(p, t)


def log_f_p(p, t: float) -> float:
    p = as_exponent(p)
    if abs(t) < series_threshold(p):
        return math.log(f_p_series(p, t))
    fam = family(p)
    T = abs(t)
    num = fam.numerator.scaled(T, rate=p)
    den = 4.0 * sinh_power_scaled(fam.half, T, 3)
    return math.log(num / den) - fam.w[0] * T


def f_p_prime(p, t: float) -> float:
    """Odd; ``-h / (4 sinh^4((p-1)t/2))`` away from the origin."""
    p = as_exponent(p)
    t = float(t)
    if abs(t) < series_threshold(p):
        a0, b2, b4, _ = _taylor_coeffs(p)
        return a0 * t * (2.0 * b2 + 4.0 * b4 * t * t)
    fam = family(p)
    T = abs(t)
    w1, _, w3 = fam.w
    hs = fam.h.scaled(T, rate=w3)
    val = -hs / (4.0 * sinh_power_scaled(fam.half, T, 4)) * math.exp(-w1 * T)
    return val if t > 0 else -val


def f_p_prime_direct(p, t: float) -> float:
    """Derivative solved from the differentiated quotient, no product-to-sum rewriting.

    ``4 f' s^4 = p (cosh pt - cosh t) s - (3/2)(p-1) cosh((p-1)t/2) (sinh pt - p sinh t)``.
    Loses ~``1/t^2`` relative accuracy at small ``t``; a cross-check only.
    """
    p = as_exponent(p)
    a = 0.5 * (p - 1.0)
    s = math.sinh(a * t)
    c = math.cosh(a * t)
    num = p * (math.cosh(p * t) - math.cosh(t)) * s - 1.5 * (p - 1.0) * c * (
        math.sinh(p * t) - p * math.sinh(t)
    )
    return num / (4.0 * s**4)


# -- auxiliary functions -------------------------------------------------------

def h_fn(p, t: float) -> float:
    return family(p).h(float(t))


def H_fn(p, t: float) -> float:
    return family(p).H(float(t))


def J_fn(p, t: float) -> float:
    return family(p).J(float(t))


def S_fn(p, t: float) -> float:
    return family(p).S(float(t))


def T_lem(p, t: float) -> float:
    return family(p).T(float(t))


def G_fn(p, t: float) -> float:
    """``(p+3)(p+1) - (3p-1)(p-3) tanh(w2 t)``, with ``1 - tanh`` formed directly."""
    p = as_exponent(p)
    A = (p + 3.0) * (p + 1.0)
    B = (3.0 * p - 1.0) * (p - 3.0)
    y = 0.5 * (p + 1.0) * float(t)
    if y <= 0:
        return A - B * math.tanh(y)
    one_minus_tanh = 2.0 / (math.exp(2.0 * y) + 1.0) if y < 350 else 0.0
    return (A - B) + B * one_minus_tanh


def _G_magnitude(p: float, t: float) -> float:
    A = (p + 3.0) * (p + 1.0)
    B = (3.0 * p - 1.0) * (p - 3.0)
    y = 0.5 * (p + 1.0) * t
    if y <= 0:
        return A + abs(B * math.tanh(y))
    one_minus_tanh = 2.0 / (math.exp(2.0 * y) + 1.0) if y < 350 else 0.0
    return abs(A - B) + abs(B) * one_minus_tanh


def g_zero(p) -> float:
    """The single positive zero of ``G``; exists only for ``p > 7``."""
    p = as_exponent(p)
    if p <= 7:
        raise DomainError(f"G has no positive zero for p = {p} <= 7")
    ratio = (p + 3.0) * (p + 1.0) / ((3.0 * p - 1.0) * (p - 3.0))
    return math.atanh(ratio) / (0.5 * (p + 1.0))


def s_zero(p, tol: float = 1e-12) -> float:
    """The single positive sign change of ``S``; exists only for ``p > 7``."""
    p = as_exponent(p)
    if p <= 7:
        raise DomainError(f"S has no positive zero for p = {p} <= 7")
    S = family(p).S
    lo = 1e-3
    if S.scaled(lo) <= 0:
        raise NoSignChange(f"S not positive near 0 for p = {p}")
    hi = 1.0
    while S.scaled(hi) > 0:
        lo = hi
        hi *= 2.0
        if hi > 1e4:
            raise NoSignChange(f"S stays positive up to t = {hi} for p = {p}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if S.scaled(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- differential identities ---------------------------------------------------

@dataclass(frozen=True)
class IdentityResidual:
    """``lhs - rhs`` of a linear ODE identity, all values times ``exp(-rate |t|)``."""

    t: float
    lhs: float
    rhs: float
    scale: float
    rate: float

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs

    @property
    def relative(self) -> float:
        if self.scale == 0.0:
            return abs(self.residual)
        return abs(self.residual) / self.scale


def _ode_lhs(y: HyperbolicSum, omega: float, t: float, rate: float) -> tuple[float, float]:
    y2 = y.derivative(2)
    lhs = y2.scaled(t, rate) - omega**2 * y.scaled(t, rate)
    mag = max(y2.magnitude(t, rate), omega**2 * y.magnitude(t, rate))
    return lhs, mag


def residual_h_ode(p, t: float) -> IdentityResidual:
    """``h'' - w3^2 h`` against ``p(p-1)(3p-1)/2 [(p-3) sinh(w2 t) - (p+1) sinh(w1 t)]``."""
    fam = family(p)
    w3 = fam.w[2]
    lhs, mag = _ode_lhs(fam.h, w3, t, w3)
    rhs = fam.h_forcing.scaled(t, w3)
    scale = max(mag, fam.h_forcing.magnitude(t, w3))
    return IdentityResidual(t, lhs, rhs, scale, w3)


def residual_H_ode(p, t: float) -> IdentityResidual:
    """``H'' - w3^2 H = p (p-1) S``."""
    fam = family(p)
    w3 = fam.w[2]
    lhs, mag = _ode_lhs(fam.H, w3, t, w3)
    k = fam.p * (fam.p - 1.0)
    rhs = k * fam.S.scaled(t, w3)
    scale = max(mag, k * fam.S.magnitude(t, w3))
    return IdentityResidual(t, lhs, rhs, scale, w3)


def residual_S_ode(p, t: float) -> IdentityResidual:
    """``S'' - w1^2 S = (p-1)/4 cosh(w2 t) G(t)``."""
    fam = family(p)
    p = fam.p
    w1, w2, _ = fam.w
    lhs, mag = _ode_lhs(fam.S, w1, t, w2)
    k = 0.25 * (p - 1.0)
    T = abs(t)
    rhs = k * cosh_scaled(w2, T, w2) * G_fn(p, t)
    scale = max(mag, k * cosh_scaled(w2, T, w2) * _G_magnitude(p, t))
    return IdentityResidual(t, lhs, rhs, scale, w2)


def residual_J_ode(p, t: float) -> IdentityResidual:
    """``J'' - w3^2 J = p (p-1) T``."""
    fam = family(p)
    w3 = fam.w[2]
    lhs, mag = _ode_lhs(fam.J, w3, t, w3)
    k = fam.p * (fam.p - 1.0)
    rhs = k * fam.T.scaled(t, w3)
    scale = max(mag, k * fam.T.magnitude(t, w3))
    return IdentityResidual(t, lhs, rhs, scale, w3)


def residual_T_ode(p, t: float) -> IdentityResidual:
    """``T'' - w1^2 T = -(p-1)/4 cosh(w2 t) [(p+1)(p+3) + (p-3)(3p-1) tanh(w2 t)]``."""
    fam = family(p)
    p = fam.p
    w1, w2, _ = fam.w
    lhs, mag = _ode_lhs(fam.T, w1, t, w2)
    T = abs(t)
    A = (p + 1.0) * (p + 3.0)
    B = (p - 3.0) * (3.0 * p - 1.0)
    bracket = A + B * math.tanh(w2 * t)
    ch = cosh_scaled(w2, T, w2)
    rhs = -0.25 * (p - 1.0) * ch * bracket
    scale = max(mag, 0.25 * (p - 1.0) * ch * (A + abs(B)))
    return IdentityResidual(t, lhs, rhs, scale, w2)


# -- leading small-t terms -----------------------------------------------------

def lead_h(p, t):
    p = as_exponent(p)
    return (p - 3.0) * (3.0 * p - 1.0) * (p - 1.0) ** 2 * p * (p + 1.0) * t**5 / 240.0


def lead_H(p, t):
    p = as_exponent(p)
    return p * (p - 1.0) ** 2 * (p + 1.0) * (p + 3.0) * t**4 / 96.0


def lead_J(p, t):
    return -lead_H(p, t)


def lead_S(p, t):
    p = as_exponent(p)
    return (p + 1.0) * (p + 3.0) * (p - 1.0) * t**2 / 8.0


def lead_T(p, t):
    return -lead_S(p, t)


# -- claim sweeps --------------------------------------------------------------

CLAIMS = ("L1i", "L1ii", "L1iii", "L2", "L3", "F7", "F12", "F16", "G4", "G6", "S1", "S2", "Gcases")


@dataclass
class LemmaReport:
    claim_id: str
    p_grid: list
    t_grid: list
    worst_violation: float
    tolerance: float
    passed: bool
    worst_at: tuple | None = None
    observed: dict = field(default_factory=dict)

    @property
    def pass_(self) -> bool:
        return self.passed


def _relative_to_lead(y: HyperbolicSum, t: float, lead: float) -> float:
    """``y(t) / |lead|`` computed in log space, clipped to avoid overflow."""
    sign, log_y = y.log_abs(t)
    if sign == 0.0:
        return 0.0
    exponent = min(log_y - math.log(abs(lead)), 700.0)
    return sign * math.exp(exponent)


class _Worst:
    def __init__(self):
        self.value = -math.inf
        self.at = None

    def update(self, v, p, t):
        if v > self.value or self.at is None:
            self.value = v
            self.at = (p, t)


def _sign_sweep(ps, ts, fn):
    worst = _Worst()
    for p in ps:
        for t in ts:
            worst.update(fn(p, t), p, t)
    return worst


def lemma_sweep(claim_id: str, p_grid=DEFAULT_P_GRID, t_grid=DEFAULT_T_GRID) -> LemmaReport:
    """Evaluate one claim on every grid point.

    Sign claims report ``worst_violation = max(-margin)`` where the margin is
    the claimed-sign value divided by its leading small-t term; they pass when
    every margin is at least ``1e-12``.  Identity claims report the largest
    relative residual; ``L1i`` the largest ``|f_3 - 1|``.
    """
    if claim_id not in CLAIMS:
        raise ValueError(f"unknown claim {claim_id!r}; expected one of {CLAIMS}")
    ps = [as_exponent(p) for p in p_grid]
    ts = [float(t) for t in t_grid]
    if any(t <= 0 for t in ts):
        raise ValueError("t grid must be positive")
    observed: dict = {}

    if claim_id == "L1i":
        ps = [3.0]
        tol = IDENTITY_TOL
        sweep_t = ts + [-t for t in ts] + [0.0]
        worst = _sign_sweep(ps, sweep_t, lambda p, t: abs(f_p(p, t) - 1.0))
    elif claim_id in ("L1ii", "L1iii"):
        ps = [p for p in ps if (p > 3 if claim_id == "L1ii" else p < 3)]
        expected = 1.0 if claim_id == "L1ii" else -1.0  # sign of h; f' has the opposite sign
        tol = -SIGN_TOL
        worst = _sign_sweep(
            ps, ts,
            lambda p, t: -expected * _relative_to_lead(family(p).h, t, lead_h(p, t)),
        )
    elif claim_id == "L2":
        tol = -SIGN_TOL
        worst = _sign_sweep(ps, ts, lambda p, t: -_relative_to_lead(family(p).H, t, lead_H(p, t)))
    elif claim_id == "L3":
        tol = -SIGN_TOL
        worst = _sign_sweep(ps, ts, lambda p, t: _relative_to_lead(family(p).J, t, lead_J(p, t)))
    elif claim_id in ("F7", "F12", "F16", "G4", "G6"):
        fn = {
            "F7": residual_h_ode,
            "F12": residual_H_ode,
            "F16": residual_S_ode,
            "G4": residual_J_ode,
            "G6": residual_T_ode,
        }[claim_id]
        tol = RESIDUAL_TOL
        worst = _sign_sweep(ps, ts, lambda p, t: fn(p, t).relative)
    elif claim_id == "S1":
        ps = [p for p in ps if p <= 7]
        tol = -SIGN_TOL
        worst = _sign_sweep(ps, ts, lambda p, t: -_relative_to_lead(family(p).S, t, lead_S(p, t)))
        observed["increasing"] = {
            str(p): bool(all(family(p).S.derivative(1).scaled(t) > 0 for t in ts)) for p in ps
        }
    elif claim_id == "S2":
        ps = [p for p in ps if p > 7]
        tol = -SIGN_TOL
        zeros = {p: s_zero(p) for p in ps}

        def s2_margin(p, t):
            S = family(p).S
            expected = 1.0 if t < zeros[p] else -1.0
            return -expected * S.scaled(t) / S.magnitude(t)

        worst = _sign_sweep(ps, ts, s2_margin)
        observed["zeros"] = {str(p): zeros[p] for p in ps}
        observed["sign_runs"] = {str(p): _sign_runs(family(p).S, ts) for p in ps}
    else:  # Gcases
        tol = -SIGN_TOL
        worst = _Worst()
        for p in ps:
            for v, t in _gcase_violations(p, ts):
                worst.update(v, p, t)
        observed["zeros"] = {str(p): g_zero(p) for p in ps if p > 7}

    value = worst.value if worst.at is not None else -math.inf
    return LemmaReport(
        claim_id=claim_id,
        p_grid=ps,
        t_grid=ts,
        worst_violation=value,
        tolerance=tol,
        passed=bool(value <= tol),
        worst_at=worst.at,
        observed=observed,
    )


def _sign_runs(y: HyperbolicSum, ts) -> list:
    """``[[t_start, t_end, sign], ...]`` for the sampled sign pattern of ``y``."""
    runs: list = []
    for t in ts:
        s = 1 if y.scaled(t) > 0 else (-1 if y.scaled(t) < 0 else 0)
        if runs and runs[-1][2] == s:
            runs[-1][1] = t
        else:
            runs.append([t, t, s])
    return runs


def _gcase_violations(p: float, ts):
    """Yield ``(violation, t)`` pairs for the four cases of ``G``'s behavior."""
    g0 = (p + 3.0) * (p + 1.0)
    values = [G_fn(p, t) for t in ts]
    if p == 3.0:
        for t, g in zip(ts, values):
            yield abs(g - 24.0) / g0 - SIGN_TOL, t
        return
    direction = 1.0 if p < 3 else -1.0
    for (t0, a), (t1, b) in zip(zip(ts, values), zip(ts[1:], values[1:])):
        # non-strict: tanh saturates in floating point
        yield -direction * (b - a) / g0 - SIGN_TOL, t1
    if p <= 7:
        for t, g in zip(ts, values):
            yield -g / _G_magnitude(p, t), t
    else:
        t3 = g_zero(p)
        for t, g in zip(ts, values):
            expected = 1.0 if t < t3 else -1.0
            yield -expected * g / _G_magnitude(p, t), t
