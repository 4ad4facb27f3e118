"""Finite sums of ``sinh(w t)`` and ``cosh(w t)`` evaluated without cancellation or overflow.

Every auxiliary function of the monotonicity proof is such a sum with
coefficients and frequencies that are rational in ``p``.  Two regimes:

* ``|t| * max|w| <= SERIES_SWITCH``: Taylor series whose coefficients
  ``sum_k c_k w_k**n / n!`` are formed in exact rational arithmetic (a float
  ``p`` is an exact binary fraction).  Low-order moments that vanish
  identically therefore vanish exactly, so functions like ``h ~ t**5`` keep
  full relative accuracy at small ``t``.
* otherwise: exponentials scaled by ``exp(-rate |t|)`` so that values up to
  ``exp(900)`` stay representable as ``mantissa * exp(rate |t|)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

SERIES_SWITCH = 2.0
SERIES_TERMS = 48


def frac(x) -> Fraction:
    """Exact rational value of an int, float or Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


@dataclass(frozen=True)
class HyperbolicSum:
    """``sum c * sinh(w t) + sum d * cosh(w t)`` with exact rational data."""

    sinh_terms: tuple = ()
    cosh_terms: tuple = ()

    @classmethod
    def build(cls, sinh=(), cosh=()):
        merged = []
        for terms in (sinh, cosh):
            acc: dict = {}
            for c, w in terms:
                c, w = frac(c), frac(w)
                acc[w] = acc.get(w, Fraction(0)) + c
            merged.append(tuple((c, w) for w, c in sorted(acc.items()) if c != 0))
        return cls(merged[0], merged[1])

    def __add__(self, other):
        return HyperbolicSum.build(
            self.sinh_terms + other.sinh_terms, self.cosh_terms + other.cosh_terms
        )

    def scale(self, k) -> "HyperbolicSum":
        k = frac(k)
        return HyperbolicSum.build(
            [(k * c, w) for c, w in self.sinh_terms],
            [(k * c, w) for c, w in self.cosh_terms],
        )

    def derivative(self, order: int = 1) -> "HyperbolicSum":
        return _derivative(self, order)

    @cached_property
    def rate(self) -> float:
        """Largest ``|w|``; the exponential growth rate of the sum."""
        ws = [abs(w) for _, w in self.sinh_terms + self.cosh_terms]
        return float(max(ws)) if ws else 0.0

    @cached_property
    def taylor(self) -> tuple:
        """Float Taylor coefficients ``a_n`` with ``f(t) = sum a_n t**n``."""
        coeffs = []
        fact = 1
        for n in range(SERIES_TERMS):
            if n:
                fact *= n
            terms = self.sinh_terms if n % 2 else self.cosh_terms
            m = sum((c * w ** n for c, w in terms), Fraction(0))
            coeffs.append(float(m / fact))
        return tuple(coeffs)

    @cached_property
    def _exp_terms(self) -> tuple:
        """``(e, w)`` pairs with ``value = sum e * exp(w t)``; coefficients merged exactly."""
        acc: dict = {}
        for c, w in self.sinh_terms:
            acc[w] = acc.get(w, Fraction(0)) + c / 2
            acc[-w] = acc.get(-w, Fraction(0)) - c / 2
        for d, w in self.cosh_terms:
            acc[w] = acc.get(w, Fraction(0)) + d / 2
            acc[-w] = acc.get(-w, Fraction(0)) + d / 2
        return tuple((float(e), float(w)) for w, e in sorted(acc.items()) if e != 0)

    def growth(self, t: float) -> float:
        """Exponential rate of the dominant surviving term in the direction of ``t``."""
        sgn = 1.0 if t >= 0 else -1.0
        rates = [sgn * w for _, w in self._exp_terms]
        return max(rates) if rates else 0.0

    def magnitude(self, t: float, rate: float | None = None) -> float:
        """Rounding scale of :meth:`scaled`: the sum of absolute summands it adds up."""
        rate = self.rate if rate is None else rate
        T = abs(t)
        if T * self.rate <= SERIES_SWITCH:
            acc = 0.0
            for a in reversed(self.taylor):
                acc = acc * T + abs(a)
            return acc * math.exp(-rate * T)
        return sum(abs(e) * math.exp(w * t - rate * T) for e, w in self._exp_terms)

    def _series(self, t: float) -> float:
        acc = 0.0
        for a in reversed(self.taylor):
            acc = acc * t + a
        return acc

    def scaled(self, t: float, rate: float | None = None) -> float:
        """Value times ``exp(-rate |t|)``; ``rate`` defaults to :attr:`rate`."""
        rate = self.rate if rate is None else rate
        T = abs(t)
        if T * self.rate <= SERIES_SWITCH:
            return self._series(t) * math.exp(-rate * T)
        return math.fsum(e * math.exp(w * t - rate * T) for e, w in self._exp_terms)

    def __call__(self, t: float) -> float:
        """Plain float value; raises OverflowError beyond the float range."""
        if abs(t) * self.rate <= SERIES_SWITCH:
            return self._series(t)
        g = self.growth(t)
        s = self.scaled(t, rate=g)
        if s == 0.0:
            return 0.0
        return s * math.exp(g * abs(t))

    def log_abs(self, t: float) -> tuple[float, float]:
        """``(sign, log|value|)``; ``(0.0, -inf)`` for an exact zero."""
        if abs(t) * self.rate <= SERIES_SWITCH:
            v = self._series(t)
            if v == 0.0:
                return 0.0, -math.inf
            return math.copysign(1.0, v), math.log(abs(v))
        g = self.growth(t)
        s = self.scaled(t, rate=g)
        if s == 0.0:
            return 0.0, -math.inf
        return math.copysign(1.0, s), math.log(abs(s)) + g * abs(t)


@lru_cache(maxsize=1024)
def _derivative(y: HyperbolicSum, order: int) -> HyperbolicSum:
    for _ in range(order):
        y = HyperbolicSum.build(
            [(c * w, w) for c, w in y.cosh_terms],
            [(c * w, w) for c, w in y.sinh_terms],
        )
    return y


def sinh_scaled(w: float, T: float, rate: float) -> float:
    """``sinh(w T) * exp(-rate T)`` for ``T >= 0``."""
    x = w * T
    if abs(x) < 1.0:
        return math.sinh(x) * math.exp(-rate * T)
    return 0.5 * (math.exp(x - rate * T) - math.exp(-x - rate * T))


def cosh_scaled(w: float, T: float, rate: float) -> float:
    """``cosh(w T) * exp(-rate T)`` for ``T >= 0``."""
    x = w * T
    return 0.5 * (math.exp(x - rate * T) + math.exp(-x - rate * T))


def sinh_power_scaled(a: float, t: float, k: int) -> float:
    """``sinh(a |t|)**k * exp(-k a |t|)`` for ``a > 0``; exact near 0 via expm1."""
    T = abs(t)
    return (-0.5 * math.expm1(-2.0 * a * T)) ** k
