"""Bifurcation branches obtained from the period function.

Rescaling the circle problem to ``u'' + u - u**p = 0`` on ``[0, T]`` ties the
parameter to the period through ``T = 2 pi sqrt(lambda / (p-1))``, so the
periodic branch is ``lambda(E) = (p-1) (T(E) / 2 pi)**2``.

A Neumann solution on ``[-pi, pi]`` is ``n`` half-periods of a periodic orbit
laid end to end, giving ``lambda_n(E) = (p-1) (n T(E) / 4 pi)**2`` with onset
``n**2 / 4``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OscPeriodError
from .period import period, period_limit_zero
from .potential import as_exponent


@dataclass(frozen=True)
class BranchPoint:
    E: float
    T: float
    lam: float
    mode: int  # 0: periodic branch; n >= 1: Neumann branch with n half-periods


def _lambda(p: float, T: float, mode: int) -> float:
    if mode == 0:
        return (p - 1.0) * (T / (2.0 * math.pi)) ** 2
    return (p - 1.0) * (mode * T / (4.0 * math.pi)) ** 2


def lambda_periodic(p, E: float) -> BranchPoint:
    p = as_exponent(p)
    T = period(p, E).T
    return BranchPoint(float(E), T, _lambda(p, T, 0), 0)


def lambda_neumann(p, E: float, n: int) -> BranchPoint:
    p = as_exponent(p)
    if n < 1:
        raise ValueError(f"Neumann mode must be >= 1, got {n}")
    T = period(p, E).T
    return BranchPoint(float(E), T, _lambda(p, T, n), n)


def onset(p, mode: int) -> float:
    """Limit of the branch as ``E -> 0``: 1 for the periodic branch, ``n**2/4`` for Neumann."""
    p = as_exponent(p)
    return _lambda(p, period_limit_zero(p), mode)


@dataclass
class Diagram:
    p: float
    points: list
    failures: list = field(default_factory=list)

    def branch(self, mode: int) -> list:
        return [pt for pt in self.points if pt.mode == mode]

    @property
    def modes(self) -> list:
        return sorted({pt.mode for pt in self.points})

    def monotone(self, mode: int) -> bool:
        lam = [pt.lam for pt in self.branch(mode)]
        return all(b > a for a, b in zip(lam, lam[1:]))

    def ordered(self) -> bool:
        """``lambda_n < lambda_{n+1}`` at every sampled energy for the Neumann modes."""
        neumann = [m for m in self.modes if m >= 1]
        for lo, hi in zip(neumann, neumann[1:]):
            for a, b in zip(self.branch(lo), self.branch(hi)):
                if not a.lam < b.lam:
                    return False
        return True


def diagram(p, energies, n_max: int) -> Diagram:
    """Branch points for modes ``0..n_max`` ordered by ``(mode, E)``.

    One period evaluation per energy serves every mode; energies whose period
    fails are listed in ``failures`` and skipped.
    """
    p = as_exponent(p)
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    energies = [float(e) for e in energies]
    periods = []
    failures = []
    for E in energies:
        try:
            periods.append((E, period(p, E).T))
        except OscPeriodError as exc:
            failures.append((E, f"{type(exc).__name__}: {exc}"))
    points = [
        BranchPoint(E, T, _lambda(p, T, mode), mode)
        for mode in range(n_max + 1)
        for E, T in periods
    ]
    return Diagram(p, points, failures)


def extrapolate_onset(branch: list) -> float:
    """Quadratic through the three lowest-energy points, evaluated at ``E = 0``."""
    pts = sorted(branch, key=lambda b: b.E)[:3]
    if len(pts) < 3:
        raise ValueError("need three branch points")
    E = [b.E for b in pts]
    lam = [b.lam for b in pts]
    total = 0.0
    for i in range(3):
        w = 1.0
        for j in range(3):
            if j != i:
                w *= (0.0 - E[j]) / (E[i] - E[j])
        total += w * lam[i]
    return total


def solve_energy(branch: list, lam: float) -> list:
    """Energies where the sampled branch crosses ``lam`` (linear inverse interpolation)."""
    out = []
    for a, b in zip(branch, branch[1:]):
        if (a.lam - lam) * (b.lam - lam) < 0 or b.lam == lam:
            s = (lam - a.lam) / (b.lam - a.lam)
            out.append(a.E + s * (b.E - a.E))
    return out


def energy_grid_for(p, count: int, lo_frac: float = 1e-6, hi_frac: float = 0.999) -> list:
    from .potential import energy_max

    emax = energy_max(p)
    return [float(e) for e in np.geomspace(lo_frac * emax, hi_frac * emax, count)]
