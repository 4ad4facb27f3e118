"""Direct integration of ``u'' = u**p - u`` as an independent check on the period.

Integration runs in the offset ``x = u - 1`` with scipy's DOP853 (explicit
Runge-Kutta of order 8 with a 7th-order dense output).  Maxima of ``u`` are
located as downward zero crossings of ``u'`` on the dense output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DegenerateOrbit, StepFailure
from .potential import as_exponent, eval_dV_offset, eval_V_offset, turning_points

RTOL = 1e-13
ATOL = 1e-15
AMPLITUDE_FLOOR = 1e-7


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # columns u, u'
    E0: float
    energy_drift: np.ndarray
    max_energy_drift: float
    dense: object = None  # callable t -> (x, x') from the integrator

    def state_at(self, t: float) -> tuple[float, float]:
        x, v = self.dense(t)
        return 1.0 + float(x), float(v)


def _rhs(p: float):
    def f(_t, y):
        return [y[1], -eval_dV_offset(p, y[0])]

    return f


def _energy(p: float, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    return 0.5 * v * v + np.array([eval_V_offset(p, xi) for xi in x])


def drift_bound(E: float) -> float:
    return 1e-10 * max(E, 1.0)


def integrate(p, E: float, duration: float, rtol: float = RTOL, atol: float = ATOL,
              events=None) -> Trajectory:
    """Trajectory from ``(u_minus(E), 0)`` over ``[0, duration]``.

    Raises :class:`StepFailure` if the energy drift exceeds ``1e-10 max(E, 1)``
    even after one retry at tighter tolerances.
    """
    p = as_exponent(p)
    pair = turning_points(p, E)
    x0 = pair.x_minus
    E0 = eval_V_offset(p, x0)
    bound = drift_bound(E)
    for attempt in range(2):
        sol = solve_ivp(
            _rhs(p), (0.0, duration), [x0, 0.0], method="DOP853",
            rtol=rtol, atol=atol, dense_output=True, events=events,
        )
        if sol.status < 0:
            raise StepFailure(sol.message)
        x, v = sol.y
        drift = _energy(p, x, v) - E0
        worst = float(np.max(np.abs(drift)))
        if worst <= bound:
            break
        rtol, atol = max(rtol / 10, 2.3e-14), atol / 10
    else:
        raise StepFailure(f"energy drift {worst:.3g} exceeds {bound:.3g} (p={p}, E={E})")
    states = np.column_stack([1.0 + x, v])
    traj = Trajectory(sol.t, states, E0, drift, worst, sol.sol)
    traj.events = sol.t_events  # type: ignore[attr-defined]
    return traj


@dataclass(frozen=True)
class EmpiricalPeriod:
    T_measured: float
    n_cycles: int
    per_cycle_spread: float
    maxima: tuple


def _u_maximum(_t, y):
    return y[1]


_u_maximum.direction = -1.0


def measure_period(p, E: float, n_cycles: int = 8) -> EmpiricalPeriod:
    """Mean time between successive maxima of ``u`` over ``n_cycles`` cycles."""
    if n_cycles < 4:
        raise ValueError("need at least 4 cycles")
    p = as_exponent(p)
    pair = turning_points(p, E)
    if pair.half_width < AMPLITUDE_FLOOR:
        raise DegenerateOrbit(f"amplitude {pair.half_width:.3g} below {AMPLITUDE_FLOOR}")
    # the small-oscillation period only sizes the first integration window
    guess = 2.0 * math.pi / math.sqrt(p - 1.0)
    duration = (n_cycles + 1.5) * guess
    while True:
        traj = integrate(p, E, duration, events=_u_maximum)
        maxima = traj.events[0]
        if len(maxima) >= n_cycles + 1:
            break
        duration *= 2.0
    maxima = maxima[: n_cycles + 1]
    cycles = np.diff(maxima)
    return EmpiricalPeriod(
        T_measured=float(np.mean(cycles)),
        n_cycles=n_cycles,
        per_cycle_spread=float(np.max(cycles) - np.min(cycles)),
        maxima=tuple(float(m) for m in maxima),
    )


def return_gap(p, E: float, T: float) -> float:
    """Phase-space distance from the start after time ``T``, relative to the orbit width."""
    p = as_exponent(p)
    traj = integrate(p, E, 1.05 * T)
    x, v = traj.dense(T)
    pair = turning_points(p, E)
    return math.hypot(x - pair.x_minus, v) / (pair.x_plus - pair.x_minus)


def reversal_gap(p, E: float, T: float) -> float:
    """Integrate forward to ``T/2`` then backward to 0; distance to the start, relative to orbit width."""
    p = as_exponent(p)
    pair = turning_points(p, E)
    fwd = solve_ivp(_rhs(p), (0.0, 0.5 * T), [pair.x_minus, 0.0], method="DOP853",
                    rtol=RTOL, atol=ATOL)
    back = solve_ivp(_rhs(p), (0.5 * T, 0.0), fwd.y[:, -1], method="DOP853",
                     rtol=RTOL, atol=ATOL)
    x, v = back.y[:, -1]
    return math.hypot(x - pair.x_minus, v) / (pair.x_plus - pair.x_minus)
