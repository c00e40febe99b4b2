"""Classical dynamics generated by the exact Hamiltonian
``H = m0 p^2 / (2 m(x)^2) + V(x)`` and the conservation of ``K(x, v)``.

H is not separable in (x, p), so a classical RK4 step is used; the
conservation tests quantify its energy drift.
"""
import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StepError
from .model import classical_H_exact, classical_K_exact, mass_at, velocity_from_momentum

CSV_HEADER = ("t", "x", "p", "v", "K", "H")


@dataclass(frozen=True)
class TrajectoryState:
    t: float
    x: float
    p: float
    v: float
    K_value: float
    H_value: float


def hamilton_rhs(params, x, p):
    m = mass_at(params, x)
    dx = params.m0 * p / m**2
    dp = params.m0 * p**2 * params.m1 / m**3 - params.m0 * params.omega**2 * x - params.m1 * params.omega**2 * x**2
    return dx, dp


def rk4_step(params, x, p, dt):
    k1x, k1p = hamilton_rhs(params, x, p)
    k2x, k2p = hamilton_rhs(params, x + 0.5 * dt * k1x, p + 0.5 * dt * k1p)
    k3x, k3p = hamilton_rhs(params, x + 0.5 * dt * k2x, p + 0.5 * dt * k2p)
    k4x, k4p = hamilton_rhs(params, x + dt * k3x, p + dt * k3p)
    x_new = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
    p_new = p + dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
    return x_new, p_new


def period(params):
    """Reference period ``2 pi / omega`` used for step sizing."""
    return 2.0 * math.pi / params.omega


def integrate_arrays(params, x0, p0, dt, steps):
    """RK4 trajectory as arrays ``(t, x, p)`` of length ``steps + 1``.

    ``dt`` may be negative to run backwards in time.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    m0, m1, w2 = params.m0, params.m1, params.omega**2

    # scalar float loop; the numpy-aware hamilton_rhs is ~20x slower per call
    def rhs(x, p):
        m = m0 + m1 * x
        if m <= 0:
            raise DomainError("position-dependent mass is non-positive")
        dx = m0 * p / (m * m)
        return dx, dx * p * m1 / m - m0 * w2 * x - m1 * w2 * x * x

    xs = np.empty(steps + 1)
    ps = np.empty(steps + 1)
    x, p = float(x0), float(p0)
    mass_at(params, x)
    xs[0], ps[0] = x, p
    h2, h6 = 0.5 * dt, dt / 6.0
    for i in range(1, steps + 1):
        try:
            k1x, k1p = rhs(x, p)
            k2x, k2p = rhs(x + h2 * k1x, p + h2 * k1p)
            k3x, k3p = rhs(x + h2 * k2x, p + h2 * k2p)
            k4x, k4p = rhs(x + dt * k3x, p + dt * k3p)
        except DomainError as exc:
            raise DomainError(f"mass reached zero near step {i}") from exc
        x = x + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        p = p + h6 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        if not (math.isfinite(x) and math.isfinite(p)):
            raise StepError(f"non-finite state at step {i}")
        if m0 + m1 * x <= 0:
            raise DomainError(f"mass reached zero at step {i}")
        xs[i], ps[i] = x, p
    return dt * np.arange(steps + 1), xs, ps


def integrate(params, x0, p0, dt, steps):
    """Integrate Hamilton's equations; one :class:`TrajectoryState` per step."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    t, x, p = integrate_arrays(params, x0, p0, dt, steps)
    v = velocity_from_momentum(params, x, p)
    K = classical_K_exact(params, x, v)
    Hv = classical_H_exact(params, x, p)
    return [TrajectoryState(*row) for row in zip(t.tolist(), x.tolist(), p.tolist(),
                                                 np.atleast_1d(v).tolist(), np.atleast_1d(K).tolist(),
                                                 np.atleast_1d(Hv).tolist())]


def relative_K_drift(params, x0, p0, dt, steps):
    """``max_t |K(t) - K(0)| / |K(0)|`` along an RK4 trajectory."""
    _, x, p = integrate_arrays(params, x0, p0, dt, steps)
    K = classical_K_exact(params, x, velocity_from_momentum(params, x, p))
    return float(np.max(np.abs(K - K[0])) / abs(K[0]))


def write_trajectory_csv(states, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for s in states:
        w.writerow([f"{val:.17g}" for val in (s.t, s.x, s.p, s.v, s.K_value, s.H_value)])
