"""Physical parameters and classical energy functions of the oscillator with
linear position-dependent mass ``m(x) = m0 + m1 x``.

All functions accept scalars or numpy arrays for the phase-space arguments.
"""
import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError

HBAR_SI = 1.054571817e-34  # J s


class Units(str, enum.Enum):
    NATURAL = "natural"
    SI = "si"


@dataclass(frozen=True)
class ModelParams:
    """Inputs of the model.

    Parameters
    ----------
    m0 : float
        Mass at the origin (kg in SI, 1 in natural units).
    m1 : float
        Mass gradient dm/dx (kg/m in SI). Any sign.
    omega : float
        Angular frequency sqrt(k/m0) in rad/s.
    hbar : float
        Reduced Planck constant in the chosen unit system.
    units : Units
    """

    m0: float = 1.0
    m1: float = 0.0
    omega: float = 1.0
    hbar: float = 1.0
    units: Units = Units.NATURAL

    def __post_init__(self):
        object.__setattr__(self, "units", Units(self.units))
        for name in ("m0", "m1", "omega", "hbar"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        for name in ("m0", "omega", "hbar"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.units is Units.NATURAL and not (self.m0 == self.omega == self.hbar == 1.0):
            raise DomainError("natural units require m0 = omega = hbar = 1")

    @classmethod
    def si(cls, m0, omega, m1=0.0, hbar=HBAR_SI):
        return cls(m0=m0, m1=m1, omega=omega, hbar=hbar, units=Units.SI)

    @property
    def length_scale(self):
        """Oscillator length sqrt(hbar / (m0 omega))."""
        return math.sqrt(self.hbar / (self.m0 * self.omega))

    @property
    def energy_scale(self):
        return self.hbar * self.omega

    @property
    def m1_dimensionless(self):
        """The gradient expressed as m1 L / m0 with L the oscillator length."""
        return self.m1 * self.length_scale / self.m0

    def with_m1(self, m1):
        return replace(self, m1=m1)

    def with_dimensionless_m1(self, m1_dimless):
        return replace(self, m1=m1_dimless * self.m0 / self.length_scale)

    def natural(self):
        """Equivalent natural-unit parameters (same dimensionless gradient)."""
        return ModelParams(m1=self.m1_dimensionless)


@dataclass(frozen=True)
class DerivedConstants:
    sigma: float
    beta: float
    eta: float
    alpha: float
    k: float


def derive_constants(params):
    """Constants appearing in the closed-form perturbative energies."""
    m0, m1, w, hbar = params.m0, params.m1, params.omega, params.hbar
    return DerivedConstants(
        sigma=3.0 * m1**2 * hbar**2 / (2.0 * m0**3),
        beta=hbar / (2.0 * m0) * math.sqrt(hbar * w / (2.0 * m0)),
        eta=m1 * w**2 / 3.0 * (hbar / (2.0 * m0 * w)) ** 1.5,
        alpha=math.sqrt(m0 * w / hbar),
        k=m0 * w**2,
    )


def mass_at(params, x):
    """Return ``m0 + m1 x``; raise DomainError where it is not positive."""
    m = params.m0 + params.m1 * np.asarray(x, dtype=float)
    if np.any(m <= 0):
        raise DomainError("position-dependent mass is non-positive")
    return m if m.ndim else float(m)


def potential(params, x):
    """Effective potential m0 w^2 x^2 / 2 + m1 w^2 x^3 / 3 (force -kx, x0 = 0)."""
    x = np.asarray(x, dtype=float)
    w2 = params.omega**2
    return 0.5 * params.m0 * w2 * x**2 + params.m1 * w2 / 3.0 * x**3


def velocity_from_momentum(params, x, p):
    return params.m0 * np.asarray(p, dtype=float) / mass_at(params, x) ** 2


def momentum_from_velocity(params, x, v):
    return mass_at(params, x) ** 2 * np.asarray(v, dtype=float) / params.m0


def classical_K_exact(params, x, v):
    m = mass_at(params, x)
    return m**2 * np.asarray(v, dtype=float) ** 2 / (2.0 * params.m0) + potential(params, x)


def classical_H_exact(params, x, p):
    m = mass_at(params, x)
    return params.m0 * np.asarray(p, dtype=float) ** 2 / (2.0 * m**2) + potential(params, x)


def classical_K0(params, x, v):
    x, v = np.asarray(x, dtype=float), np.asarray(v, dtype=float)
    return 0.5 * params.m0 * v**2 + 0.5 * params.m0 * params.omega**2 * x**2


def classical_H0(params, x, p):
    x, p = np.asarray(x, dtype=float), np.asarray(p, dtype=float)
    return p**2 / (2.0 * params.m0) + 0.5 * params.m0 * params.omega**2 * x**2


def classical_W_K(params, x, v):
    m0, m1 = params.m0, params.m1
    x, v = np.asarray(x, dtype=float), np.asarray(v, dtype=float)
    return m1 * x * v**2 + m1**2 / (2.0 * m0) * x**2 * v**2 + m1 * params.omega**2 / 3.0 * x**3


def classical_W_H(params, x, p):
    m0, m1 = params.m0, params.m1
    x, p = np.asarray(x, dtype=float), np.asarray(p, dtype=float)
    kinetic = (-m1 * x / m0 + 3.0 * m1**2 * x**2 / (2.0 * m0**2)) * p**2 / m0
    return kinetic + m1 * params.omega**2 / 3.0 * x**3


def classical_K_expanded(params, x, v):
    return classical_K0(params, x, v) + classical_W_K(params, x, v)


def classical_H_expanded(params, x, p):
    return classical_H0(params, x, p) + classical_W_H(params, x, p)
