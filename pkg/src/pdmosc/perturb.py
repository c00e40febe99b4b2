"""Second-order Rayleigh-Schroedinger energies, numeric and closed form.

The numeric route sums matrix elements of ``W_H`` / ``W_K`` in the truncated
Fock basis. The closed-form route evaluates the published formulas exactly
as printed; alternative readings of their doubtful coefficients are encoded
as :class:`E2Template` values so an adjudication run can select one.
"""
import enum
from dataclasses import dataclass

import numpy as np

from . import fock
from .errors import NotHermitian, TruncationError
from .model import derive_constants
from .quantize import CUBIC_CLASSICAL, H, K, WhichPerturbation, build_W

DEFAULT_N = 64
BAND = fock.MAX_MONOMIAL_DEGREE


class Source(str, enum.Enum):
    NUMERIC = "numeric"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class PerturbativeEnergy:
    n: int
    e0: float
    e1: float
    e2: float
    total: float
    which: WhichPerturbation
    source: Source


def e0(params, n):
    if n < 0:
        raise ValueError("level index must be non-negative")
    return params.hbar * params.omega * (n + 0.5)


def _last_trusted(W, guard):
    return W.shape[0] - 1 - guard


def first_order_numeric(W, n, guard=fock.DEFAULT_GUARD):
    """``<n|W|n>``; the diagonal must be real."""
    if not 0 <= n <= _last_trusted(W, guard):
        raise TruncationError(f"level {n} outside trusted block of N={W.shape[0]}, guard={guard}")
    value = W[n, n]
    if abs(value.imag) > fock.MATRIX_TOL * max(np.abs(W).max(), np.finfo(float).tiny):
        raise NotHermitian(f"diagonal element {n} has imaginary part {value.imag!r}")
    return float(value.real)


def second_order_numeric(W, params, n, guard=fock.DEFAULT_GUARD):
    """``sum_{m != n} |W[m, n]|^2 / (E0_n - E0_m)`` over the full column."""
    if n < 0 or n + BAND > _last_trusted(W, guard):
        raise TruncationError(
            f"level {n} needs index {n + BAND} inside trusted block of N={W.shape[0]}, guard={guard}")
    col = np.abs(np.asarray(W)[:, n]) ** 2
    m = np.arange(W.shape[0])
    mask = m != n
    return float(np.sum(col[mask] / (params.hbar * params.omega * (n - m[mask]))))


def second_order_terms(W, params, n):
    """Per-``m`` contributions to the second-order sum (zero at ``m == n``)."""
    col = np.abs(np.asarray(W)[:, n]) ** 2
    m = np.arange(W.shape[0])
    out = np.zeros(W.shape[0])
    mask = m != n
    out[mask] = col[mask] / (params.hbar * params.omega * (n - m[mask]))
    return out


# --- closed forms as printed ------------------------------------------------

def _first_order_poly(n):
    return (2 * n**2 + 2 * n - 1) / 4 + 0.5


def closed_form_E1(which, params, n):
    sigma = derive_constants(params).sigma
    if WhichPerturbation(which) is H:
        return sigma * _first_order_poly(n)
    return sigma / 3 * _first_order_poly(n)


@dataclass(frozen=True)
class E2Template:
    """One reading of the printed second-order formula

        -(1/hw) {(eta + s1 m1 beta)^2 (3n^2+3n+2) + (3 eta + s2 m1 beta)^2 P(n)
                 + (sigma/d)^2 (4n^3+6n^2+14n+6)}

    with ``P(n) = 3n^3+3n+1`` if ``cubic`` else ``3n^2+3n+1``.
    """

    s1: int
    s2: int
    cubic: bool
    sigma_divisor: int

    def label(self):
        sg = lambda s: "+" if s > 0 else "-"
        poly = "3n^3+3n+1" if self.cubic else "3n^2+3n+1"
        return (f"(eta{sg(self.s1)}m1*beta)^2(3n^2+3n+2) + (3eta{sg(self.s2)}m1*beta)^2({poly})"
                f" + (sigma/{self.sigma_divisor})^2(4n^3+6n^2+14n+6)")

    def evaluate(self, params, n):
        c = derive_constants(params)
        m1 = params.m1
        p2 = 3 * n**3 + 3 * n + 1 if self.cubic else 3 * n**2 + 3 * n + 1
        braces = ((c.eta + self.s1 * m1 * c.beta) ** 2 * (3 * n**2 + 3 * n + 2)
                  + (3 * c.eta + self.s2 * m1 * c.beta) ** 2 * p2
                  + (c.sigma / self.sigma_divisor) ** 2 * (4 * n**3 + 6 * n**2 + 14 * n + 6))
        return -braces / (params.hbar * params.omega)


PRINTED_E2 = {
    H: E2Template(s1=-1, s2=-1, cubic=True, sigma_divisor=4),
    K: E2Template(s1=-1, s2=+1, cubic=False, sigma_divisor=12),
}


def all_e2_templates():
    return [E2Template(s1, s2, cubic, d)
            for s1 in (-1, 1) for s2 in (-1, 1) for cubic in (True, False) for d in (4, 12)]


def closed_form_E2(which, params, n, template=None):
    """Printed second-order energy; pass an adjudicated ``template`` to override."""
    template = template or PRINTED_E2[WhichPerturbation(which)]
    return template.evaluate(params, n)


def delta_E_printed(params, n):
    """The printed closed form of ``E_H,n - E_K,n``."""
    c = derive_constants(params)
    hw = params.hbar * params.omega
    return (2 * c.sigma / 3 * ((2 * n**2 + 2 * n - 1) / 4 + 0.5)
            + 4 * params.m1 * c.eta * c.beta / hw * (6 * n**2 + 6 * n + 1)
            - c.sigma**2 / (18 * hw) * (4 * n**3 + 6 * n**2 + 14 * n + 6))


# --- assembled energies -------------------------------------------------------

def numeric_levels(which, params, n_max, N=DEFAULT_N, guard=fock.DEFAULT_GUARD,
                   cubic_source=CUBIC_CLASSICAL):
    """``(e1, e2)`` arrays for levels ``0..n_max`` from one matrix build."""
    W = build_W(which, params, N, cubic_source, guard)
    e1 = np.array([first_order_numeric(W, n, guard) for n in range(n_max + 1)])
    e2 = np.array([second_order_numeric(W, params, n, guard) for n in range(n_max + 1)])
    return e1, e2


def total_energy(which, params, n, source=Source.NUMERIC, N=DEFAULT_N, guard=fock.DEFAULT_GUARD,
                 cubic_source=CUBIC_CLASSICAL, template=None):
    which, source = WhichPerturbation(which), Source(source)
    base = e0(params, n)
    if source is Source.NUMERIC:
        W = build_W(which, params, N, cubic_source, guard)
        e1 = first_order_numeric(W, n, guard)
        e2 = second_order_numeric(W, params, n, guard)
    else:
        e1 = closed_form_E1(which, params, n)
        e2 = closed_form_E2(which, params, n, template)
    return PerturbativeEnergy(n, base, e1, e2, base + e1 + e2, which, source)


def delta_E(params, n, source=Source.NUMERIC, **kwargs):
    """``E_H,n - E_K,n`` to second order along one route."""
    return (total_energy(H, params, n, source, **kwargs).total
            - total_energy(K, params, n, source, **kwargs).total)
