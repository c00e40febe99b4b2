"""Hermitian perturbation operators for the two quantizations.

``W_H`` comes from the Hamiltonian in (x, p); ``W_K`` from the constant of
motion in (x, v). Both are built from the compact Weyl-ordered monomials

    W(x p^2)   = x p^2 - i h p
    W(x^2 p^2) = x^2 p^2 - 2 i h x p - h^2 / 2

with ``h`` the commutator scale of the pair (hbar for p, hbar/m0 for v).
The literal ladder-operator transcriptions of the published expansions live
here too; they are diagnostics, never used as ground truth.
"""
import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .errors import SizeError
from .model import derive_constants

CUBIC_CLASSICAL = "eq8b"  # m1 w^2 / 3, as in the classical W_K
CUBIC_OVER_M0 = "eq26"  # m1 w^2 / (3 m0), as printed in the operator W_K
CUBIC_SOURCES = (CUBIC_CLASSICAL, CUBIC_OVER_M0)


class WhichPerturbation(str, enum.Enum):
    HAMILTONIAN_P = "H"
    CONSTANT_OF_MOTION_V = "K"


H = WhichPerturbation.HAMILTONIAN_P
K = WhichPerturbation.CONSTANT_OF_MOTION_V


def weyl_xp2(x, p, hbar_eff):
    fock._same_shape(x, p)
    return x @ p @ p - 1j * hbar_eff * p


def weyl_x2p2(x, p, hbar_eff):
    fock._same_shape(x, p)
    ident = np.eye(x.shape[0])
    return x @ x @ p @ p - 2j * hbar_eff * (x @ p) - 0.5 * hbar_eff**2 * ident


def symmetrization_oracle(factors):
    """Average of the products over all distinct orderings of ``factors``.

    Equal matrices count as one repeated factor, so ``(x, x, p, p)`` gives
    the six-term average rather than 24 with duplicates.
    """
    factors = list(factors)
    if not factors:
        raise SizeError("need at least one factor")
    fock._same_shape(*factors)
    labels = []
    reps = []
    for f in factors:
        for i, r in enumerate(reps):
            if np.array_equal(f, r):
                labels.append(i)
                break
        else:
            labels.append(len(reps))
            reps.append(f)
    orderings = sorted(set(itertools.permutations(labels)))
    total = np.zeros_like(factors[0], dtype=complex)
    for order in orderings:
        total += fock.matmul_chain(*(reps[i] for i in order))
    return total / len(orderings)


def _check_build_dim(N, guard):
    if N < 2 + guard:
        raise SizeError(f"N = {N} must be >= guard + 2 = {guard + 2}")


def W_H_pieces(params, N, guard=fock.DEFAULT_GUARD):
    """Split ``W_H`` into its m1-linear and m1-quadratic parts."""
    _check_build_dim(N, guard)
    m0, m1, w, hbar = params.m0, params.m1, params.omega, params.hbar
    x, p = fock.position_op(params, N), fock.momentum_op(params, N)
    linear = -(m1 / m0**2) * weyl_xp2(x, p, hbar) + (m1 * w**2 / 3.0) * (x @ x @ x)
    quadratic = (3.0 * m1**2 / (2.0 * m0**3)) * weyl_x2p2(x, p, hbar)
    return linear, quadratic


def W_K_pieces(params, N, cubic_source=CUBIC_CLASSICAL, guard=fock.DEFAULT_GUARD):
    _check_build_dim(N, guard)
    if cubic_source not in CUBIC_SOURCES:
        raise ValueError(f"cubic_source must be one of {CUBIC_SOURCES}")
    m0, m1, w, hbar = params.m0, params.m1, params.omega, params.hbar
    x, v = fock.position_op(params, N), fock.velocity_op(params, N)
    cubic = m1 * w**2 / 3.0
    if cubic_source == CUBIC_OVER_M0:
        cubic /= m0
    linear = m1 * weyl_xp2(x, v, hbar / m0) + cubic * (x @ x @ x)
    quadratic = (m1**2 / (2.0 * m0)) * weyl_x2p2(x, v, hbar / m0)
    return linear, quadratic


def build_W_H(params, N, guard=fock.DEFAULT_GUARD):
    linear, quadratic = W_H_pieces(params, N, guard)
    return fock._freeze(linear + quadratic)


def build_W_K(params, N, cubic_source=CUBIC_CLASSICAL, guard=fock.DEFAULT_GUARD):
    linear, quadratic = W_K_pieces(params, N, cubic_source, guard)
    return fock._freeze(linear + quadratic)


def build_W(which, params, N, cubic_source=CUBIC_CLASSICAL, guard=fock.DEFAULT_GUARD):
    if WhichPerturbation(which) is H:
        return build_W_H(params, N, guard)
    return build_W_K(params, N, cubic_source, guard)


# --- literal ladder-operator transcriptions ---------------------------------

def _word(word, a, ad):
    out = np.eye(a.shape[0], dtype=complex)
    for letter in word.split():
        out = out @ (a if letter == "a" else ad)
    return out


def _ladder_sum(terms, N):
    """Sum of signed ladder words, e.g. ``["a a a+", "-a+ a"]``; ``"1/2"`` is half the identity."""
    a = np.asarray(fock.ladder_lower(N))
    ad = a.conj().T
    total = np.zeros((N, N), dtype=complex)
    for term in terms:
        sign = -1.0 if term.startswith("-") else 1.0
        word = term.lstrip("-+ ")
        if word.startswith("1/2"):
            total += sign * 0.5 * np.eye(N)
        else:
            total += sign * _word(word, a, ad)
    return total


ODD_CUBIC_WORDS = ["a a a", "-a a a+", "-a a+ a", "a a+ a+", "a+ a a", "-a+ a a+", "-a+ a+ a", "a+ a+ a+"]
ODD_CUBIC_WORDS_H_PRINTED = ODD_CUBIC_WORDS[:-1] + ["a a a"]
X_CUBED_WORDS = ["a a a", "a a+ a", "a a a+", "a a+ a+", "a+ a a", "a+ a+ a", "a+ a a+", "a+ a+ a+"]
# (a + a+)^2 (a - a+)^2 expanded
QUARTIC_WORDS = [
    "a a a a", "-a a a a+", "-a a a+ a", "a a a+ a+",
    "a a+ a a", "-a a+ a a+", "-a a+ a+ a", "a a+ a+ a+",
    "a+ a a a", "-a+ a a a+", "-a+ a a+ a", "a+ a a+ a+",
    "a+ a+ a a", "-a+ a+ a a+", "-a+ a+ a+ a", "a+ a+ a+ a+",
]
QUARTIC_WORDS_H_PRINTED = [
    "a a a a", "-a a a+ a", "-a a a+ a+", "a+ a a a", "-a+ a a+ a", "-a+ a a a+",
    "a+ a a+ a+", "a a+ a a", "-a a a a+", "-a+ a+ a a+", "-a a a+ a", "-a a+ a a+",
    "a a+ a+ a+", "a+ a+ a a", "-a+ a+ a+ a", "a+ a+ a+ a+",
]
QUARTIC_WORDS_K_PRINTED = [
    "a a a a", "-a a a+ a", "-a a a+ a+", "a+ a a a", "-a+ a a+ a", "-a+ a a a+",
    "a+ a a+ a+", "a a+ a a", "-a a+ a+ a", "-a a a a+", "-a a+ a a+", "a a+ a+ a+",
    "a+ a+ a a", "-a+ a+ a+ a", "-a+ a+ a a+", "a+ a+ a+ a+",
]
XP_WORDS = ["a a", "-a a+", "a+ a", "-a+ a+", "1/2"]
XP_WORDS_K_PRINTED = ["a a", "-a a+", "-a+ a", "a+ a+", "1/2"]

H_FIXES = ("final_cubic_dagger", "odd_kinetic_sign", "quartic_words")
K_FIXES = ("quartic_coefficient", "quartic_words", "quadratic_words")


def build_W_ladder_printed(params, N, which, fixes=(), quartic_coefficient=None,
                           guard=fock.DEFAULT_GUARD):
    """Matrix of the published ladder-operator expansion of ``W_H`` or ``W_K``.

    With ``fixes=()`` the expansion is transcribed literally, misprints
    included. Named fixes (``H_FIXES`` / ``K_FIXES``) switch individual
    suspected misprints to the algebraically derived form.
    ``quartic_coefficient`` overrides the printed ``alpha`` in the K quartic
    bracket (default: literal ``alpha = sqrt(m0 w / hbar)``, or sigma when the
    ``quartic_coefficient`` fix is on).
    """
    _check_build_dim(N, guard)
    which = WhichPerturbation(which)
    fixes = set(fixes)
    allowed = set(H_FIXES if which is H else K_FIXES)
    if not fixes <= allowed:
        raise ValueError(f"unknown fixes {sorted(fixes - allowed)} for {which.value}")
    m0, m1, w, hbar = params.m0, params.m1, params.omega, params.hbar
    c = derive_constants(params)
    cubic = m1 * w**2 / 3.0 * (hbar / (2 * m0 * w)) ** 1.5 * _ladder_sum(X_CUBED_WORDS, N)

    if which is H:
        odd_words = ODD_CUBIC_WORDS if "final_cubic_dagger" in fixes else ODD_CUBIC_WORDS_H_PRINTED
        odd_sign = 1.0 if "odd_kinetic_sign" in fixes else -1.0
        quartic_words = QUARTIC_WORDS if "quartic_words" in fixes else QUARTIC_WORDS_H_PRINTED
        W = odd_sign * (m1 * hbar * w / (2 * m0)) * math.sqrt(hbar / (2 * m0 * w)) * _ladder_sum(odd_words, N)
        W = W + odd_sign * (m1 * hbar / m0**2) * math.sqrt(m0 * hbar * w / 2) * _ladder_sum(["a", "-a+"], N)
        W = W - 3 * m1**2 * hbar**2 / (8 * m0**3) * _ladder_sum(quartic_words, N)
        W = W - 3 * m1**2 * hbar**2 / (2 * m0**3) * _ladder_sum(XP_WORDS, N)
        return W + cubic

    if quartic_coefficient is None:
        quartic_coefficient = c.sigma if "quartic_coefficient" in fixes else c.alpha
    quartic_words = QUARTIC_WORDS if "quartic_words" in fixes else QUARTIC_WORDS_K_PRINTED
    xv_words = XP_WORDS if "quadratic_words" in fixes else XP_WORDS_K_PRINTED
    W = -(hbar / 2) * (m1 / m0) * math.sqrt(hbar * w / (2 * m0)) * _ladder_sum(ODD_CUBIC_WORDS, N)
    W = W - 2 * m1 * c.beta * _ladder_sum(["a", "-a+"], N)
    W = W - quartic_coefficient / 12.0 * _ladder_sum(quartic_words, N)
    W = W - 0.5 * m1**2 * hbar**2 / m0**3 * _ladder_sum(xv_words, N)
    return W + cubic


@dataclass(frozen=True)
class DiscrepancyReport:
    location: str
    printed_form: str
    rebuilt_form: str
    max_deviation: float
    hermiticity_defect: float = 0.0

    def to_dict(self):
        return dict(self.__dict__)


def fit_quartic_coefficient(params, N, fixes=(), guard=fock.DEFAULT_GUARD):
    """Least-squares value of the K quartic-bracket coefficient that best
    reproduces ``build_W_K`` on the trusted block."""
    target = fock.trusted_block(build_W_K(params, N, guard=guard), guard)
    base = fock.trusted_block(
        build_W_ladder_printed(params, N, K, fixes, quartic_coefficient=0.0, guard=guard), guard)
    unit = fock.trusted_block(
        build_W_ladder_printed(params, N, K, fixes, quartic_coefficient=1.0, guard=guard), guard) - base
    denom = np.vdot(unit, unit).real
    if denom == 0.0:
        return 0.0
    return float(np.vdot(unit, target - base).real / denom)


def ladder_discrepancies(params, N=64, guard=fock.DEFAULT_GUARD):
    """Compare every published ladder expansion against the compact Weyl build.

    Deviations are in units of hbar*omega on the trusted block.
    """
    scale = params.energy_scale
    tb = lambda M: fock.trusted_block(M, guard)
    WH = build_W_H(params, N, guard)
    WK = build_W_K(params, N, guard=guard)
    out = []

    def record(location, printed, rebuilt, W_printed, W_ref):
        dev = float(np.max(np.abs(tb(W_printed) - tb(W_ref)))) / scale
        herm = fock.hermiticity_defect(tb(W_printed)) / scale
        out.append(DiscrepancyReport(location, printed, rebuilt, dev, herm))

    variants_H = [
        ((), "H ladder expansion, literal", "W_H from Weyl forms"),
        (("final_cubic_dagger",), "H ladder expansion, last a^3 -> (a+)^3", "W_H from Weyl forms"),
        (("final_cubic_dagger", "odd_kinetic_sign"),
         "H ladder expansion, + sign of x p^2 and p blocks", "W_H from Weyl forms"),
        (H_FIXES, "H ladder expansion, all fixes incl. quartic word list", "W_H from Weyl forms"),
    ]
    for fixes, printed, rebuilt in variants_H:
        record(printed, printed, rebuilt, build_W_ladder_printed(params, N, H, fixes, guard=guard), WH)

    variants_K = [
        ((), "K ladder expansion, literal (alpha/12 with alpha = sqrt(m0 w/hbar))", "W_K from Weyl forms"),
        (("quartic_coefficient",), "K ladder expansion, alpha -> sigma", "W_K from Weyl forms"),
        (("quartic_coefficient", "quartic_words"),
         "K ladder expansion, alpha -> sigma, +a^2 (a+)^2", "W_K from Weyl forms"),
        (K_FIXES, "K ladder expansion, all fixes incl. x v bracket signs", "W_K from Weyl forms"),
    ]
    for fixes, printed, rebuilt in variants_K:
        record(printed, printed, rebuilt, build_W_ladder_printed(params, N, K, fixes, guard=guard), WK)

    record("K compact operator cubic coefficient",
           "m1 w^2 / (3 m0) x^3", "m1 w^2 / 3 x^3",
           build_W_K(params, N, CUBIC_OVER_M0, guard), WK)
    return out
