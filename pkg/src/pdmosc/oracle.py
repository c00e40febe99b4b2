"""Brute-force checks: exact diagonalization, truncation convergence,
lambda-scaling extraction of perturbation orders, and the adjudication of
the printed closed-form energies.
"""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg

from . import fock, perturb
from .errors import FitError, NotConverged, NotHermitian
from .model import ModelParams, Units, derive_constants
from .perturb import PRINTED_E2, E2Template, all_e2_templates
from .quantize import (CUBIC_CLASSICAL, H, K, WhichPerturbation, build_W, fit_quartic_coefficient,
                       ladder_discrepancies)

HERMITIAN_TOL = 1e-10
RESIDUAL_TOL = 1e-9
CONVERGENCE_TOL = 1e-10
DEFAULT_LAMBDA_GRID = (0.1, 0.2, 0.3, 0.4, 0.5)
DEFAULT_DIMS = (40, 56, 64)
FIT_TOL = 1e-8


# --- eigensolvers --------------------------------------------------------------

def jacobi_eigh(A, tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi eigensolver for a real symmetric matrix.

    Returns ``(w, V)`` with ascending ``w`` and orthonormal columns ``V``.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(np.abs(A).max(), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= np.finfo(float).eps * 1e-3 * scale:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * ap - s * aq, s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * ap - s * aq, s * ap + c * aq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vp - s * vq, s * vp + c * vq
    else:
        raise NotConverged("Jacobi sweeps exhausted", off / scale)
    w = np.diag(A).copy()
    order = np.argsort(w)
    return w[order], V[:, order]


def residual_norms(M, w, V):
    return np.linalg.norm(M @ V - V * w, axis=0)


def eigen_spectrum(M, vectors=False, method="lapack"):
    """Sorted real spectrum of a Hermitian matrix.

    The Hermiticity defect is measured relative to the largest entry and
    must not exceed ``HERMITIAN_TOL``; the input is then symmetrized.
    Every eigenpair is checked against ``||Mv - wv|| <= RESIDUAL_TOL ||M||``.
    """
    M = np.asarray(M)
    size = np.abs(M).max() if M.size else 0.0
    if fock.hermiticity_defect(M) > HERMITIAN_TOL * size:
        raise NotHermitian(f"Hermiticity defect {fock.hermiticity_defect(M):.3e} exceeds tolerance")
    M = 0.5 * (M + M.conj().T)
    if method == "jacobi":
        if fock.max_imag(M) > HERMITIAN_TOL * size:
            raise ValueError("jacobi method requires a real symmetric matrix")
        w, V = jacobi_eigh(M.real)
    elif method == "lapack":
        w, V = scipy.linalg.eigh(M)
    else:
        raise ValueError(f"unknown method {method!r}")
    res = residual_norms(M, w, V)
    norm = np.linalg.norm(M, 2) if M.size else 0.0
    if np.any(res > RESIDUAL_TOL * max(norm, np.finfo(float).tiny)):
        raise NotConverged("eigenpair residual above contract", float(res.max()))
    return (w, V) if vectors else w


def full_matrix(which, params, N, guard=fock.DEFAULT_GUARD, cubic_source=CUBIC_CLASSICAL, lam=1.0):
    """Trusted block of ``H0 + lam W`` built at dimension ``N``.

    Products of truncated ladder matrices are exact away from the corner, so
    this block is the projection of the untruncated operator onto the first
    ``N - guard`` oscillator states.
    """
    M = fock.h0_matrix(params, N) + lam * build_W(which, params, N, cubic_source, guard)
    return fock.trusted_block(M, guard)


# --- convergence -----------------------------------------------------------------

def converged_level(params, which, n, dims=DEFAULT_DIMS, guard=fock.DEFAULT_GUARD,
                    cubic_source=CUBIC_CLASSICAL, tol=CONVERGENCE_TOL):
    """Level ``n`` of ``H0 + W`` at the largest dimension in ``dims``.

    Returns ``(energy, estimate)`` with ``estimate = |E(N_max) - E(N_prev)|``;
    raises NotConverged when ``estimate > tol * hbar * omega``.
    """
    dims = list(dims)
    if len(dims) < 2 or any(b <= a for a, b in zip(dims, dims[1:])):
        raise ValueError("dims must be at least two increasing sizes")
    if dims[0] < n + guard + 1:
        raise ValueError(f"smallest dimension {dims[0]} too small for level {n}")
    energies = [eigen_spectrum(full_matrix(which, params, N, guard, cubic_source))[n] for N in dims]
    estimate = abs(energies[-1] - energies[-2])
    if estimate > tol * params.energy_scale:
        raise NotConverged(f"level {n} moved by {estimate:.3e} between N={dims[-2]} and N={dims[-1]}",
                           estimate)
    return float(energies[-1]), float(estimate)


def convergence_estimates(params, which, n, dims, guard=fock.DEFAULT_GUARD,
                          cubic_source=CUBIC_CLASSICAL):
    """``|E(N_i) - E(N_{i-1})|`` for successive entries of ``dims``."""
    e = [eigen_spectrum(full_matrix(which, params, N, guard, cubic_source))[n] for N in dims]
    return [abs(b - a) for a, b in zip(e, e[1:])]


# --- lambda scaling --------------------------------------------------------------

@dataclass(frozen=True)
class OrderFit:
    e1: float
    e2: float
    residual: float


def extract_pt_orders(W, params, n, lambda_grid=DEFAULT_LAMBDA_GRID, tol=FIT_TOL,
                      guard=fock.DEFAULT_GUARD):
    """Recover first- and second-order energies of level ``n`` from exact spectra.

    ``H0 + lam W`` is diagonalized on the mirrored grid ``+-lambda_grid`` and at
    ``lam = 0``. The odd part ``(E(l) - E(-l)) / 2`` is fitted by
    ``e1 l + c3 l^3 + c5 l^5`` and the even part ``(E(l) + E(-l)) / 2 - E(0)``
    by ``e2 l^2 + c4 l^4 + c6 l^6``. ``c3..c6`` are nuisance terms.
    Energies are in units of ``hbar * omega`` inside the fit.
    """
    lams = np.asarray(lambda_grid, dtype=float)
    if lams.size < 5 or np.any(lams <= 0) or np.any(lams > 1):
        raise ValueError("lambda_grid needs at least 5 values in (0, 1]")
    hw = params.energy_scale
    H0 = fock.trusted_block(np.asarray(fock.h0_matrix(params, W.shape[0])), guard) / hw
    Wd = fock.trusted_block(np.asarray(W), guard) / hw
    e_zero = eigen_spectrum(H0)[n]
    plus = np.array([eigen_spectrum(H0 + lam * Wd)[n] for lam in lams])
    minus = np.array([eigen_spectrum(H0 - lam * Wd)[n] for lam in lams])
    odd = 0.5 * (plus - minus)
    even = 0.5 * (plus + minus) - e_zero
    A_odd = np.vstack([lams, lams**3, lams**5]).T
    A_even = np.vstack([lams**2, lams**4, lams**6]).T
    c_odd, *_ = np.linalg.lstsq(A_odd, odd, rcond=None)
    c_even, *_ = np.linalg.lstsq(A_even, even, rcond=None)
    residual = float(max(np.abs(A_odd @ c_odd - odd).max(), np.abs(A_even @ c_even - even).max()))
    if residual > tol:
        raise FitError(f"lambda fit residual {residual:.3e} exceeds {tol:.1e}")
    return OrderFit(float(c_odd[0]) * hw, float(c_even[0]) * hw, residual * hw)


# --- adjudication ----------------------------------------------------------------

@dataclass
class LevelRecord:
    n: int
    e_numeric_pt: float
    e_closed_form_pt: float
    e_exact_diag: float
    residual_norm: float
    e1_numeric: float
    e2_numeric: float
    e1_closed_form: float
    e2_closed_form: float
    converged: bool


@dataclass
class SpectrumReport:
    params: ModelParams
    which: WhichPerturbation
    levels: list
    truncation_dims: list

    def to_dict(self):
        d = asdict(self)
        d["params"] = _params_dict(self.params)
        d["which"] = self.which.value
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(params=_params_from_dict(d["params"]), which=WhichPerturbation(d["which"]),
                   levels=[LevelRecord(**lv) for lv in d["levels"]],
                   truncation_dims=list(d["truncation_dims"]))


def _params_dict(p):
    return {"m0": p.m0, "m1": p.m1, "omega": p.omega, "hbar": p.hbar, "units": p.units.value}


def _params_from_dict(d):
    return ModelParams(m0=d["m0"], m1=d["m1"], omega=d["omega"], hbar=d["hbar"], units=Units(d["units"]))


def spectrum_report(params, which, n_max, N=perturb.DEFAULT_N, guard=fock.DEFAULT_GUARD,
                    dims=None, cubic_source=CUBIC_CLASSICAL, templates=None):
    """Numeric PT, printed closed form and exact diagonalization for ``n <= n_max``."""
    which = WhichPerturbation(which)
    dims = list(dims) if dims else [max(N - 16, n_max + guard + 1), N]
    if dims[-1] != N:
        dims.append(N)
    hw = params.energy_scale
    template = (templates or {}).get(which)
    e1, e2 = perturb.numeric_levels(which, params, n_max, N, guard, cubic_source)
    M = full_matrix(which, params, N, guard, cubic_source)
    w, V = eigen_spectrum(M / hw, vectors=True)
    res = residual_norms(np.asarray(M) / hw, w, V)
    prev = eigen_spectrum(full_matrix(which, params, dims[-2], guard, cubic_source) / hw)
    levels = []
    for n in range(n_max + 1):
        base = perturb.e0(params, n)
        c1 = perturb.closed_form_E1(which, params, n)
        c2 = perturb.closed_form_E2(which, params, n, template)
        levels.append(LevelRecord(
            n=n, e_numeric_pt=base + e1[n] + e2[n], e_closed_form_pt=base + c1 + c2,
            e_exact_diag=float(w[n] * hw), residual_norm=float(res[n]),
            e1_numeric=float(e1[n]), e2_numeric=float(e2[n]), e1_closed_form=c1, e2_closed_form=c2,
            converged=bool(abs(w[n] - prev[n]) <= CONVERGENCE_TOL)))
    return SpectrumReport(params, which, levels, dims)


@dataclass
class Verdict:
    question: str
    printed: str
    supported: list
    verdict: str
    note: str = ""


@dataclass
class Adjudication:
    params: ModelParams
    n_max: int
    reports: dict
    e2_matches: dict
    corrected_templates: dict
    verdicts: list
    first_order_max_deviation: dict
    delta_formula_max_deviation: float
    ladder: list
    quartic_coefficient_fit: dict
    lambda_fits: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "params": _params_dict(self.params),
            "n_max": self.n_max,
            "reports": {k.value: r.to_dict() for k, r in self.reports.items()},
            "e2_matches": {k.value: v for k, v in self.e2_matches.items()},
            "corrected_templates": {k.value: asdict(t) if t else None
                                    for k, t in self.corrected_templates.items()},
            "verdicts": [asdict(v) for v in self.verdicts],
            "first_order_max_deviation": {k.value: v for k, v in self.first_order_max_deviation.items()},
            "delta_formula_max_deviation": self.delta_formula_max_deviation,
            "ladder": [d.to_dict() for d in self.ladder],
            "quartic_coefficient_fit": self.quartic_coefficient_fit,
            "lambda_fits": {k.value: v for k, v in self.lambda_fits.items()},
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _match_templates(params, e2_numeric, rel_tol=1e-9):
    """Every E2 reading that reproduces the numeric second-order energies."""
    scale = max(np.abs(e2_numeric).max(), np.finfo(float).tiny)
    out = []
    for t in all_e2_templates():
        vals = np.array([t.evaluate(params, n) for n in range(len(e2_numeric))])
        if np.abs(vals - e2_numeric).max() <= rel_tol * scale:
            out.append(t)
    return out


def _pick(matches, printed):
    """Prefer the printed choice of each ambiguous slot."""
    if not matches:
        return None
    return min(matches, key=lambda t: sum(getattr(t, f) != getattr(printed, f)
                                          for f in ("s1", "s2", "cubic", "sigma_divisor")))


def _slot_verdict(question, printed_value, supported_values, note=""):
    supported_values = sorted(set(supported_values), key=str)
    if not supported_values:
        verdict = "no printed reading matches"
    elif len(supported_values) > 1:
        verdict = "undetermined"
    elif supported_values[0] == printed_value:
        verdict = "printed confirmed"
    else:
        verdict = "misprint"
    return Verdict(question, str(printed_value), [str(v) for v in supported_values], verdict, note)


def _sign(s):
    return "+" if s > 0 else "-"


def adjudicate(params, n_max=6, N=perturb.DEFAULT_N, guard=fock.DEFAULT_GUARD,
               lambda_grid=DEFAULT_LAMBDA_GRID, cubic_source=CUBIC_CLASSICAL, n_fit_max=4):
    """Compare every printed energy formula with the numeric perturbation series."""
    reports, matches, corrected, fo_dev, fits = {}, {}, {}, {}, {}
    verdicts = []
    c = derive_constants(params)
    vanish = abs(3 * c.eta - params.m1 * c.beta) <= 1e-12 * max(abs(3 * c.eta), abs(params.m1 * c.beta),
                                                               np.finfo(float).tiny)
    for which in (H, K):
        W = build_W(which, params, N, cubic_source, guard)
        fit_rows = []
        for n in range(min(n_fit_max, n_max) + 1):
            f = extract_pt_orders(W, params, n, lambda_grid, guard=guard)
            fit_rows.append({"n": n, "e1_fit": f.e1, "e2_fit": f.e2, "fit_residual": f.residual})
        fits[which] = fit_rows
        report = spectrum_report(params, which, n_max, N, guard, cubic_source=cubic_source)
        reports[which] = report
        e1 = np.array([lv.e1_numeric for lv in report.levels])
        e2 = np.array([lv.e2_numeric for lv in report.levels])
        c1 = np.array([lv.e1_closed_form for lv in report.levels])
        fo_dev[which] = float(np.abs(e1 - c1).max()) / params.energy_scale
        printed = PRINTED_E2[which]
        if params.m1 == 0:
            ok = all_e2_templates()
        else:
            ok = _match_templates(params, e2)
        matches[which] = [t.label() for t in ok]
        corrected[which] = _pick(ok, printed)
        tag = which.value
        verdicts.append(_slot_verdict(
            f"E_{tag}^(2): sign of m1*beta in (eta +- m1*beta)^2", _sign(printed.s1),
            [_sign(t.s1) for t in ok]))
        verdicts.append(_slot_verdict(
            f"E_{tag}^(2): sign of m1*beta in (3eta +- m1*beta)^2", _sign(printed.s2),
            [_sign(t.s2) for t in ok]))
        verdicts.append(_slot_verdict(
            f"E_{tag}^(2): 3n^3 vs 3n^2 in the (3eta +- m1*beta)^2 polynomial",
            "3n^3" if printed.cubic else "3n^2", ["3n^3" if t.cubic else "3n^2" for t in ok],
            note=("3*eta == m1*beta identically, so (3eta - m1*beta)^2 vanishes and the polynomial "
                  "is invisible" if vanish and any(t.s2 < 0 for t in ok) else "")))
        verdicts.append(_slot_verdict(
            f"E_{tag}^(2): sigma divisor", f"sigma/{printed.sigma_divisor}",
            [f"sigma/{t.sigma_divisor}" for t in ok]))
        fo_ok = fo_dev[which] <= 1e-10
        verdicts.append(Verdict(
            f"E_{tag}^(1): first-order closed form incl. the +1/2 in braces",
            "sigma{(2n^2+2n-1)/4 + 1/2}" + ("" if which is H else " / 3"),
            ["printed"] if fo_ok else [], "printed confirmed" if fo_ok else "misprint",
            f"max |numeric - printed| = {fo_dev[which]:.3e} hbar*omega"))

    hw = params.energy_scale
    dev = 0.0
    for n in range(n_max + 1):
        printed_diff = (perturb.closed_form_E1(H, params, n) + perturb.closed_form_E2(H, params, n)
                        - perturb.closed_form_E1(K, params, n) - perturb.closed_form_E2(K, params, n))
        dev = max(dev, abs(perturb.delta_E_printed(params, n) - printed_diff) / hw)
    delta_scale = max(abs(perturb.delta_E_printed(params, n)) for n in range(n_max + 1)) / hw
    verdicts.append(Verdict(
        "printed Delta E_n vs difference of the printed E_H,n and E_K,n",
        "(2sigma/3)(...) + (4 m1 eta beta/hw)(6n^2+6n+1) - (sigma^2/18hw)(...)",
        [], "consistent" if dev <= 1e-10 * max(delta_scale, 1e-300) else "inconsistent",
        f"max deviation {dev:.3e} hbar*omega over n <= {n_max}"))
    numeric_delta = np.array([lh.e_numeric_pt - lk.e_numeric_pt
                              for lh, lk in zip(reports[H].levels, reports[K].levels)])
    printed_delta = np.array([perturb.delta_E_printed(params, n) for n in range(n_max + 1)])
    ddev = float(np.abs(numeric_delta - printed_delta).max()) / hw
    dscale = max(float(np.abs(numeric_delta).max()) / hw, np.finfo(float).tiny)
    verdicts.append(Verdict(
        "printed Delta E_n vs numeric E_H,n - E_K,n",
        "(2sigma/3)(...) + (4 m1 eta beta/hw)(6n^2+6n+1) - (sigma^2/18hw)(...)",
        [], "printed confirmed" if ddev <= 1e-9 * dscale or ddev == 0 else "misprint",
        f"max deviation {ddev:.3e} hbar*omega over n <= {n_max}"))

    ladder = ladder_discrepancies(params, N, guard) if params.m1 != 0 else []
    qfit = {
        "sigma": c.sigma,
        "alpha_literal": c.alpha,
        "fit_with_printed_words": fit_quartic_coefficient(params, N, (), guard),
        "fit_with_corrected_words": fit_quartic_coefficient(params, N, ("quartic_words", "quadratic_words"),
                                                            guard),
    }
    return Adjudication(params, n_max, reports, matches, corrected, verdicts, fo_dev, dev, ladder, qfit, fits)


def spectrum_gaps_ok(params, which, N=perturb.DEFAULT_N, guard=fock.DEFAULT_GUARD, n_max=6,
                     cubic_source=CUBIC_CLASSICAL):
    """Adjacent low levels of ``H0 + W`` stay at least ``0.9 hbar omega`` apart."""
    w = eigen_spectrum(full_matrix(which, params, N, guard, cubic_source)) / params.energy_scale
    return bool(np.all(np.diff(w[: n_max + 2]) >= 0.9))
