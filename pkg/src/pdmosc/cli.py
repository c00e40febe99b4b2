"""Command-line front end.

Subcommands: spectrum, delta, verify, classical, constants.

Exit codes:
  0  success
  2  invalid configuration
  3  an eigenvalue failed the truncation-convergence check
  4  internal failure (an invariant check in ``verify`` failed, or an unexpected error)
"""
import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import classical, fock, oracle, perturb, quantize
from .errors import DomainError, NotConverged, NotFound, PdmoscError, SizeError
from .model import (HBAR_SI, ModelParams, Units, classical_K_exact, classical_K_expanded,
                    derive_constants)
from .quantize import CUBIC_CLASSICAL, CUBIC_SOURCES, H, K

log = logging.getLogger("pdmosc")

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_INTERNAL = 0, 2, 3, 4
FIGURE_M0 = 1e-17  # kg
FIGURE_OMEGA = 1e10  # "10 GHz"
DEFAULT_M1 = 0.05
SPECTRUM_COLUMNS = ("n", "e0", "eH1", "eH2", "eH_total", "eK1", "eK2", "eK_total", "eH_exact", "eK_exact")
DELTA_COLUMNS = ("n", "deltaE_numeric", "deltaE_closed_form")
TOLERANCE_FRACTION = 0.01


@dataclass
class RunConfig:
    subcommand: str
    params: ModelParams
    N: int = perturb.DEFAULT_N
    guard: int = fock.DEFAULT_GUARD
    n_max: int = 6
    lambda_grid: tuple = oracle.DEFAULT_LAMBDA_GRID
    format: str = "csv"
    out: str = None
    omega_convention: str = "rad_s"
    m1_mode: str = "dimensionless"
    cubic_source: str = CUBIC_CLASSICAL
    m1_given: bool = True
    source: str = "numeric"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        fock.FockBasisSpec(self.N, self.guard)
        if self.N < self.guard + 2:
            raise SizeError(f"N must be >= guard + 2")
        if self.n_max < 0:
            raise DomainError("n-max must be non-negative")
        if self.n_max + perturb.BAND > self.N - 1 - self.guard:
            raise SizeError(f"n-max {self.n_max} needs N >= {self.n_max + perturb.BAND + self.guard + 1}")
        lams = np.asarray(self.lambda_grid)
        if lams.size < 5 or np.any(lams <= 0) or np.any(lams > 1):
            raise DomainError("lambda grid needs at least 5 values in (0, 1]")
        if self.cubic_source not in CUBIC_SOURCES:
            raise DomainError(f"w-cubic-source must be one of {CUBIC_SOURCES}")


def fmt(x):
    return f"{x:.17g}"


# --- m1 selection -----------------------------------------------------------------

def _within_tolerance(params_nat, n_max, N, guard, cubic_source):
    for which in (H, K):
        e1, e2 = perturb.numeric_levels(which, params_nat, n_max, N, guard, cubic_source)
        e0 = np.arange(n_max + 1) + 0.5
        if np.any(np.abs(e1 + e2) > TOLERANCE_FRACTION * e0):
            return False
    return True


def max_m1_for_tolerance(params, n_max, N=perturb.DEFAULT_N, guard=fock.DEFAULT_GUARD,
                         cubic_source=CUBIC_CLASSICAL):
    """Largest gradient (3 significant digits) keeping ``|E1 + E2| <= 1% E0``
    for every level ``n <= n_max`` in both quantizations.

    The search runs on the dimensionless gradient ``m1 L / m0`` and returns
    ``m1`` in the units of ``params``.
    """
    base = params.natural()
    if cubic_source != CUBIC_CLASSICAL and params.units is Units.SI:
        # the 1/m0 cubic variant is not dimensionless; search in the given units
        ok = lambda d: _within_tolerance_units(params.with_dimensionless_m1(d), n_max, N, guard, cubic_source)
    else:
        ok = lambda d: _within_tolerance(base.with_m1(d), n_max, N, guard, cubic_source)
    lo, hi = 0.0, 1e-3
    while ok(hi):
        lo, hi = hi, 2 * hi
        if hi > 1e3:
            raise NotFound("criterion holds for every gradient tried")
    while (hi - lo) > 5e-5 * hi:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        raise NotFound("criterion fails for every positive gradient")
    digits = 2 - math.floor(math.log10(lo))
    d = math.floor(lo * 10**digits) / 10**digits
    if not ok(d) or ok(1.1 * d):
        raise NotFound(f"post-check failed at dimensionless m1 = {d}")
    return d * params.m0 / params.length_scale


def _within_tolerance_units(params, n_max, N, guard, cubic_source):
    hw = params.energy_scale
    for which in (H, K):
        e1, e2 = perturb.numeric_levels(which, params, n_max, N, guard, cubic_source)
        e0 = (np.arange(n_max + 1) + 0.5) * hw
        if np.any(np.abs(e1 + e2) > TOLERANCE_FRACTION * e0):
            return False
    return True


# --- output helpers -------------------------------------------------------------

def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([r if isinstance(r, (int, str)) else fmt(r) for r in row])
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --- commands ------------------------------------------------------------------

def cmd_spectrum(config):
    p = config.params
    reports = {w: oracle.spectrum_report(p, w, config.n_max, config.N, config.guard,
                                         cubic_source=config.cubic_source) for w in (H, K)}
    if config.format == "json":
        _emit(_json_text({w.value: r.to_dict() for w, r in reports.items()}), config.out)
    else:
        rows = []
        closed = config.source == "closed_form"
        for lh, lk in zip(reports[H].levels, reports[K].levels):
            e0 = perturb.e0(p, lh.n)
            h1, h2 = (lh.e1_closed_form, lh.e2_closed_form) if closed else (lh.e1_numeric, lh.e2_numeric)
            k1, k2 = (lk.e1_closed_form, lk.e2_closed_form) if closed else (lk.e1_numeric, lk.e2_numeric)
            rows.append((lh.n, e0, h1, h2, e0 + h1 + h2, k1, k2, e0 + k1 + k2, lh.e_exact_diag, lk.e_exact_diag))
        _emit(_csv_text(SPECTRUM_COLUMNS, rows), config.out)
    if not all(lv.converged for r in reports.values() for lv in r.levels):
        log.error("some levels did not converge in the truncation dimension")
        return EXIT_CONVERGENCE
    return EXIT_OK


def delta_rows(params, n_max, N=perturb.DEFAULT_N, guard=fock.DEFAULT_GUARD, cubic_source=CUBIC_CLASSICAL):
    eH1, eH2 = perturb.numeric_levels(H, params, n_max, N, guard, cubic_source)
    eK1, eK2 = perturb.numeric_levels(K, params, n_max, N, guard, cubic_source)
    numeric = (eH1 + eH2) - (eK1 + eK2)
    return [(n, float(numeric[n]), perturb.delta_E_printed(params, n)) for n in range(n_max + 1)]


def cmd_delta(config):
    p = config.params
    if not config.m1_given:
        p = p.with_m1(max_m1_for_tolerance(p, config.n_max, config.N, config.guard, config.cubic_source))
        log.info("m1 chosen by the 1%% rule: %s", fmt(p.m1))
    rows = delta_rows(p, config.n_max, config.N, config.guard, config.cubic_source)
    if config.format == "json":
        _emit(_json_text({"params": oracle._params_dict(p), "m1_from_tolerance_rule": not config.m1_given,
                          "rows": [dict(zip(DELTA_COLUMNS, r)) for r in rows]}), config.out)
    else:
        _emit(_csv_text(DELTA_COLUMNS, rows), config.out)
    return EXIT_OK


def property_suite(config):
    """Invariant checks run by ``verify``: list of ``(name, passed, detail)``."""
    p, N, g = config.params, config.N, config.guard
    nat = p.natural()
    results = []

    def check(name, fn):
        try:
            ok, detail = fn()
        except PdmoscError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))

    def weyl_vs_oracle():
        worst = 0.0
        x = fock.position_op(nat, N)
        for mom, h in ((fock.momentum_op(nat, N), nat.hbar), (fock.velocity_op(nat, N), nat.hbar / nat.m0)):
            a = quantize.weyl_xp2(x, mom, h) - quantize.symmetrization_oracle([x, mom, mom])
            b = quantize.weyl_x2p2(x, mom, h) - quantize.symmetrization_oracle([x, x, mom, mom])
            worst = max(worst, np.abs(fock.trusted_block(a, g)).max(), np.abs(fock.trusted_block(b, g)).max())
        return worst <= fock.MATRIX_TOL, f"max deviation {worst:.3e}"

    def hermitian():
        worst = 0.0
        for w in (H, K):
            W = fock.trusted_block(quantize.build_W(w, nat, N, config.cubic_source, g), g)
            worst = max(worst, fock.hermiticity_defect(W), fock.max_imag(W))
        return worst <= fock.MATRIX_TOL, f"max defect {worst:.3e}"

    def first_order():
        worst = 0.0
        for w in (H, K):
            e1, _ = perturb.numeric_levels(w, nat, config.n_max, N, g, config.cubic_source)
            c1 = [perturb.closed_form_E1(w, nat, n) for n in range(config.n_max + 1)]
            worst = max(worst, float(np.abs(e1 - c1).max()))
        return worst <= 1e-10, f"max deviation {worst:.3e}"

    def second_order_fit():
        worst = 0.0
        for w in (H, K):
            W = quantize.build_W(w, nat, N, config.cubic_source, g)
            for n in range(min(config.n_max, 4) + 1):
                f = oracle.extract_pt_orders(W, nat, n, config.lambda_grid, guard=g)
                worst = max(worst, abs(f.e2 - perturb.second_order_numeric(W, nat, n, g)))
        return worst <= 1e-6, f"max |e2 - e2_fit| {worst:.3e}"

    def ground_state_sign():
        vals = [perturb.numeric_levels(w, nat, 0, N, g, config.cubic_source)[1][0] for w in (H, K)]
        return all(v <= 0 for v in vals), "e2(0) = " + ", ".join(f"{v:.6e}" for v in vals)

    def unperturbed():
        w = oracle.eigen_spectrum(fock.h0_matrix(nat, N - g))
        dev = float(np.abs(w - (np.arange(N - g) + 0.5)).max())
        return dev <= 1e-12, f"max deviation {dev:.3e}"

    def gaps():
        return all(oracle.spectrum_gaps_ok(nat, w, N, g, config.n_max, config.cubic_source) for w in (H, K)), ""

    def conservation():
        T = classical.period(nat)
        d1 = classical.relative_K_drift(nat, 1.0, 0.0, T / 1000, 100_000)
        d2 = classical.relative_K_drift(nat, 1.0, 0.0, T / 2000, 200_000)
        return d1 <= 1e-8 and d1 / d2 >= 12.0, f"drift {d1:.3e}, halving ratio {d1 / d2:.1f}"

    def k_exact():
        x, v = np.meshgrid(np.linspace(-1, 1, 41), np.linspace(-2, 2, 41))
        if np.any(nat.m0 + nat.m1 * x <= 0):
            return True, "grid skipped: mass not positive"
        dev = float(np.abs(classical_K_exact(nat, x, v) - classical_K_expanded(nat, x, v)).max())
        return dev <= 1e-14, f"max deviation {dev:.3e}"

    check("weyl forms equal ordering average", weyl_vs_oracle)
    check("perturbations Hermitian and real", hermitian)
    check("first order equals printed closed form", first_order)
    check("second order equals lambda fit", second_order_fit)
    check("ground-state second order non-positive", ground_state_sign)
    check("unperturbed spectrum", unperturbed)
    check("nondegenerate low spectrum", gaps)
    check("classical K conservation", conservation)
    check("K expansion exact", k_exact)
    return results


def cmd_verify(config):
    p = config.params
    adj = oracle.adjudicate(p, config.n_max, config.N, config.guard, config.lambda_grid, config.cubic_source)
    results = property_suite(config)
    if config.format == "json":
        payload = adj.to_dict()
        payload["properties"] = [{"name": n, "passed": ok, "detail": d} for n, ok, d in results]
        _emit(_json_text(payload), config.out)
    else:
        lines = [f"{'PASS' if ok else 'FAIL'}  {name}  {detail}" for name, ok, detail in results]
        lines += [f"VERDICT  {v.verdict}: {v.question} [printed {v.printed}; supported {v.supported}] {v.note}".rstrip()
                  for v in adj.verdicts]
        lines += [f"LADDER  {d.printed_form}: max deviation {d.max_deviation:.3e}, "
                  f"hermiticity defect {d.hermiticity_defect:.3e}" for d in adj.ladder]
        _emit("\n".join(lines) + "\n", config.out)
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_INTERNAL


def cmd_classical(config):
    p = config.params
    x0 = config.extra.get("x0")
    x0 = p.length_scale if x0 is None else x0
    p0 = config.extra.get("p0") or 0.0
    spp = config.extra.get("steps_per_period") or 1000
    periods = config.extra.get("periods") or 10
    dt = classical.period(p) / spp
    states = classical.integrate(p, x0, p0, dt, int(spp * periods))
    if config.format == "json":
        _emit(_json_text([asdict(s) for s in states]), config.out)
    else:
        buf = io.StringIO()
        classical.write_trajectory_csv(states, buf)
        _emit(buf.getvalue(), config.out)
    return EXIT_OK


def cmd_constants(config):
    c = asdict(derive_constants(config.params))
    c["length_scale"] = config.params.length_scale
    c["m1_dimensionless"] = config.params.m1_dimensionless
    if config.format == "json":
        _emit(_json_text(c), config.out)
    else:
        _emit(_csv_text(("name", "value"), sorted(c.items())), config.out)
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "delta": cmd_delta,
    "verify": cmd_verify,
    "classical": cmd_classical,
    "constants": cmd_constants,
}


# --- argument parsing ------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="pdmosc",
        description="Oscillator with linear position-dependent mass: two quantizations compared.",
        epilog="exit codes: 0 ok, 2 invalid configuration, 3 truncation not converged, "
               "4 internal failure (failed invariant in verify)",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--units", choices=[u.value for u in Units], default="natural")
    common.add_argument("--m0", type=float, help="mass at x=0 (SI default 1e-17 kg)")
    common.add_argument("--m1", type=float, help="mass gradient (see --m1-mode); default 0.05 dimensionless")
    common.add_argument("--omega", type=float, help="frequency (SI default 1e10, see --omega-convention)")
    common.add_argument("--hbar", type=float, help=f"reduced Planck constant (SI default {HBAR_SI})")
    common.add_argument("--m1-mode", choices=["absolute", "dimensionless"], default="dimensionless",
                        help="dimensionless means m1 * L / m0 with L = sqrt(hbar / (m0 omega))")
    common.add_argument("--omega-convention", choices=["rad_s", "hz_times_2pi"], default="rad_s")
    common.add_argument("--N", type=int, default=perturb.DEFAULT_N, help="Fock truncation dimension")
    common.add_argument("--guard", type=int, default=fock.DEFAULT_GUARD)
    common.add_argument("--n-max", type=int, default=6)
    common.add_argument("--lambda-grid", default=",".join(str(x) for x in oracle.DEFAULT_LAMBDA_GRID))
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--w-cubic-source", choices=list(CUBIC_SOURCES), default=CUBIC_CLASSICAL,
                        help="eq8b: cubic coefficient m1 w^2/3; eq26: m1 w^2/(3 m0)")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sp = sub.add_parser("spectrum", parents=[common], help="per-level energies, both quantizations")
    sp.add_argument("--source", choices=["numeric", "closed_form"], default="numeric",
                    help="route filling the eH*/eK* columns of the CSV")
    sub.add_parser("delta", parents=[common], help="E_H,n - E_K,n dataset")
    sub.add_parser("verify", parents=[common], help="adjudication report and invariant suite")
    cp = sub.add_parser("classical", parents=[common], help="classical trajectory CSV")
    cp.add_argument("--x0", type=float, help="initial position (default one oscillator length)")
    cp.add_argument("--p0", type=float, default=0.0)
    cp.add_argument("--periods", type=float, default=10)
    cp.add_argument("--steps-per-period", type=int, default=1000)
    sub.add_parser("constants", parents=[common], help="derived constants")
    return parser


def config_from_args(args):
    units = Units(args.units)
    omega = args.omega
    if units is Units.NATURAL:
        for name in ("m0", "omega", "hbar"):
            val = getattr(args, name)
            if val is not None and val != 1.0:
                raise DomainError(f"--{name} must be 1 in natural units")
        if args.omega_convention != "rad_s":
            raise DomainError("--omega-convention applies to SI units only")
        base = ModelParams()
    else:
        omega = FIGURE_OMEGA if omega is None else omega
        if args.omega_convention == "hz_times_2pi":
            omega = 2 * math.pi * omega
        base = ModelParams.si(m0=FIGURE_M0 if args.m0 is None else args.m0, omega=omega,
                              hbar=HBAR_SI if args.hbar is None else args.hbar)
    m1_given = args.m1 is not None
    m1 = DEFAULT_M1 if args.m1 is None else args.m1
    params = base.with_dimensionless_m1(m1) if args.m1_mode == "dimensionless" else base.with_m1(m1)
    try:
        grid = tuple(float(x) for x in args.lambda_grid.split(","))
    except ValueError as exc:
        raise DomainError(f"bad --lambda-grid: {exc}") from exc
    extra = {k: getattr(args, k) for k in ("x0", "p0", "periods", "steps_per_period") if hasattr(args, k)}
    return RunConfig(
        subcommand=args.subcommand, params=params, N=args.N, guard=args.guard, n_max=args.n_max,
        lambda_grid=grid, format=args.format, out=args.out, omega_convention=args.omega_convention,
        m1_mode=args.m1_mode, cubic_source=args.w_cubic_source, m1_given=m1_given,
        source=getattr(args, "source", "numeric"), extra=extra)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = config_from_args(args)
    except (DomainError, SizeError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    try:
        return COMMANDS[config.subcommand](config)
    except NotConverged as exc:
        log.error("%s (estimate %.3e)", exc, exc.estimate)
        return EXIT_CONVERGENCE
    except DomainError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except Exception:
        log.exception("internal failure")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
