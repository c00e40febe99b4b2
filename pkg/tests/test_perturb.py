from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdmosc import perturb
from pdmosc.errors import NotHermitian, TruncationError
from pdmosc.model import ModelParams, derive_constants
from pdmosc.perturb import E2Template, Source
from pdmosc.quantize import H, K, build_W

SIGMA_POLY = lambda n: 4 * n**3 + 6 * n**2 + 14 * n + 6


def e2_oracle(which, n, mu):
    """Hand-derived second-order energies in natural units (hbar = omega = m0 = 1)."""
    sigma = Fraction(3, 2) * mu**2
    if which is H:
        return -(Fraction(2, 3) * n**2 + Fraction(2, 3) * n + Fraction(4, 9)) * mu**2 \
            - (sigma / 4) ** 2 * SIGMA_POLY(n)
    return -(Fraction(5, 3) * n**2 + Fraction(5, 3) * n + Fraction(11, 18)) * mu**2 \
        - (sigma / 12) ** 2 * SIGMA_POLY(n)


def e1_oracle(which, n, mu):
    sigma = Fraction(3, 2) * mu**2
    value = sigma * (2 * n**2 + 2 * n + 1) / 4
    return value if which is H else value / 3


def test_e0():
    assert perturb.e0(ModelParams(), 0) == 0.5
    assert perturb.e0(ModelParams.si(m0=1.0, omega=2.0, hbar=3.0), 2) == 15.0
    with pytest.raises(ValueError):
        perturb.e0(ModelParams(), -1)


@pytest.mark.parametrize("which", [H, K])
def test_numeric_matches_rational_oracle(which):
    mu = Fraction(1, 20)
    p = ModelParams(m1=float(mu))
    e1, e2 = perturb.numeric_levels(which, p, 8)
    for n in range(9):
        assert e1[n] == pytest.approx(float(e1_oracle(which, n, mu)), rel=1e-12)
        assert e2[n] == pytest.approx(float(e2_oracle(which, n, mu)), rel=1e-12)


@pytest.mark.parametrize("which", [H, K])
def test_first_order_closed_form(natural, which):
    for n in range(10):
        W = build_W(which, natural, 64)
        assert perturb.first_order_numeric(W, n) == pytest.approx(
            perturb.closed_form_E1(which, natural, n), rel=1e-12)


def test_ground_state_first_order_and_ratio(natural):
    sigma = derive_constants(natural).sigma
    assert perturb.closed_form_E1(H, natural, 0) == pytest.approx(sigma / 4)
    for n in range(6):
        assert perturb.closed_form_E1(K, natural, n) == pytest.approx(
            perturb.closed_form_E1(H, natural, n) / 3, rel=1e-14)


def test_ground_state_second_order_negative(natural):
    for which in (H, K):
        W = build_W(which, natural, 64)
        assert perturb.second_order_numeric(W, natural, 0) <= 0


def test_cubic_term_has_no_diagonal():
    p = ModelParams(m1=0.2)
    from pdmosc import fock
    x = fock.position_op(p, 30)
    assert np.all(np.diag(x @ x @ x) == 0)


def test_band_tail_is_exactly_zero(natural):
    W = build_W(H, natural, 64)
    for n in range(6):
        terms = perturb.second_order_terms(W, natural, n)
        assert np.all(terms[n + 5:] == 0)
        assert terms[n] == 0
        assert np.sum(terms) == pytest.approx(perturb.second_order_numeric(W, natural, n), rel=1e-14)


def test_zero_gradient_closed_forms_vanish():
    p = ModelParams()
    for n in range(5):
        for which in (H, K):
            assert perturb.closed_form_E1(which, p, n) == 0
            assert perturb.closed_form_E2(which, p, n) == 0
        assert perturb.delta_E_printed(p, n) == 0


def test_truncation_errors(natural):
    W = build_W(H, natural, 20)
    with pytest.raises(TruncationError):
        perturb.first_order_numeric(W, 12)
    with pytest.raises(TruncationError):
        perturb.second_order_numeric(W, natural, 8)
    perturb.second_order_numeric(W, natural, 7)


def test_imaginary_diagonal_rejected():
    W = np.zeros((20, 20), complex)
    W[0, 0] = 1 + 1e-6j
    with pytest.raises(NotHermitian):
        perturb.first_order_numeric(W, 0)


def test_printed_second_order_K_matches(natural):
    _, e2 = perturb.numeric_levels(K, natural, 6)
    for n in range(7):
        assert perturb.closed_form_E2(K, natural, n) == pytest.approx(e2[n], rel=1e-12)


def test_printed_second_order_H_sign(natural):
    _, e2 = perturb.numeric_levels(H, natural, 6)
    printed = [perturb.closed_form_E2(H, natural, n) for n in range(7)]
    assert max(abs(a - b) for a, b in zip(printed, e2)) > 1e-3
    fixed = E2Template(s1=+1, s2=-1, cubic=True, sigma_divisor=4)
    for n in range(7):
        assert fixed.evaluate(natural, n) == pytest.approx(e2[n], rel=1e-12)


def test_templates_enumerate_all_readings():
    ts = perturb.all_e2_templates()
    assert len(ts) == 16 and len(set(ts)) == 16
    assert perturb.PRINTED_E2[H] in ts and perturb.PRINTED_E2[K] in ts
    assert "sigma/12" in perturb.PRINTED_E2[K].label()


def test_printed_delta_matches_numeric(natural):
    for n in range(7):
        assert perturb.delta_E_printed(natural, n) == pytest.approx(
            perturb.delta_E(natural, n), rel=1e-10)


def test_total_energy_routes(natural):
    a = perturb.total_energy(K, natural, 3)
    b = perturb.total_energy(K, natural, 3, Source.CLOSED_FORM)
    assert a.total == pytest.approx(b.total, rel=1e-13)
    assert a.total == a.e0 + a.e1 + a.e2
    assert b.source is Source.CLOSED_FORM


@settings(max_examples=20, deadline=None)
@given(st.floats(0.005, 0.08))
def test_perturbation_orders_scale(mu):
    # e1 and e2 are exactly quadratic in the gradient up to the sigma^2 part
    p1, p2 = ModelParams(m1=mu), ModelParams(m1=2 * mu)
    for which in (H, K):
        assert perturb.closed_form_E1(which, p2, 2) == pytest.approx(4 * perturb.closed_form_E1(which, p1, 2))
        e_a = perturb.numeric_levels(which, p1, 2, N=24)[1]
        e_b = perturb.numeric_levels(which, p2, 2, N=24)[1]
        assert np.all(e_b < e_a)


def test_si_units_scale_with_hbar_omega():
    nat = ModelParams(m1=0.04)
    si = ModelParams.si(m0=1e-17, omega=1e10, hbar=1.054571817e-34, m1=0.0).with_dimensionless_m1(0.04)
    hw = si.hbar * si.omega
    for which in (H, K):
        e1n, e2n = perturb.numeric_levels(which, nat, 4)
        e1s, e2s = perturb.numeric_levels(which, si, 4)
        assert np.allclose(e1s / hw, e1n, rtol=1e-10, atol=0)
        assert np.allclose(e2s / hw, e2n, rtol=1e-10, atol=0)


@pytest.mark.parametrize("which", [H, K])
def test_leading_powers_in_gradient(which):
    lams = np.array([1.0, 0.5, 0.25])
    e1 = np.array([perturb.numeric_levels(which, ModelParams(m1=0.05 * s), 3)[0] for s in lams])
    e2 = np.array([perturb.numeric_levels(which, ModelParams(m1=0.05 * s), 3)[1] for s in lams])
    for n in range(4):
        p1 = np.polyfit(np.log(lams), np.log(e1[:, n]), 1)[0]
        p2 = np.polyfit(np.log(lams), np.log(-e2[:, n]), 1)[0]
        assert p1 == pytest.approx(2.0, abs=1e-9)
        assert p2 == pytest.approx(2.0, abs=1e-2)
