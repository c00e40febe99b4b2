import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from pdmosc import fock
from pdmosc.errors import SizeError
from pdmosc.model import ModelParams


def test_ladder_small():
    a = fock.ladder_lower(3)
    expected = np.zeros((3, 3))
    expected[0, 1], expected[1, 2] = 1.0, math.sqrt(2)
    assert np.array_equal(a, expected)
    assert np.array_equal(fock.ladder_raise(3), expected.T)


def test_ladder_rejects_tiny():
    with pytest.raises(SizeError):
        fock.ladder_lower(1)


def test_number_operator():
    a = fock.ladder_lower(10)
    assert np.allclose(fock.ladder_raise(10) @ a, np.diag(np.arange(10.0)), rtol=0, atol=1e-14)


def test_commutator_corner_defect():
    N = 12
    c = fock.commutator(fock.ladder_lower(N), fock.ladder_raise(N))
    expected = np.eye(N)
    expected[-1, -1] = -(N - 1)
    assert np.allclose(c, expected, atol=1e-14)


def test_x_p_v_natural_units():
    p = ModelParams()
    x = fock.position_op(p, 2)
    assert x[0, 1] == pytest.approx(1 / math.sqrt(2)) and x[1, 0] == pytest.approx(1 / math.sqrt(2))
    assert x[0, 0] == 0 and x[1, 1] == 0


def test_velocity_is_momentum_over_m0():
    p = ModelParams.si(m0=2.5, omega=0.7, hbar=1.3)
    assert np.allclose(fock.velocity_op(p, 20), fock.momentum_op(p, 20) / 2.5, rtol=1e-15, atol=0)


@pytest.mark.parametrize("params", [ModelParams(), ModelParams.si(m0=2.0, omega=3.0, hbar=0.5)])
def test_canonical_commutators(params):
    N, k = 16, 15
    x, p, v = (fock.position_op(params, N), fock.momentum_op(params, N), fock.velocity_op(params, N))
    assert np.allclose(fock.commutator(x, p)[:k, :k], 1j * params.hbar * np.eye(k), atol=1e-12)
    assert np.allclose(fock.commutator(x, v)[:k, :k], 1j * params.hbar / params.m0 * np.eye(k), atol=1e-12)


def test_operator_structure():
    p = ModelParams()
    N = 30
    for op in (fock.position_op(p, N), fock.momentum_op(p, N), fock.velocity_op(p, N), fock.h0_matrix(p, N)):
        assert fock.hermiticity_defect(op) <= fock.MATRIX_TOL
    assert fock.max_imag(fock.position_op(p, N)) == 0
    assert np.all(fock.momentum_op(p, N).real == 0)
    assert np.all(fock.velocity_op(p, N).real == 0)


def test_h0_diagonal():
    h = fock.h0_matrix(ModelParams(), 10)
    assert h[0, 0] == 0.5 and h[3, 3] == 3.5


def test_h0_from_operators_differs_only_at_corner():
    p = ModelParams()
    N = 20
    diff = np.abs(fock.h0_from_operators(p, N) - fock.h0_matrix(p, N))
    assert diff[: N - 1, : N - 1].max() <= 1e-14
    assert diff[N - 1, N - 1] > 0.1


def test_builders_are_read_only():
    a = fock.ladder_lower(4)
    with pytest.raises(ValueError):
        a[0, 0] = 1.0


def test_size_mismatch():
    with pytest.raises(SizeError):
        fock.mul(np.eye(3), np.eye(4))
    with pytest.raises(SizeError):
        fock.commutator(np.eye(3), np.eye(2))


def test_basis_spec():
    spec = fock.FockBasisSpec(64)
    assert spec.n_trusted == 56
    with pytest.raises(SizeError):
        fock.FockBasisSpec(64, guard=3)
    with pytest.raises(SizeError):
        fock.FockBasisSpec(8, guard=8)


square = arrays(np.complex128, (5, 5), elements=st.complex_numbers(max_magnitude=10, allow_nan=False,
                                                                    allow_infinity=False))


@given(square)
def test_commutator_with_self_vanishes(A):
    assert np.array_equal(fock.commutator(A, A), np.zeros_like(A)) or np.allclose(fock.commutator(A, A), 0)


@given(square)
def test_adjoint_involution(A):
    assert np.array_equal(fock.adjoint(fock.adjoint(A)), A)


@given(square, square)
def test_algebra_helpers(A, B):
    assert np.array_equal(fock.add(A, B), A + B)
    assert np.array_equal(fock.scale(2j, A), 2j * A)
    assert np.allclose(fock.adjoint(fock.mul(A, B)), fock.adjoint(B) @ fock.adjoint(A))
