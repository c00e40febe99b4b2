"""Truncated Fock-space matrices of the constant-mass oscillator.

Matrices are dense ``complex128`` numpy arrays indexed as ``M[m, n] = <m|O|n>``.
Builders return read-only arrays; every algebra helper returns a new array.
Truncation corrupts rows/columns near index ``N - 1``; only the block
``n <= N - 1 - guard`` is trusted.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeError

DEFAULT_GUARD = 8
MAX_MONOMIAL_DEGREE = 4
MATRIX_TOL = 1e-12


@dataclass(frozen=True)
class FockBasisSpec:
    dim: int
    guard: int = DEFAULT_GUARD

    def __post_init__(self):
        if self.guard < MAX_MONOMIAL_DEGREE:
            raise SizeError(f"guard must be >= {MAX_MONOMIAL_DEGREE}, got {self.guard}")
        if self.dim < self.guard + 1:
            raise SizeError(f"dim {self.dim} too small for guard {self.guard}")

    @property
    def n_trusted(self):
        """Number of trusted basis states, i.e. indices ``0 .. n_trusted - 1``."""
        return self.dim - self.guard


def _freeze(a):
    a.flags.writeable = False
    return a


def _check_dim(N):
    if N < 2:
        raise SizeError(f"Fock dimension must be >= 2, got {N}")


def trusted_block(M, guard=DEFAULT_GUARD):
    k = M.shape[0] - guard
    return M[:k, :k]


def ladder_lower(N):
    """Annihilation operator: ``a[n-1, n] = sqrt(n)``."""
    _check_dim(N)
    return _freeze(np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1).astype(complex))


def ladder_raise(N):
    return _freeze(adjoint(ladder_lower(N)))


def number_op(N):
    _check_dim(N)
    return _freeze(np.diag(np.arange(N, dtype=float)).astype(complex))


def identity(N):
    return _freeze(np.eye(N, dtype=complex))


def position_op(params, N):
    a = ladder_lower(N)
    return _freeze(math.sqrt(params.hbar / (2 * params.m0 * params.omega)) * (a + a.T))


def momentum_op(params, N):
    a = ladder_lower(N)
    return _freeze(-1j * math.sqrt(params.m0 * params.hbar * params.omega / 2) * (a - a.T))


def velocity_op(params, N):
    a = ladder_lower(N)
    return _freeze(-1j * math.sqrt(params.hbar * params.omega / (2 * params.m0)) * (a - a.T))


def h0_matrix(params, N):
    """Exact unperturbed oscillator: ``diag(hbar omega (n + 1/2))``."""
    _check_dim(N)
    e = params.hbar * params.omega * (np.arange(N) + 0.5)
    return _freeze(np.diag(e).astype(complex))


def h0_from_operators(params, N):
    """``p^2/2m0 + m0 w^2 x^2 / 2`` assembled from truncated x and p (wrong at the corner)."""
    x, p = position_op(params, N), momentum_op(params, N)
    return _freeze(p @ p / (2 * params.m0) + 0.5 * params.m0 * params.omega**2 * (x @ x))


def _same_shape(*mats):
    shape = mats[0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise SizeError(f"expected square matrix, got shape {shape}")
    for m in mats[1:]:
        if m.shape != shape:
            raise SizeError(f"dimension mismatch: {shape} vs {m.shape}")


def mul(A, B):
    _same_shape(A, B)
    return A @ B


def add(A, B):
    _same_shape(A, B)
    return A + B


def scale(c, A):
    return c * A


def adjoint(A):
    return A.conj().T.copy()


def commutator(A, B):
    _same_shape(A, B)
    return A @ B - B @ A


def matmul_chain(*factors):
    _same_shape(*factors)
    out = factors[0]
    for f in factors[1:]:
        out = out @ f
    return out


def hermiticity_defect(M):
    """Largest entry of ``|M - M^dagger|``."""
    return float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0


def max_imag(M):
    return float(np.max(np.abs(M.imag))) if M.size else 0.0
