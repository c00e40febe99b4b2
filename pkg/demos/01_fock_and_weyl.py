"""Ladder operators in a truncated Fock space, and Weyl ordering.

Builds x and p as matrices, shows where truncation breaks [x, p] = i hbar,
and checks that the compact Weyl forms of x p^2 and x^2 p^2 agree with
a brute-force average over operator orderings.
"""
import numpy as np

from pdmosc import fock, quantize
from pdmosc.model import ModelParams

p = ModelParams()
N = 16
x, mom = fock.position_op(p, N), fock.momentum_op(p, N)

# [x, p] = i hbar everywhere except the last diagonal entry,
# which pays for the missing state |N>
c = fock.commutator(x, mom)
print("diag of [x, p] / i:", np.round((np.diag(c) / 1j).real, 12))

# H0 is diagonal with hbar omega (n + 1/2)
print("H0 diagonal:", np.diag(fock.h0_matrix(p, 6)).real)

# Weyl forms versus the ordering average; only the trusted block is meaningful
guard = fock.DEFAULT_GUARD
x, mom = fock.position_op(p, 40), fock.momentum_op(p, 40)
for name, compact, factors in [
    ("x p^2", quantize.weyl_xp2(x, mom, p.hbar), [x, mom, mom]),
    ("x^2 p^2", quantize.weyl_x2p2(x, mom, p.hbar), [x, x, mom, mom]),
]:
    avg = quantize.symmetrization_oracle(factors)
    dev = np.abs(fock.trusted_block(compact - avg, guard)).max()
    print(f"W({name}) vs ordering average on trusted block: {dev:.2e}")

# outside the trusted block the truncated products go wrong
full = np.abs(quantize.weyl_x2p2(x, mom, p.hbar) - quantize.symmetrization_oracle([x, x, mom, mom])).max()
print(f"same comparison including the corner: {full:.2e}")
