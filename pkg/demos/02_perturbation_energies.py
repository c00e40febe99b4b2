"""First- and second-order energies for the two quantizations.

W_H quantizes the exact Hamiltonian in (x, p); W_K quantizes the constant
of motion in (x, v). Both are expanded to second order in the mass gradient.
"""
import numpy as np

from pdmosc import perturb
from pdmosc.model import ModelParams, derive_constants
from pdmosc.quantize import H, K

p = ModelParams(m1=0.05)
c = derive_constants(p)
print(f"m1 = {p.m1}, sigma = {c.sigma:.6g}, eta = {c.eta:.6g}, beta = {c.beta:.6g}")
print(f"3 eta - m1 beta = {3 * c.eta - p.m1 * c.beta:.1e}  (vanishes identically)")

e1H, e2H = perturb.numeric_levels(H, p, 6)
e1K, e2K = perturb.numeric_levels(K, p, 6)
print(" n     E_H^(1)       E_H^(2)       E_K^(1)       E_K^(2)")
for n in range(7):
    print(f"{n:2d}  {e1H[n]: .6e} {e2H[n]: .6e} {e1K[n]: .6e} {e2K[n]: .6e}")

# first order from K is exactly a third of first order from H
print("E_K^(1) / E_H^(1):", np.unique(np.round(e1K / e1H, 14)))

# |<m|W|3>| for m = 0..8: nothing beyond four levels away. The +-2 couplings
# cancel in both, and in W_H the +-1 couplings cancel as well (3 eta = m1 beta);
# what is left there is round-off
for which in (H, K):
    col = np.abs(perturb.build_W(which, p, 64)[:9, 3])
    print(which.value, np.where(col < 1e-15, 0.0, col).round(6))
