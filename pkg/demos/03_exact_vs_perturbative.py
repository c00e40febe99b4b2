"""Cross-check perturbation theory against exact diagonalization.

Diagonalizes H0 + W on the trusted Fock block, confirms truncation
convergence, and shows the perturbative error shrinking like m1^4.
"""
import numpy as np

from pdmosc import oracle, perturb
from pdmosc.model import ModelParams
from pdmosc.quantize import K

p = ModelParams(m1=0.05)
energy, estimate = oracle.converged_level(p, K, 2)
print(f"level 2 exact: {energy:.12f} (moved {estimate:.1e} between N=56 and N=64)")

# lambda scaling: fit E(+-lambda) to pull out e1 and e2 from exact spectra
W = perturb.build_W(K, p, 64)
fit = oracle.extract_pt_orders(W, p, 2)
e1, e2 = perturb.numeric_levels(K, p, 2)
print(f"e1 fit {fit.e1:.10f}  vs sum {e1[2]:.10f}")
print(f"e2 fit {fit.e2:.10f}  vs sum {e2[2]:.10f}")

# error of the second-order energy as the gradient shrinks
scales = np.geomspace(0.05, 0.5, 6)
errs = []
for s in scales:
    q = p.with_m1(p.m1 * s)
    exact = oracle.eigen_spectrum(oracle.full_matrix(K, q, 64))[2]
    errs.append(abs(perturb.total_energy(K, q, 2).total - exact))
slope = np.polyfit(np.log(scales), np.log(errs), 1)[0]
print(f"log-log slope of |E_PT - E_exact|: {slope:.3f}")

# the Jacobi solver reproduces LAPACK on a small block
M = oracle.full_matrix(K, p, 24)
print("Jacobi vs LAPACK:", np.abs(oracle.eigen_spectrum(M, method="jacobi") - oracle.eigen_spectrum(M)).max())
