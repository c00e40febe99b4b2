"""E_H,n - E_K,n at a physical parameter point.

m0 = 1e-17 kg and omega = 1e10 rad/s; the gradient is the largest value
keeping both corrections under 1% of hbar omega (n + 1/2) for n <= 6.
"""
from pdmosc.cli import delta_rows, max_m1_for_tolerance
from pdmosc.model import HBAR_SI, ModelParams

base = ModelParams.si(m0=1e-17, omega=1e10, hbar=HBAR_SI)
m1 = max_m1_for_tolerance(base, 6)
p = base.with_m1(m1)
print(f"m1 = {m1:.4e} kg/m  (dimensionless {p.m1_dimensionless:.4g}), oscillator length {p.length_scale:.3e} m")

hw = p.energy_scale
print(" n   Delta E [J]       Delta E / hbar w   closed form / hbar w")
for n, numeric, closed in delta_rows(p, 6):
    print(f"{n:2d}  {numeric: .6e}   {numeric / hw: .6e}     {closed / hw: .6e}")

# the same numbers come out of:  pdmosc delta --units si
