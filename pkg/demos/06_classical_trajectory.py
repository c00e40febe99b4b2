"""Classical motion under the exact Hamiltonian.

The Hamiltonian is not separable, so RK4 is used. K(x, v) should stay
constant; its drift measures the integrator error.
"""
import io

from pdmosc import classical
from pdmosc.model import ModelParams

p = ModelParams(m1=0.05)
T = classical.period(p)
for div in (250, 500, 1000, 2000):
    drift = classical.relative_K_drift(p, 1.0, 0.0, T / div, 100 * div)
    print(f"dt = T/{div:<5d} relative K drift over 100 periods: {drift:.3e}")

# a short trajectory as CSV
states = classical.integrate(p, 1.0, 0.0, T / 8, 8)
buf = io.StringIO()
classical.write_trajectory_csv(states, buf)
print(buf.getvalue())
