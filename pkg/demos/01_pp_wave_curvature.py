"""pp-wave curvature: R_uiuj = 1/2 d_i d_j H, and the Weyl tensor keeps only the trace-free part.

    python3 demos/01_pp_wave_curvature.py
"""
import itertools

from lorentz_holonomy import WalkerMetric, parse_expr, riemann, weyl_general
from lorentz_holonomy.conditions import is_pp_wave, recurrence_factor
from lorentz_holonomy.decomp import decompose_curvature
from lorentz_holonomy.walker import ricci_and_scalar

m = WalkerMetric.build(2, parse_expr("x1^2*u + x1*x2^2 - 3*x2^2"))
print(m)
print("pp-wave:", is_pp_wave(m))

R = riemann(m)
u = m.dim - 1
for i, j in itertools.product((1, 2), repeat=2):
    print(f"R[u,x{i},u,x{j}] =", R[u, i, u, j])

Ric, s = ricci_and_scalar(m)
print("Ric_uu =", Ric[u, u], " scalar =", s)

W = weyl_general(m)
print("W[u,x1,u,x1] =", W[u, 1, u, 1])

# only T survives in the block decomposition of a pp-wave
blocks = decompose_curvature(m)
print("T =", [[str(blocks.T[i, j]) for j in range(2)] for i in range(2)])

print("R recurrence:", recurrence_factor(R, m).verdict)
