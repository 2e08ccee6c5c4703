"""Walk through the recurrent, 2-symmetric and conformally recurrent families.

Each family comes with its own list of expected properties; they are checked
exactly, with formal functions of u kept symbolic.
"""
import json

from lorentz_holonomy import families as fam
from lorentz_holonomy.conditions import recurrence_factor
from lorentz_holonomy.walker import riemann

cases = [
    fam.recurrent_case_II(2, [2, 1]),
    fam.recurrent_case_II(2, [1, 1]),
    fam.two_symmetric(2, [1, 2], [[3, 0], [0, 4]]),
    fam.conformally_recurrent(2, [1, -1]),
]
for f in cases:
    print(f"\n{f.name} {json.dumps(f.params)}")
    print("  H =", f.metric.H.to_string(list(f.metric.functions) or None))
    for name, ok in f.run():
        print(f"  [{'ok' if ok else 'FAILED'}] {name}")

# theta for case II is d ln|F|, and freezing F turns recurrence into parallelism
m = cases[0].metric
rep = recurrence_factor(riemann(m), m)
print("\ntheta =", rep.theta_strings(["F"]))
print("with F' -> 0:", recurrence_factor(riemann(m), m, frozen=(0,)).verdict)

# removing terms linear in x^2..x^n by a coordinate change
pp = fam.pp_wave(3, "x1^3*u + u^2*x2 + 3*x3").metric
pp2, b = fam.remove_linear_terms(pp)
print("\nH before:", pp.H)
print("H after: ", pp2.H)
