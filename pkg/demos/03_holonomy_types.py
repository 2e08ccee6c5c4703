"""Infinitesimal holonomy at a point, and the sim(n) type of the result."""
from lorentz_holonomy import WalkerMetric, parse_expr
from lorentz_holonomy import holonomy as ho
from lorentz_holonomy.families import default_point

samples = {
    "Cahen-Wallach": ("x1^2 + 2*x2^2", None),
    "d_v^2 H != 0": ("v^2 + x1^2 + 2*x2^2", None),
    "flat": ("0", None),
    "A = (x2^2, 0)": ("x1^2*u", ["x2^2", "0"]),
}
for label, (H, A) in samples.items():
    m = WalkerMetric.build(2, parse_expr(H), A=None if A is None else [parse_expr(a) for a in A])
    rep = ho.infinitesimal_holonomy(m, default_point(m))
    print(f"{label:16s} dim={rep.dim} type={rep.type} orders={rep.dims_by_order}")

# hand-built subalgebras of sim(2)
n = 2
p, q = ho.basis_vector(n, "p"), ho.basis_vector(n, "q")
e1, e2 = ho.basis_vector(n, 1), ho.basis_vector(n, 2)
for label, gens in {
    "p^E": [ho.wedge(p, e1), ho.wedge(p, e2)],
    "R p^q + p^E": [ho.wedge(p, q), ho.wedge(p, e1), ho.wedge(p, e2)],
    "so(2) + p^E": [ho.wedge(e1, e2), ho.wedge(p, e1)],
}.items():
    rep = ho.build_report(gens, n)
    print(f"{label:16s} dim={rep.dim} type={rep.type}")
