import itertools
import random
from fractions import Fraction

import pytest
import sympy as sp

from lorentz_holonomy.symexpr import ONE, ZERO, DenomExpr, Expr, coord, formal, parse_expr
from lorentz_holonomy.walker import (
    DimensionTooSmall,
    NotWalkerForm,
    SingularMetric,
    WalkerMetric,
    adapted_frame,
    christoffel,
    covariant_derivative,
    inverse_metric,
    metric_tensor,
    nabla_riemann,
    pullback,
    ricci_and_scalar,
    riemann,
    weyl_general,
    weyl_walker,
)

from conftest import random_walker, to_sympy

P = parse_expr


def pp(n, H, functions=()):
    return WalkerMetric.build(n, P(H, list(functions) or None), functions=functions)


def suite():
    rng = random.Random(7)
    ms = [
        pp(2, "0"),
        pp(2, "x1^2*x2 - u*x2^3 + x1*u^2"),
        pp(3, "F0(u)*(2*x1^2 + x2^2 - x3^2)", ["F0"]),
        random_walker(rng, 2),
        random_walker(rng, 3),
        random_walker(rng, 2, h_diag=[1 + coord("x1") ** 2, 1 + coord("u") ** 2], A=False),
    ]
    return ms


SUITE = suite()


def val(x):
    return x if x else ZERO


# -- metric and inverse -----------------------------------------------------------------------

def test_metric_tensor_layout():
    m = pp(2, "x1*x2 + u")
    g = metric_tensor(m)
    assert g[0, 3] == ONE and g[3, 0] == ONE
    assert g[3, 3] == m.H
    assert g[1, 1] == ONE and g[1, 2] == ZERO
    m = WalkerMetric.build(2, ZERO, A=[coord("x2"), ZERO])
    assert metric_tensor(m)[1, 3] == coord("x2")
    assert metric_tensor(m)[3, 1] == coord("x2")
    assert metric_tensor(m)[2, 3] == ZERO
    assert metric_tensor(pp(2, "0"))[3, 3] == ZERO


def test_inverse_metric_pp_wave():
    m = pp(3, "x1^2 + u*x3")
    gi = inverse_metric(m)
    assert gi[0, 4] == ONE
    assert gi[0, 0] == -m.H
    assert all(gi[i, j] == (ONE if i == j else ZERO) for i in range(1, 4) for j in range(1, 4))
    assert inverse_metric(pp(2, "0"))[0, 0] == ZERO


@pytest.mark.parametrize("m", SUITE, ids=lambda m: repr(m)[:40])
def test_inverse_is_inverse(m):
    g, gi = metric_tensor(m), inverse_metric(m)
    N = m.dim
    for a in range(N):
        for b in range(N):
            s = ZERO
            for c in range(N):
                if gi[a, c] and g[c, b]:
                    s = gi[a, c] * g[c, b] + s
            assert s == (ONE if a == b else ZERO)


def test_singular_and_non_walker():
    x1 = coord("x1")
    with pytest.raises(SingularMetric):
        inverse_metric(WalkerMetric.build(2, ZERO, h=[[x1, x1], [x1, x1]]))
    with pytest.raises(NotWalkerForm):
        WalkerMetric.build(2, ZERO, A=[coord("v"), ZERO])
    with pytest.raises(ValueError):
        WalkerMetric.build(2, ZERO, h=[[ONE, x1], [ZERO, ONE]])


def test_adapted_frame_gram():
    rng = random.Random(3)
    m = random_walker(rng, 2, h_diag=[1 + coord("x2") ** 2, ONE + coord("u")])
    fr = adapted_frame(m)
    g = metric_tensor(m).comps
    N = m.dim
    for A, B in itertools.product(range(N), repeat=2):
        s = Expr.sum(fr.vectors[A, a] * fr.vectors[B, b] * g[a, b]
                     for a in range(N) for b in range(N))
        assert s == fr.gram[A, B]


# -- Christoffel / Riemann against a sympy oracle -------------------------------------------------

def sympy_curvature(m):
    N = m.dim
    X = [sp.Symbol(x) for x in m.coords]
    g = sp.Matrix(N, N, lambda a, b: to_sympy(metric_tensor(m)[a, b]))
    gi = sp.simplify(g.inv())
    Gam = [[[sp.simplify(sum(gi[r, s] * (sp.diff(g[s, b], X[c]) + sp.diff(g[s, c], X[b])
                                         - sp.diff(g[b, c], X[s])) for s in range(N)) / 2)
             for c in range(N)] for b in range(N)] for r in range(N)]
    # standard R^r_{s a b} = d_a G^r_bs - d_b G^r_as + G^r_al G^l_bs - G^r_bl G^l_as
    def Rup(r, s, a, b):
        return (sp.diff(Gam[r][b][s], X[a]) - sp.diff(Gam[r][a][s], X[b])
                + sum(Gam[r][a][l] * Gam[l][b][s] - Gam[r][b][l] * Gam[l][a][s] for l in range(N)))
    R = {}
    for a, b, c, d in itertools.product(range(N), repeat=4):
        if a < b and c < d:
            R[a, b, c, d] = sp.simplify(sum(g[d, e] * Rup(e, c, a, b) for e in range(N)))
    return Gam, R


def as_sympy(x):
    if isinstance(x, DenomExpr):
        num, den = x.as_pair()
        return to_sympy(num) / to_sympy(den)
    return to_sympy(x) if x else sp.Integer(0)


@pytest.mark.parametrize("idx", [1, 3, 5])
def test_christoffel_and_riemann_match_sympy(idx):
    m = SUITE[idx]
    Gam, R = sympy_curvature(m)
    G = christoffel(m)
    N = m.dim
    for r, b, c in itertools.product(range(N), repeat=3):
        assert sp.simplify(as_sympy(G[r, b, c]) - Gam[r][b][c]) == 0
    Rm = riemann(m)
    for key, expect in R.items():
        assert sp.simplify(as_sympy(Rm[key]) - expect) == 0


def test_pp_wave_christoffel_closed_form():
    m = pp(2, "x1^3*u + x2^2*x1 + u^2")
    G = christoffel(m)
    H = m.H
    half = Fraction(1, 2)
    for i in (1, 2):
        assert G[0, i, 3] == H.diff(f"x{i}") * half
        assert G[i, 3, 3] == -H.diff(f"x{i}") * half
    assert G[0, 3, 3] == H.diff("u") * half
    listed = {(0, 1, 3), (0, 3, 1), (0, 2, 3), (0, 3, 2), (1, 3, 3), (2, 3, 3), (0, 3, 3)}
    for idx in itertools.product(range(4), repeat=3):
        if idx not in listed:
            assert not G[idx]


def test_pp_wave_riemann_sign():
    m = pp(2, "x1^2*u + 3*x1*x2")
    R = riemann(m)
    H = m.H
    for i, j in itertools.product((1, 2), repeat=2):
        assert R[3, i, 3, j] == H.diff(f"x{i}").diff(f"x{j}") * Fraction(1, 2)


def test_flat_vanishes():
    m = pp(3, "0")
    assert riemann(m).is_zero()
    assert all(not x for x in christoffel(m).flat)
    Ric, s = ricci_and_scalar(m)
    assert Ric.is_zero() and not s
    assert weyl_general(m).is_zero() and weyl_walker(m).is_zero()


# -- structural identities ----------------------------------------------------------------------

@pytest.mark.parametrize("m", SUITE, ids=lambda m: repr(m)[:40])
def test_riemann_symmetries_and_first_bianchi(m):
    R = riemann(m).comps
    N = m.dim
    for a, b, c, d in itertools.product(range(N), repeat=4):
        x = R[a, b, c, d]
        assert x == -R[b, a, c, d]
        assert x == -R[a, b, d, c]
        assert x == R[c, d, a, b]
        assert not (x + R[b, c, a, d] + R[c, a, b, d])


@pytest.mark.parametrize("m", SUITE[:4] + [SUITE[5]], ids=lambda m: repr(m)[:40])
def test_second_bianchi(m):
    dR = nabla_riemann(m, 1).comps
    N = m.dim
    for e, a, b, c, d in itertools.product(range(N), repeat=5):
        assert not (dR[e, a, b, c, d] + dR[a, b, e, c, d] + dR[b, e, a, c, d])


@pytest.mark.parametrize("m", SUITE, ids=lambda m: repr(m)[:40])
def test_metric_is_parallel(m):
    assert covariant_derivative(metric_tensor(m), m).is_zero()


@pytest.mark.parametrize("m", SUITE, ids=lambda m: repr(m)[:40])
def test_weyl_traceless_and_equal(m):
    W = weyl_general(m)
    gi = inverse_metric(m)
    N = m.dim
    for b, d in itertools.product(range(N), repeat=2):
        s = ZERO
        for a, c in itertools.product(range(N), repeat=2):
            if gi[a, c] and W[a, b, c, d]:
                s = gi[a, c] * W[a, b, c, d] + s
        assert not s
    assert weyl_walker(m).equals(W)


def test_weyl_needs_dimension_four():
    m = pp(1, "x1^2*u")
    with pytest.raises(DimensionTooSmall):
        weyl_general(m)


def test_ricci_pp_wave():
    m = pp(3, "x1^2*u + x2^4 - x3*x1")
    Ric, s = ricci_and_scalar(m)
    lap = Expr.sum(m.H.diff(f"x{i}").diff(f"x{i}") for i in (1, 2, 3))
    assert Ric[4, 4] == lap * Fraction(-1, 2)
    assert not s
    assert all(not Ric[a, b] for a, b in itertools.product(range(5), repeat=2) if (a, b) != (4, 4))


def test_ricci_conformal_family_metric():
    # Sum lambda_i = 0: s = 0 and Ric_uu = -n a(u)
    m = pp(2, "a(u)*(x1^2 + x2^2) + F(u)*(x1^2 - x2^2)", ["a", "F"])
    Ric, s = ricci_and_scalar(m)
    assert not s
    assert Ric[3, 3] == formal(0) * -2
    assert sum(1 for _, x in Ric.nonzero_items()) == 1


def test_pp_wave_weyl_is_tracefree_hessian():
    m = pp(3, "x1^2*x2 + u*x3^2 - x1*x3*u")
    W = weyl_general(m)
    H = m.H
    lap = Expr.sum(H.diff(f"x{k}").diff(f"x{k}") for k in (1, 2, 3))
    for i, j in itertools.product((1, 2, 3), repeat=2):
        tf = H.diff(f"x{i}").diff(f"x{j}") - (lap * Fraction(1, 3) if i == j else ZERO)
        assert W[4, i, 4, j] == tf * Fraction(1, 2)


# -- coordinate change -------------------------------------------------------------------------------

def test_pullback_identity_change():
    m = SUITE[3]
    g = pullback(m, {})
    assert all(g[a, b] == metric_tensor(m)[a, b] for a in range(4) for b in range(4))
