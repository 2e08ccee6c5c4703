import itertools
from fractions import Fraction

import pytest

from lorentz_holonomy import families as fam
from lorentz_holonomy import holonomy as ho
from lorentz_holonomy.symexpr import InsufficientJet, JetPoint, ZERO, coord, parse_expr
from lorentz_holonomy.walker import WalkerMetric

N2 = 2
p, q = ho.basis_vector(N2, "p"), ho.basis_vector(N2, "q")
e1, e2 = ho.basis_vector(N2, 1), ho.basis_vector(N2, 2)


def apply(A, z):
    return [sum(A[r][c] * z[c] for c in range(len(z))) for r in range(len(A))]


# -- wedge ------------------------------------------------------------------------------------

def test_wedge_pq_on_p():
    assert apply(ho.wedge(p, q), p) == [-x for x in p]


def test_wedge_self_is_zero():
    assert all(x == 0 for row in ho.wedge(e1, e1) for x in row)


def test_wedge_e1_e2_rotation():
    A = ho.wedge(e1, e2)
    # Z -> <e1, Z> e2 - <e2, Z> e1
    assert apply(A, e1) == e2
    assert apply(A, e2) == [-x for x in e1]
    assert apply(A, p) == [0] * 4 and apply(A, q) == [0] * 4


def test_wedge_is_skew():
    vecs = [p, q, e1, e2, [1, 2, -1, 3]]
    eta = ho.witt_eta(2)
    for X, Y in itertools.product(vecs, repeat=2):
        assert ho.is_skew(ho.wedge(X, Y), eta)


# -- closure and classification fixtures -------------------------------------------------------

def test_lie_closure_so3():
    gens = [ho.wedge(e1, e2)]
    assert len(ho.lie_closure(gens)) == 1
    n = 3
    e = [ho.basis_vector(n, i) for i in (1, 2, 3)]
    alg = ho.lie_closure([ho.wedge(e[0], e[1]), ho.wedge(e[1], e[2])])
    assert len(alg) == 3 and ho.is_closed(alg)


def test_type_II_pE():
    rep = ho.build_report([ho.wedge(p, e1), ho.wedge(p, e2)], 2)
    assert rep.type == "II" and rep.dim == 2 and not rep.h_part


def test_type_I():
    rep = ho.build_report([ho.wedge(p, q), ho.wedge(p, e1), ho.wedge(p, e2)], 2)
    assert rep.type == "I" and rep.has_pq


def test_type_II_full_so_n():
    n = 3
    P = ho.basis_vector(n, "p")
    e = [ho.basis_vector(n, i) for i in (1, 2, 3)]
    gens = [ho.wedge(a, b) for a, b in itertools.combinations(e, 2)] + [ho.wedge(P, x) for x in e]
    rep = ho.build_report(gens, n)
    assert rep.type == "II" and len(rep.h_part) == 3 and rep.dim == 6


def test_type_III_over_so2():
    B = ho.so_generators(2)[0]
    rep = ho.build_report([ho.sim_element(2, c=1, B=B), ho.wedge(p, e1), ho.wedge(p, e2)], 2)
    assert rep.type == "III"
    assert rep.phi is not None and any(rep.phi)
    assert ho.check_phi_psi_conditions(rep)


def test_type_III_with_zero_phi_reduces_to_II():
    B = ho.so_generators(2)[0]
    rep = ho.build_report([ho.sim_element(2, c=0, B=B), ho.wedge(p, e1), ho.wedge(p, e2)], 2)
    assert rep.type == "II" and rep.phi is None
    assert ho.check_phi_psi_conditions(rep)


def test_fake_type_III_over_so3_fails():
    n = 3
    P = ho.basis_vector(n, "p")
    gens = [ho.sim_element(n, c=1, B=B) for B in ho.so_generators(n)]
    gens += [ho.wedge(P, ho.basis_vector(n, i)) for i in (1, 2, 3)]
    rep = ho.build_report(gens, n, close=False)
    assert rep.type is None
    assert not ho.check_phi_psi_conditions(rep)
    with pytest.raises(ho.NotClosedUnderBracket):
        ho.classify_type(rep)


def test_type_IV():
    n = 3
    P = ho.basis_vector(n, "p")
    B = [[0, -1, 0], [1, 0, 0], [0, 0, 0]]
    gens = [ho.sim_element(n, B=B, w=[0, 0, 1])]
    gens += [ho.wedge(P, ho.basis_vector(n, i)) for i in (1, 2)]
    rep = ho.build_report(gens, n)
    assert rep.type == "IV"
    assert rep.pE_part == 2 and len(rep.E2) == 1
    assert ho.check_phi_psi_conditions(rep)


def test_irreducible_and_trivial():
    basis = [p, e1, e2, q]
    full = [ho.wedge(a, b) for a, b in itertools.combinations(basis, 2)]
    assert ho.build_report(full, 2).type == ho.IRREDUCIBLE
    # two non-commuting boosts already generate everything
    assert ho.build_report([ho.wedge(p, e1), ho.wedge(q, e1), ho.wedge(e1, e2)], 2).dim == 6
    assert ho.build_report([], 2).type == ho.TRIVIAL


def test_decomposable():
    # so(2) alone fixes p and q
    assert ho.build_report([ho.wedge(e1, e2)], 2).type == ho.DECOMPOSABLE
    # p^e1 alone leaves e2 as a flat factor
    assert ho.build_report([ho.wedge(p, e1)], 2).type == ho.DECOMPOSABLE
    # so(2) conjugated by a null rotation: it now has a p^E component
    # but still fixes the Lorentzian plane spanned by p and the new q
    from lorentz_holonomy import _linalg as la

    S = ho.sim_element(2, w=[1, 0])
    S = la.matadd(la.identity(4), S)  # exp of a nilpotent p^w, truncated exactly
    S = la.matadd(S, la.matscale(la.matmul(ho.sim_element(2, w=[1, 0]), ho.sim_element(2, w=[1, 0])), Fraction(1, 2)))
    A = la.matmul(la.matmul(S, ho.wedge(e1, e2)), la.inverse(S))
    rep = ho.build_report([A], 2)
    assert any(rep.basis[0][r][3] for r in (1, 2))
    assert rep.type == ho.DECOMPOSABLE


def test_no_invariant_line():
    rep = ho.build_report([ho.wedge(q, e1)], 2)
    assert rep.type == ho.NO_LINE and not rep.in_sim


# -- computed algebras ------------------------------------------------------------------------------

def pt(n, **jets):
    return JetPoint({"v": 1, "u": 1, **{f"x{i}": i for i in range(1, n + 1)}},
                    {int(k[1:]): v for k, v in jets.items()})


def test_flat_holonomy_trivial():
    m = WalkerMetric.build(2, ZERO)
    assert ho.infinitesimal_holonomy(m, pt(2)).type == ho.TRIVIAL


def test_pp_wave_distinct_lambdas_pE():
    m = fam.cahen_wallach(3, [3, 2, -1]).metric
    rep = ho.infinitesimal_holonomy(m, pt(3))
    assert rep.type == "II" and rep.dim == 3 and rep.pE_part == 3
    assert all(ho.is_skew(A, rep.eta) for A in rep.basis)


def test_case_I_one_dimensional():
    m = fam.recurrent_case_I(2, "x1^2*F(u)", ("F",)).metric
    rep = ho.infinitesimal_holonomy(m, pt(2, F0=[2, 3, 5, 7, 11]))
    assert rep.dim == 1 and rep.pE_part == 1
    span = ho.build_report([ho.wedge(p, e1)], 2, close=False)
    assert rep.basis == span.basis
    assert rep.type == ho.DECOMPOSABLE


def test_monotone_and_stabilized():
    m = WalkerMetric.build(2, parse_expr("v*x1^2 + x2^3*u + v^2*x2"))
    rep = ho.infinitesimal_holonomy(m, pt(2), order=3, escalate=False)
    assert rep.dims_by_order == sorted(rep.dims_by_order)
    assert all(A[r][0] == 0 for A in rep.basis for r in range(1, 4))


def test_insufficient_jet():
    m = fam.recurrent_case_II(2, [2, 1]).metric
    with pytest.raises(InsufficientJet):
        ho.infinitesimal_holonomy(m, pt(2, F0=[1, 2]))


def test_non_positive_h():
    x1 = coord("x1")
    m = WalkerMetric.build(2, ZERO, h=[[x1, ZERO], [ZERO, x1]])
    with pytest.raises(ho.NonPositiveDefiniteH):
        ho.infinitesimal_holonomy(m, JetPoint({"x1": -1}))


def test_non_identity_h_uses_gram():
    x1, x2 = coord("x1"), coord("x2")
    h = [[1 + x2 ** 2, x1], [x1, 2 + x1 ** 2]]
    m = WalkerMetric.build(2, x1 * x2, h=h)
    rep = ho.infinitesimal_holonomy(m, JetPoint({"x1": 1, "x2": 1, "u": 0}), order=1)
    assert rep.gram != [1, 1]
    assert all(ho.is_skew(A, rep.eta) for A in rep.basis)
    assert rep.preserves_line_p()
    assert rep.h_part  # h is curved, so the so(n) part is nonzero


def test_env_cap(monkeypatch):
    monkeypatch.setenv("WALKER_MAX_ORDER", "1")
    m = WalkerMetric.build(2, parse_expr("x1^4*u"))
    rep = ho.infinitesimal_holonomy(m, pt(2), order=3)
    assert rep.order_used == 1
    monkeypatch.setenv("WALKER_MAX_ORDER", "x")
    with pytest.raises(ValueError):
        ho.infinitesimal_holonomy(m, pt(2))
