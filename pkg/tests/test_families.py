import pytest

from lorentz_holonomy import families as fam
from lorentz_holonomy.symexpr import ExprParseError, coord, parse_expr
from lorentz_holonomy.walker import DimensionTooSmall, riemann


@pytest.mark.parametrize("f", fam.standard_families(), ids=lambda f: f"{f.name}-{f.params}")
def test_expectations_hold(f):
    failed = [name for name, ok in f.run() if not ok]
    assert not failed


def test_pp_wave_rejects_v():
    with pytest.raises(fam.VDependence):
        fam.pp_wave(2, parse_expr("v*x1"))
    with pytest.raises(ExprParseError):
        fam.pp_wave(2, "v*x1")


def test_pp_wave_flat():
    f = fam.pp_wave(2, "0")
    assert riemann(f.metric).is_zero()


def test_case_I_dependence():
    with pytest.raises(fam.BadDependence):
        fam.recurrent_case_I(2, "x1^2*x2")


def test_case_II_preconditions():
    with pytest.raises(fam.Lambda2Zero):
        fam.recurrent_case_II(2, [1, 0])
    with pytest.raises(fam.OrderingViolation):
        fam.recurrent_case_II(2, [1, 2])
    with pytest.raises(DimensionTooSmall):
        fam.recurrent_case_II(1, [1])


def test_two_symmetric_preconditions():
    with pytest.raises(fam.ZeroHMatrix):
        fam.two_symmetric(2, [0, 0])
    with pytest.raises(fam.AsymmetricF):
        fam.two_symmetric(2, [1, 2], [[0, 1], [2, 0]])
    with pytest.raises(fam.OrderingViolation):
        fam.two_symmetric(2, [2, 1])


def test_conformally_recurrent_preconditions():
    with pytest.raises(fam.TraceNotZero):
        fam.conformally_recurrent(2, [1, 1])
    with pytest.raises(DimensionTooSmall):
        fam.conformally_recurrent(1, [0])


def test_case_II_constant_F_is_cahen_wallach():
    a = fam.recurrent_case_II(2, [2, 1], F=None).metric
    b = fam.cahen_wallach(2, [2, 1]).metric
    assert a.H == b.H


def test_build_family_from_params():
    f = fam.build_family("walker-II", {"n": 3, "lambda": [3, -2, 1]})
    assert f.metric.n == 3 and f.metric.functions == ("F",)
    with pytest.raises(fam.FamilyError):
        fam.build_family("cahen-wallach", {"n": 2})
    with pytest.raises(fam.FamilyError):
        fam.build_family("nope", {"n": 2})


# -- coordinate change removing linear terms ------------------------------------------------------

@pytest.mark.parametrize("H", [
    "x1^3*u + u^2*x2 + 3*x3",
    "x1^2*F(u) + (u^3 - u)*x2 + x3*u",
])
def test_linear_terms_removed(H):
    functions = ("F",) if "F(" in H else ()
    m = fam.pp_wave(3, H, functions).metric
    m2, b = fam.remove_linear_terms(m)
    assert b[1] == parse_expr("0")
    for i in (2, 3):
        assert not m2.H.diff(f"x{i}")
    # the x1 part is untouched, h and A keep the pp-wave form
    assert m2.H.diff("x1") == m.H.diff("x1")
    assert m2.h_is_identity() and all(not a for a in m2.A)
    # curvature blocks agree up to the coordinate change (T is unchanged here)
    from lorentz_holonomy.decomp import decompose_curvature

    T1, T2 = decompose_curvature(m).T, decompose_curvature(m2).T
    assert all(T1[i, j] == T2[i, j] for i in range(3) for j in range(3))


def test_linear_terms_need_u_only():
    m = fam.pp_wave(2, "x1^2 + x1*x2").metric
    with pytest.raises(fam.BadDependence):
        fam.remove_linear_terms(m)


def test_default_point_jets():
    m = fam.conformally_recurrent(2, [1, -1]).metric
    p = fam.default_point(m)
    assert set(p.jets) == {0, 1} and len(p.jets[0]) >= 5
    assert coord("x2").eval(p) == 2
