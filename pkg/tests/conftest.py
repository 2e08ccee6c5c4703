import os
import random
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lorentz_holonomy.symexpr import Expr, coord, formal

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=25, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

VARS = ["v", "x1", "x2", "u"]

coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def monomials(draw, with_formal=True):
    m = Expr.const(draw(coefficients))
    for name in VARS:
        m = m * coord(name) ** draw(st.integers(0, 2))
    if with_formal and draw(st.booleans()):
        m = m * formal(draw(st.integers(0, 1)), draw(st.integers(0, 2)))
    return m


def exprs(with_formal=True, max_terms=4):
    return st.lists(monomials(with_formal), max_size=max_terms).map(Expr.sum)


def random_poly(rng: random.Random, variables, degree=4, terms=4):
    """Random polynomial with small integer coefficients (not identically zero)."""
    out = Expr.const(0)
    while not out:
        for _ in range(terms):
            m = Expr.const(rng.randint(-3, 3))
            left = degree
            for x in variables:
                k = rng.randint(0, left)
                left -= k
                m = m * coord(x) ** k
            out = out + m
    return out


def random_walker(rng: random.Random, n: int, *, A=True, h_diag=None, v_dependent=True):
    """Random Walker metric; ``h_diag`` gives a diagonal h (None means identity)."""
    from lorentz_holonomy.walker import WalkerMetric

    xs = [f"x{i}" for i in range(1, n + 1)]
    Hvars = (["v"] if v_dependent else []) + xs + ["u"]
    H = random_poly(rng, Hvars, degree=3, terms=4)
    Avec = [random_poly(rng, xs + ["u"], degree=2, terms=2) for _ in range(n)] if A else None
    h = None
    if h_diag is not None:
        h = [[h_diag[i] if i == j else Expr.const(0) for j in range(n)] for i in range(n)]
    return WalkerMetric.build(n, H, h=h, A=Avec)


def to_sympy(e, functions=()):
    """Convert an Expr into a sympy expression (used only as a test oracle)."""
    import sympy as sp

    from lorentz_holonomy.symexpr import _slot_name

    u = sp.Symbol("u")
    out = sp.Integer(0)
    for c, pairs in e.terms():
        term = sp.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sp.Integer(c)
        for slot, k in pairs:
            name = _slot_name(slot)
            if "(" in name:
                base = name.split("(")[0]
                primes = len(base) - len(base.rstrip("'"))
                f = sp.Function(base.rstrip("'"))(u)
                term *= (sp.diff(f, u, primes) if primes else f) ** k
            else:
                term *= sp.Symbol(name) ** k
        out += term
    return out


# -- acceptance reporting ------------------------------------------------------------------
# Tests marked ``@pytest.mark.criterion(k, "text")`` get one summary line each.

import pytest  # noqa: E402

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k, text): acceptance criterion k")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    k, text = mark.args
    ok, _ = _CRITERIA.get(k, (True, text))
    _CRITERIA[k] = (ok and not rep.failed, text)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        ok, text = _CRITERIA[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {text}")
