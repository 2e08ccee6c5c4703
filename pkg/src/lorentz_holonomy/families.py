"""Metric families with their predicted properties attached.

Every constructor returns a :class:`Family`: the Walker metric plus a list of
:class:`Expectation` objects.  Expectations are evaluated lazily, so the
families double as regression fixtures for the conditions and holonomy code.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .symexpr import ONE, ZERO, Expr, JetPoint, _coord_slot, _encode, coord, formal, parse_expr
from .walker import DimensionTooSmall, WalkerMetric, pullback, walker_from_components


class FamilyError(ValueError):
    pass


class VDependence(FamilyError):
    pass


class BadDependence(FamilyError):
    pass


class OrderingViolation(FamilyError):
    pass


class Lambda2Zero(FamilyError):
    pass


class ZeroHMatrix(FamilyError):
    pass


class AsymmetricF(FamilyError):
    pass


class TraceNotZero(FamilyError):
    pass


@dataclass
class Expectation:
    name: str
    check: Callable[[], bool]
    _result: bool | None = field(default=None, repr=False)

    def evaluate(self) -> bool:
        if self._result is None:
            self._result = bool(self.check())
        return self._result


@dataclass
class Family:
    name: str
    params: dict
    metric: WalkerMetric
    expectations: list = field(default_factory=list)
    frozen_constant: tuple = ()

    def expect(self, name: str, check: Callable[[], bool]) -> None:
        self.expectations.append(Expectation(name, check))

    def run(self) -> list[tuple[str, bool]]:
        return [(e.name, e.evaluate()) for e in self.expectations]

    def all_pass(self) -> bool:
        return all(ok for _, ok in self.run())


def default_point(m: WalkerMetric, jet_order: int = 8) -> JetPoint:
    """Fixed generic point: x^i = i, u = 1, v = 1, jets 2, 3, 5, 7, ..."""
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
    coords = {"v": 1, "u": 1, **{f"x{i}": i for i in range(1, m.n + 1)}}
    jets = {j: primes[j:j + jet_order + 1] for j in range(len(m.functions))}
    return JetPoint(coords, jets)


def _x(i: int) -> Expr:
    return coord(f"x{i}")


def _quadratic(weights: Sequence, n: int) -> Expr:
    return Expr.sum(_x(i + 1) ** 2 * Expr.const(Fraction(w)) for i, w in enumerate(weights[:n]))


def _as_fracs(values) -> list[Fraction]:
    return [Fraction(x) for x in values]


# -- checks used by the expectations --------------------------------------------------

def _verdict(t_name: str, m: WalkerMetric, frozen=()):
    from .conditions import named_tensor, recurrence_factor

    return recurrence_factor(named_tensor(m, t_name), m, frozen=frozen).verdict


def _holonomy(m: WalkerMetric):
    from .holonomy import infinitesimal_holonomy

    return infinitesimal_holonomy(m, default_point(m))


def _holonomy_is(m: WalkerMetric, dim: int, kind: str) -> bool:
    rep = _holonomy(m)
    return rep.dim == dim and rep.type == kind and rep.preserves_line_p()


def _is_pE(m: WalkerMetric) -> bool:
    rep = _holonomy(m)
    return rep.dim == m.n and rep.pE_part == m.n and rep.type == "II"


# -- constructors ---------------------------------------------------------------------

def pp_wave(n: int, H, functions: Sequence[str] = ()) -> Family:
    """``2 dv du + sum (dx^i)^2 + H (du)^2`` with H free of v."""
    if isinstance(H, str):
        H = parse_expr(H, list(functions) if functions else None, forbid=("v",))
    if H.depends_on("v"):
        raise VDependence("a pp-wave needs H independent of v")
    m = WalkerMetric.build(n, H, functions=functions)
    fam = Family("pp-wave", {"n": n, "H": H.to_string(functions or None)}, m)
    from .conditions import is_pp_wave

    fam.expect("pp-wave form", lambda: is_pp_wave(m))
    fam.expect("g parallel", lambda: _verdict("g", m) == "parallel")
    fam.expect("du (x) du parallel", lambda: _verdict("tau2", m) == "parallel")
    fam.expect("holonomy inside p^E", lambda: _holonomy(m).pE_part == _holonomy(m).dim)
    return fam


def cahen_wallach(n: int, lam: Sequence) -> Family:
    """pp-wave with ``H = sum lam_i (x^i)^2``."""
    lam = _as_fracs(lam)
    if len(lam) != n:
        raise FamilyError("need n values of lambda")
    fam = pp_wave(n, _quadratic(lam, n))
    fam.name = "cahen-wallach"
    fam.params = {"n": n, "lambda": [str(x) for x in lam]}
    m = fam.metric
    nonzero = sum(1 for x in lam if x)
    fam.expect("R parallel", lambda: _verdict("R", m) in ("parallel", "zero-tensor"))
    if nonzero == n:
        fam.expect("holonomy = p^E", lambda: _is_pE(m))
    elif nonzero == 0:
        fam.expect("holonomy trivial", lambda: _holonomy(m).dim == 0)
    else:
        fam.expect("holonomy decomposable",
                   lambda: _holonomy_is(m, nonzero, "decomposable"))
    return fam


def recurrent_case_I(n: int, H1, functions: Sequence[str] = ()) -> Family:
    """``2 dv du + sum (dx^i)^2 + H(x^1, u) (du)^2``."""
    if isinstance(H1, str):
        H1 = parse_expr(H1, list(functions) if functions else None, forbid=("v",))
    bad = {s for s in H1.variables() if "(" not in s} - {"x1", "u"}
    if bad:
        raise BadDependence(f"H may depend on x1 and u only, found {sorted(bad)}")
    m = WalkerMetric.build(n, H1, functions=functions)
    fam = Family("walker-I", {"n": n, "H": H1.to_string(functions or None)}, m)
    d11 = H1.diff("x1").diff("x1")
    if d11.is_constant():
        fam.expect("R parallel", lambda: _verdict("R", m) in ("parallel", "zero-tensor"))
    else:
        fam.expect("R recurrent", lambda: _verdict("R", m) == "recurrent")
        fam.expect("theta = d ln|d1^2 H|", lambda: _theta_is_log_derivative(m, d11))
    if n >= 2 and d11:
        fam.expect("locally decomposable", lambda: _holonomy_is(m, 1, "decomposable"))
    return fam


def _theta_is_log_derivative(m: WalkerMetric, f: Expr) -> bool:
    """``theta_mu * f == d_mu f`` for every coordinate."""
    from .conditions import named_tensor, recurrence_factor

    rep = recurrence_factor(named_tensor(m, "R"), m)
    if rep.theta is None:
        return False
    return all(num * f == den * f.diff(x) for (num, den), x in zip(rep.theta, m.coords))


def recurrent_case_II(n: int, lam: Sequence, F: str | None = "F") -> Family:
    """``2 dv du + sum (dx^i)^2 + F(u) sum lam_i (x^i)^2 (du)^2``.

    ``F`` names the formal function; ``None`` uses F = 1.
    """
    lam = _as_fracs(lam)
    if n < 2:
        raise DimensionTooSmall("case II needs n >= 2")
    if len(lam) != n:
        raise FamilyError("need n values of lambda")
    if any(abs(lam[i]) < abs(lam[i + 1]) for i in range(n - 1)):
        raise OrderingViolation("need |lambda_1| >= ... >= |lambda_n|")
    if lam[1] == 0:
        raise Lambda2Zero("lambda_2 must be non-zero")
    functions = (F,) if F else ()
    amp = formal(0) if F else ONE
    m = WalkerMetric.build(n, amp * _quadratic(lam, n), functions=functions)
    fam = Family("walker-II", {"n": n, "lambda": [str(x) for x in lam], "F": F}, m,
                 frozen_constant=(0,) if F else ())
    if F:
        fam.expect("R recurrent", lambda: _verdict("R", m) == "recurrent")
        fam.expect("theta_u F = F', theta_k = 0", lambda: _theta_F(m))
        fam.expect("F' -> 0 gives R parallel", lambda: _verdict("R", m, frozen=(0,)) == "parallel")
    else:
        fam.expect("R parallel", lambda: _verdict("R", m) == "parallel")
    if all(lam):
        fam.expect("holonomy = p^E", lambda: _is_pE(m))
    else:
        fam.expect("locally decomposable", lambda: _holonomy(m).type == "decomposable")
    if n >= 2:
        if len(set(lam)) == 1:
            fam.expect("W = 0", lambda: _verdict("W", m) == "zero-tensor")
        else:
            fam.expect("W != 0", lambda: _verdict("W", m) != "zero-tensor")
    return fam


def _theta_F(m: WalkerMetric) -> bool:
    from .conditions import named_tensor, recurrence_factor

    rep = recurrence_factor(named_tensor(m, "R"), m)
    if rep.theta is None:
        return False
    u = m.dim - 1
    for mu, (num, den) in enumerate(rep.theta):
        if mu == u:
            # theta_u F^(0) = F^(1), with theta_u = num / den
            if num * formal(0) != den * formal(0, 1):
                return False
        elif num:
            return False
    return True


def two_symmetric(n: int, Hdiag: Sequence, Fsym: Sequence[Sequence] | None = None) -> Family:
    """``2 dv du + sum (dx^i)^2 + (H_ij u + F_ij) x^i x^j (du)^2``."""
    Hd = _as_fracs(Hdiag)
    if len(Hd) != n:
        raise FamilyError("need n diagonal entries")
    if not any(Hd):
        raise ZeroHMatrix("H_ij must be non-zero")
    if any(Hd[i] > Hd[i + 1] for i in range(n - 1)):
        raise OrderingViolation("need lambda_1 <= ... <= lambda_n")
    Fm = [[Fraction(x) for x in row] for row in (Fsym or [[0] * n for _ in range(n)])]
    if len(Fm) != n or any(len(r) != n for r in Fm):
        raise FamilyError("F_ij must be n x n")
    if any(Fm[i][j] != Fm[j][i] for i in range(n) for j in range(n)):
        raise AsymmetricF("F_ij must be symmetric")
    u = coord("u")
    H = Expr.sum(
        (u * Expr.const(Hd[i] if i == j else 0) + Expr.const(Fm[i][j])) * _x(i + 1) * _x(j + 1)
        for i in range(n) for j in range(n))
    m = WalkerMetric.build(n, H)
    fam = Family("two-symmetric", {"n": n, "Hdiag": [str(x) for x in Hd],
                                   "Fsym": [[str(x) for x in r] for r in Fm]}, m)
    from .conditions import is_two_symmetric

    fam.expect("nabla^2 R = 0 and nabla R != 0", lambda: bool(is_two_symmetric(m)))
    return fam


def conformally_recurrent(n: int, lam: Sequence, a: str = "formal") -> Family:
    """``2 dv du + sum (dx^i)^2 + (a(u) sum (x^i)^2 + F(u) sum lam_i (x^i)^2) (du)^2``.

    ``a`` is ``"formal"`` (independent function), ``"F"`` (a = F) or ``"zero"``.
    """
    lam = _as_fracs(lam)
    if n < 2:
        raise DimensionTooSmall("Weyl recurrence needs n + 2 >= 4")
    if len(lam) != n:
        raise FamilyError("need n values of lambda")
    if sum(lam) != 0:
        raise TraceNotZero("need sum lambda_i = 0")
    if a not in ("formal", "F", "zero"):
        raise FamilyError("a must be 'formal', 'F' or 'zero'")
    if a == "formal":
        functions, fa, fF = ("a", "F"), formal(0), formal(1)
    elif a == "F":
        functions, fa, fF = ("F",), formal(0), formal(0)
    else:
        functions, fa, fF = ("F",), ZERO, formal(0)
    jF = functions.index("F")
    H = fa * _quadratic([1] * n, n) + fF * _quadratic(lam, n)
    m = WalkerMetric.build(n, H, functions=functions)
    fam = Family("conf-recurrent", {"n": n, "lambda": [str(x) for x in lam], "a": a}, m,
                 frozen_constant=(jF,))
    if any(lam):
        fam.expect("W recurrent", lambda: _verdict("W", m) == "recurrent")
        fam.expect("F' -> 0 gives W parallel",
                   lambda: _verdict("W", m, frozen=(jF,)) == "parallel")
    else:
        fam.expect("W = 0", lambda: _verdict("W", m) == "zero-tensor")
    r_recurrent = a in ("F", "zero") or not any(lam)
    if r_recurrent:
        fam.expect("R recurrent", lambda: _verdict("R", m) in ("recurrent", "parallel"))
    else:
        fam.expect("R not recurrent", lambda: _verdict("R", m) == "not-recurrent")
    fam.expect("holonomy inside sim(n)", lambda: _holonomy(m).preserves_line_p())
    return fam


FAMILIES = {
    "pp-wave": pp_wave,
    "walker-I": recurrent_case_I,
    "walker-II": recurrent_case_II,
    "cahen-wallach": cahen_wallach,
    "two-symmetric": two_symmetric,
    "conf-recurrent": conformally_recurrent,
}


def build_family(name: str, params: dict) -> Family:
    """Construct a family from CLI-style parameters."""
    if name not in FAMILIES:
        raise FamilyError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    p = dict(params)
    n = p.pop("n", None)
    if n is None:
        raise FamilyError("params must include n")
    try:
        if name == "pp-wave":
            return pp_wave(n, p.get("H", "0"), tuple(p.get("formal_functions", ())))
        if name == "walker-I":
            return recurrent_case_I(n, p.get("H", "x1^3"), tuple(p.get("formal_functions", ())))
        if name == "walker-II":
            return recurrent_case_II(n, p["lambda"], p.get("F", "F"))
        if name == "cahen-wallach":
            return cahen_wallach(n, p["lambda"])
        if name == "two-symmetric":
            return two_symmetric(n, p["Hdiag"], p.get("Fsym"))
        return conformally_recurrent(n, p["lambda"], p.get("a", "formal"))
    except KeyError as exc:
        raise FamilyError(f"missing parameter {exc.args[0]!r} for {name}") from None


def standard_families() -> list[Family]:
    """The fixture set exercised by ``selftest``."""
    return [
        pp_wave(2, "0"),
        pp_wave(3, "x1^2*x2 + u*x3^3"),
        cahen_wallach(2, [1, 2]),
        cahen_wallach(3, [1, -2, 0]),
        recurrent_case_I(2, "x1^2*F(u)", ("F",)),
        recurrent_case_I(2, "x1^3"),
        recurrent_case_I(2, "x1^2"),
        recurrent_case_II(2, [2, 1]),
        recurrent_case_II(2, [1, 1]),
        recurrent_case_II(3, [3, -2, 0]),
        recurrent_case_II(2, [2, 1], F=None),
        two_symmetric(2, [0, 1]),
        two_symmetric(2, [1, 2], [[3, 0], [0, 4]]),
        conformally_recurrent(2, [1, -1]),
        conformally_recurrent(2, [1, -1], a="F"),
        conformally_recurrent(2, [1, -1], a="zero"),
        conformally_recurrent(2, [0, 0]),
    ]


# -- coordinate change removing linear terms ---------------------------------------------------

def _integrate_u(e: Expr) -> Expr:
    if e.has_formal():
        raise BadDependence("can only integrate polynomials in u")
    us = _coord_slot("u")
    out = {}
    for c, pairs in e.terms():
        if any(s != us for s, _ in pairs):
            raise BadDependence("G_i must depend on u only")
        k = dict(pairs).get(us, 0)
        out[_encode([(us, k + 1)])] = Fraction(c) / (k + 1)
    return Expr._make(out)


def remove_linear_terms(m: WalkerMetric) -> tuple[WalkerMetric, dict]:
    """Apply ``x^i = x~^i + b^i(u), v = v~ - sum b^j'(u) x~^j`` with ``2 b^j'' = G_j``.

    ``m`` must be a pp-wave with ``H = F(x^1, u) + sum_{i>=2} G_i(u) x^i`` and
    polynomial G_i; returns the transformed metric and the b^i.
    """
    n = m.n
    b = {1: ZERO}
    for i in range(2, n + 1):
        G = m.H.diff(f"x{i}")
        if any(G.depends_on(x) for x in m.coords if x != "u"):
            raise BadDependence(f"d_{i} H must depend on u only")
        b[i] = _integrate_u(_integrate_u(G * Fraction(1, 2)))
    sub = {f"x{i}": _x(i) + b[i] for i in range(1, n + 1)}
    sub["v"] = coord("v") - Expr.sum(b[j].diff("u") * _x(j) for j in range(1, n + 1))
    g = pullback(m, sub)
    return walker_from_components(n, g, m.functions), b
