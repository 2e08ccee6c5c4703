"""Parallel, recurrent and two-symmetric tensors of a Walker metric.

A tensor ``t`` is recurrent if ``nabla t = theta (x) t`` for a one-form theta.
Recurrence is decided as a polynomial identity on the whole chart by cross
multiplication, ``(nabla t)[mu, I] * t[J] == (nabla t)[mu, J] * t[I]``, so no
rational functions are ever formed.  When ``theta_mu`` is not a polynomial it
is returned as a reduced pair ``(numerator, denominator)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .symexpr import ONE, ZERO, DenomExpr, Expr
from .walker import (
    TensorField,
    WalkerMetric,
    _zeros,
    covariant_derivative,
    metric_tensor,
    nabla_riemann,
    outer,
    ricci_and_scalar,
    riemann,
    weyl_general,
)

PARALLEL = "parallel"
RECURRENT = "recurrent"
NOT_RECURRENT = "not-recurrent"
ZERO_TENSOR = "zero-tensor"


def _pair(x) -> tuple[Expr, Expr]:
    if isinstance(x, DenomExpr):
        return x.as_pair()
    return x, ONE


def reduce_quotient(num: Expr, den: Expr) -> tuple[Expr, Expr]:
    """Cancel exact divisibility, common monomial factors and rational content.

    The denominator comes back with positive leading coefficient and content 1.
    """
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return ZERO, ONE
    q = num.divide_exact(den)
    if q is not None:
        return q, ONE
    g = den.monomial_gcd()
    gn = num.monomial_gcd()
    common = _monomial_min(g, gn)
    if common != ONE:
        num = num.divide_exact(common)
        den = den.divide_exact(common)
    c = den.content()
    if c != 1:
        num = num.scale(Fraction(1) / c)
        den = den.scale(Fraction(1) / c)
    q = num.divide_exact(den)
    if q is not None:
        return q, ONE
    return num, den


def _monomial_min(a: Expr, b: Expr) -> Expr:
    from .symexpr import _decode, _encode

    (ma,) = a._t
    (mb,) = b._t
    da, db = dict(_decode(ma)), dict(_decode(mb))
    return Expr._make({_encode((s, min(e, db[s])) for s, e in da.items() if s in db): 1})


@dataclass
class RecurrenceReport:
    """Outcome of a recurrence test.

    ``theta[mu]`` is ``(numerator, denominator)`` with ``theta_mu =
    numerator / denominator``; a polynomial theta_mu has denominator 1.
    ``witness`` is ``(mu, I, J)`` where cross multiplication fails.
    """

    verdict: str
    theta: list | None = None
    witness: tuple | None = None
    pivot: tuple | None = None
    coords: tuple = ()

    @property
    def is_recurrent(self) -> bool:
        # parallel and vanishing tensors are recurrent with theta = 0
        return self.verdict in (PARALLEL, RECURRENT, ZERO_TENSOR)

    def theta_strings(self, names=None) -> dict | None:
        if self.theta is None:
            return None
        out = {}
        for x, (num, den) in zip(self.coords, self.theta):
            if den == ONE:
                out[x] = num.to_string(names)
            else:
                # kept as a pair so both parts re-parse with the expression grammar
                out[x] = {"numerator": num.to_string(names), "denominator": den.to_string(names)}
        return out

    def theta_is_closed(self) -> bool:
        """``d theta = 0``, checked exactly by clearing denominators."""
        if self.theta is None:
            return True
        k = len(self.theta)
        for a in range(k):
            for b in range(a + 1, k):
                na, da = self.theta[a]
                nb, db = self.theta[b]
                xa, xb = self.coords[a], self.coords[b]
                # d_a(nb/db) - d_b(na/da), times da^2 db^2
                lhs = (nb.diff(xa) * db - nb * db.diff(xa)) * da * da
                rhs = (na.diff(xb) * da - na * da.diff(xb)) * db * db
                if lhs != rhs:
                    return False
        return True

    def to_json(self, names=None) -> dict:
        out = {"verdict": self.verdict}
        if self.theta is not None:
            out["theta"] = self.theta_strings(names)
        if self.witness is not None:
            mu, I, J = self.witness
            out["witness"] = {"direction": self.coords[mu] if self.coords else mu,
                              "pivot": list(I), "index": list(J)}
        return out


def recurrence_factor(t: TensorField, m: WalkerMetric, *, frozen: Iterable[int] = (),
                      nabla_t: TensorField | None = None) -> RecurrenceReport:
    """Decide whether ``nabla t = theta (x) t``.

    ``frozen`` lists formal functions treated as constants (every derivative
    ``F_j^(k)``, k >= 1, set to zero) after differentiation.
    """
    frozen = tuple(frozen)
    if t.rank < 1:
        raise ValueError("recurrence needs a tensor of rank >= 1")
    coords = m.coords
    t = t.freeze(frozen)
    if t.is_zero():
        return RecurrenceReport(ZERO_TENSOR, coords=coords)
    dt = nabla_t if nabla_t is not None else covariant_derivative(t, m)
    dt = dt.freeze(frozen)
    N = m.dim
    if dt.is_zero():
        return RecurrenceReport(PARALLEL, theta=[(ZERO, ONE)] * N, coords=coords)

    items = list(t.nonzero_items())
    pivot, tp = items[0]
    support = {idx for idx, _ in items}
    theta = []
    for mu in range(N):
        row = dt.comps[mu]
        num = row[pivot]
        # components where t vanishes must have vanishing derivative
        for idx, x in np.ndenumerate(row):
            if x and idx not in support:
                return RecurrenceReport(NOT_RECURRENT, witness=(mu, pivot, idx), pivot=pivot,
                                        coords=coords)
        for idx, tx in items[1:]:
            if row[idx] * tp != num * tx:
                return RecurrenceReport(NOT_RECURRENT, witness=(mu, pivot, idx), pivot=pivot,
                                        coords=coords)
        n1, d1 = _pair(num)
        n2, d2 = _pair(tp)
        theta.append(reduce_quotient(n1 * d2, d1 * n2))
    return RecurrenceReport(RECURRENT, theta=theta, pivot=pivot, coords=coords)


def verify_recurrence(report: RecurrenceReport, t: TensorField, m: WalkerMetric,
                      frozen: Iterable[int] = ()) -> bool:
    """Re-check ``den_mu * (nabla t)[mu, I] == num_mu * t[I]`` for every component."""
    if report.theta is None:
        return report.verdict == ZERO_TENSOR and t.freeze(frozen).is_zero()
    t = t.freeze(frozen)
    dt = covariant_derivative(t, m).freeze(frozen)
    for mu, (num, den) in enumerate(report.theta):
        for idx, x in np.ndenumerate(t.comps):
            if dt.comps[(mu,) + idx] * den != x * num:
                return False
    return True


# -- named tensors ------------------------------------------------------------------

def tau(m: WalkerMetric) -> TensorField:
    """``tau = g(d_v, .) = du``."""
    N = m.dim
    c = _zeros(N)
    c[N - 1] = ONE
    return TensorField(c, "l")


def named_tensor(m: WalkerMetric, name: str) -> TensorField:
    if name == "R":
        return riemann(m)
    if name == "W":
        return weyl_general(m)
    if name == "Ric":
        return ricci_and_scalar(m)[0]
    if name == "g":
        return metric_tensor(m)
    if name == "tau2":
        t = tau(m)
        return outer(t, t)
    raise ValueError(f"unknown tensor {name!r}; use R, W, Ric, g or tau2")


def is_parallel(t: TensorField, m: WalkerMetric, frozen: Iterable[int] = ()) -> bool:
    return covariant_derivative(t, m).freeze(tuple(frozen)).is_zero()


@dataclass
class TwoSymmetryReport:
    two_symmetric: bool
    nabla_R_zero: bool
    nabla2_R_zero: bool

    def __bool__(self) -> bool:
        return self.two_symmetric

    def to_json(self) -> dict:
        return {"two_symmetric": self.two_symmetric, "nabla_R_zero": self.nabla_R_zero,
                "nabla2_R_zero": self.nabla2_R_zero}


def is_two_symmetric(m: WalkerMetric, frozen: Iterable[int] = ()) -> TwoSymmetryReport:
    frozen = tuple(frozen)
    d1 = nabla_riemann(m, 1).freeze(frozen).is_zero()
    d2 = nabla_riemann(m, 2).freeze(frozen).is_zero()
    return TwoSymmetryReport(d2 and not d1, d1, d2)


def weyl_recurrence(m: WalkerMetric, frozen: Iterable[int] = ()) -> RecurrenceReport:
    return recurrence_factor(weyl_general(m), m, frozen=frozen)


# -- symmetric bilinear forms ----------------------------------------------------------

@dataclass
class BilinearCandidate:
    label: str
    alpha: Fraction
    beta: Fraction
    report: RecurrenceReport

    def to_json(self, names=None) -> dict:
        return {"form": self.label, "alpha": str(self.alpha), "beta": str(self.beta),
                **self.report.to_json(names)}


@dataclass
class BilinearFormsReport:
    candidates: list
    pp_wave_like: bool
    family_parallel: bool

    def verdict(self, label: str) -> str:
        for c in self.candidates:
            if c.label == label:
                return c.report.verdict
        raise KeyError(label)

    def to_json(self, names=None) -> dict:
        return {
            "candidates": [c.to_json(names) for c in self.candidates],
            "pp_wave_like": self.pp_wave_like,
            "family_alpha_g_plus_beta_tau2_parallel": self.family_parallel,
        }


DEFAULT_COMBINATIONS = ((Fraction(1), Fraction(1)), (Fraction(1), Fraction(-1)),
                        (Fraction(2), Fraction(3)))


def recurrent_bilinear_forms(m: WalkerMetric,
                             combinations: Sequence[tuple] = DEFAULT_COMBINATIONS,
                             ) -> BilinearFormsReport:
    """Test ``g``, ``tau (x) tau`` and combinations ``alpha g + beta tau (x) tau``.

    A nowhere-vanishing function factor f preserves recurrence (theta picks up
    df / f), so only constant-coefficient candidates are examined.
    """
    g = metric_tensor(m)
    tt = named_tensor(m, "tau2")
    H = m.H
    pp_like = not H.diff("v").diff("v") and all(
        not H.diff("v").diff(f"x{i}") for i in range(1, m.n + 1))
    out = [BilinearCandidate("g", Fraction(1), Fraction(0), recurrence_factor(g, m)),
           BilinearCandidate("tau2", Fraction(0), Fraction(1), recurrence_factor(tt, m))]
    for a, b in combinations:
        form = TensorField(g.comps * Expr.const(a) + tt.comps * Expr.const(b), "ll")
        out.append(BilinearCandidate(f"{a}*g + {b}*tau2", a, b, recurrence_factor(form, m)))
    family = (out[0].report.verdict == PARALLEL and out[1].report.verdict == PARALLEL)
    return BilinearFormsReport(out, pp_like, family)


# -- pp-waves ------------------------------------------------------------------------------

def _syntactic_pp_wave(m: WalkerMetric) -> bool:
    return m.h_is_identity() and all(not a for a in m.A) and not m.H.depends_on("v")


def _values_in_pE(Tf: np.ndarray) -> bool:
    """All bivector values (last two frame slots) lie in p^E.

    The 2-form of ``p^w`` is nonzero only on the pairs (q, X) and (X, q).
    """
    N = Tf.shape[-1]
    Q = N - 1
    for idx, x in np.ndenumerate(Tf):
        if not x:
            continue
        C, D = idx[-2], idx[-1]
        if not ((C == Q and 0 < D < Q) or (D == Q and 0 < C < Q)):
            return False
    return True


def is_pp_wave(m: WalkerMetric, order: int = 1) -> bool:
    """Syntactic pp-wave form, or curvature test that R, ..., nabla^order R take
    values in p^E (sufficient up to the given order)."""
    if _syntactic_pp_wave(m):
        return True
    from .decomp import decompose_curvature
    from .walker import adapted_frame, to_frame

    b = decompose_curvature(m)
    if b.lam or any(x for arr in (b.v, b.P, b.R0) for x in arr.flat):
        return False
    frame = adapted_frame(m)
    for k in range(order + 1):
        t = nabla_riemann(m, k)
        # R(A, B, C, D) = g(R(A, B) C, D): the value bivector sits in the last two slots
        tf = to_frame(t, frame)
        if not _values_in_pE(tf):
            return False
    return True
