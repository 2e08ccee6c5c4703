"""Walker metrics, their adapted frame, and exact curvature tensors.

Coordinates are ordered ``(v, x1, ..., xn, u)``; index 0 is ``v`` and index
``n + 1`` is ``u``.  The metric is

    g = 2 dv du + h_ij dx^i dx^j + 2 A_i dx^i du + H du^2.

Sign convention (used everywhere in the package)::

    R(X, Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]
    R_abcd  = g(R(d_a, d_b) d_c, d_d)
    Ric_bc  = g^ad R_abcd
    (nabla T)_{m, a1..ak} has the derivative index first.

With these conventions a pp-wave has ``R_uiuj = +1/2 d_i d_j H``, so that
``R = 1/2 (d_i d_j H) (du ^ dx^i) v (du ^ dx^j)`` holds with
``a ^ b = a (x) b - b (x) a`` and ``a v b = (a (x) b + b (x) a) / 2``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .symexpr import ZERO, ONE, DenomExpr, Expr, JetPoint, MAX_X, coord

SIGN_CONVENTION = (
    "R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]; R_abcd = g(R(d_a,d_b)d_c, d_d); "
    "Ric_bc = g^ad R_abcd; derivative index first in nabla T; "
    "pp-wave: R_uiuj = +1/2 d_i d_j H"
)


class SingularMetric(ValueError):
    pass


class DimensionTooSmall(ValueError):
    pass


class NotWalkerForm(ValueError):
    pass


def _as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return Expr.const(x)


@dataclass(frozen=True)
class WalkerMetric:
    """The data ``(n, h, A, H)``; ``functions`` names the formal functions F_j."""

    n: int
    h: tuple
    A: tuple
    H: Expr
    functions: tuple = field(default=(), compare=True)

    def __post_init__(self):
        n = self.n
        if not 1 <= n <= MAX_X:
            raise ValueError(f"n must be in 1..{MAX_X}")
        h = tuple(tuple(_as_expr(x) for x in row) for row in self.h)
        A = tuple(_as_expr(x) for x in self.A)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "H", _as_expr(self.H))
        object.__setattr__(self, "functions", tuple(self.functions))
        if len(h) != n or any(len(r) != n for r in h) or len(A) != n:
            raise ValueError("h must be n x n and A must have n entries")
        for i in range(n):
            for j in range(i):
                if h[i][j] != h[j][i]:
                    raise ValueError("h must be symmetric")
        allowed = {"v", "u"} | {f"x{i}" for i in range(1, n + 1)}
        for e in (*itertools.chain.from_iterable(h), *A, self.H):
            extra = {s for s in e.variables() if "(" not in s} - allowed
            if extra:
                raise ValueError(f"{sorted(extra)} are not coordinates of an n={n} Walker chart")
        for e in (*itertools.chain.from_iterable(h), *A):
            if e.depends_on("v"):
                raise NotWalkerForm("h and A must not depend on v")

    @classmethod
    def build(cls, n: int, H, h=None, A=None, functions: Sequence[str] = ()) -> "WalkerMetric":
        if h is None:
            h = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        if A is None:
            A = [ZERO] * n
        return cls(n, tuple(map(tuple, h)), tuple(A), _as_expr(H), tuple(functions))

    @property
    def dim(self) -> int:
        return self.n + 2

    @property
    def coords(self) -> tuple[str, ...]:
        return ("v", *(f"x{i}" for i in range(1, self.n + 1)), "u")

    def h_is_identity(self) -> bool:
        return all(self.h[i][j] == (1 if i == j else 0)
                   for i in range(self.n) for j in range(self.n))

    def __repr__(self) -> str:
        return f"WalkerMetric(n={self.n}, H={self.H}, A={[str(a) for a in self.A]})"


# -- tensor fields -------------------------------------------------------------

def _zeros(shape) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(ZERO)
    return arr


def _is_zero(x) -> bool:
    return not x


class TensorField:
    """Dense component array in the coordinate basis.

    ``config`` has one character per slot, ``'l'`` for covariant and ``'u'``
    for contravariant slots.
    """

    __slots__ = ("comps", "config")

    def __init__(self, comps: np.ndarray, config: str):
        if comps.ndim != len(config) or set(config) - {"l", "u"}:
            raise ValueError("config must give one of 'l'/'u' per array axis")
        self.comps = comps
        self.config = config

    @property
    def rank(self) -> int:
        return len(self.config)

    @property
    def dim(self) -> int:
        return self.comps.shape[0] if self.comps.ndim else 0

    def __getitem__(self, idx):
        return self.comps[idx]

    def is_zero(self) -> bool:
        return all(not x for x in self.comps.flat)

    def nonzero_items(self):
        for idx in itertools.product(range(self.dim), repeat=self.rank):
            x = self.comps[idx]
            if x:
                yield idx, x

    def map(self, f) -> "TensorField":
        out = np.empty(self.comps.shape, dtype=object)
        for idx, x in np.ndenumerate(self.comps):
            out[idx] = f(x)
        return TensorField(out, self.config)

    def freeze(self, functions: Iterable[int]) -> "TensorField":
        functions = tuple(functions)
        if not functions:
            return self
        return self.map(lambda x: x.freeze(functions))

    def __add__(self, other: "TensorField") -> "TensorField":
        self._check(other)
        return TensorField(self.comps + other.comps, self.config)

    def __sub__(self, other: "TensorField") -> "TensorField":
        self._check(other)
        return TensorField(self.comps - other.comps, self.config)

    def __neg__(self) -> "TensorField":
        return self.map(lambda x: -x)

    def scale(self, c) -> "TensorField":
        return self.map(lambda x: x * c)

    def _check(self, other):
        if self.config != other.config or self.comps.shape != other.comps.shape:
            raise ValueError("tensor valence mismatch")

    def equals(self, other: "TensorField") -> bool:
        self._check(other)
        return all(not (a - b) for a, b in zip(self.comps.flat, other.comps.flat))

    def transpose(self, axes: Sequence[int]) -> "TensorField":
        return TensorField(np.transpose(self.comps, axes),
                           "".join(self.config[a] for a in axes))

    def eval(self, point: JetPoint) -> np.ndarray:
        out = np.empty(self.comps.shape, dtype=object)
        for idx, x in np.ndenumerate(self.comps):
            out[idx] = Fraction(x.eval(point)) if x else Fraction(0)
        return out

    def __repr__(self) -> str:
        nz = sum(1 for x in self.comps.flat if x)
        return f"TensorField(config={self.config!r}, dim={self.dim}, nonzero={nz})"


def outer(a: TensorField, b: TensorField) -> TensorField:
    shape = a.comps.shape + b.comps.shape
    out = _zeros(shape)
    for ia, x in np.ndenumerate(a.comps):
        if not x:
            continue
        for ib, y in np.ndenumerate(b.comps):
            if y:
                out[ia + ib] = x * y
    return TensorField(out, a.config + b.config)


def _dot(pairs):
    """Sum of products, using the single-dict fast path for plain Exprs."""
    pairs = [(a, b) for a, b in pairs if a and b]
    if not pairs:
        return ZERO
    if all(type(a) is Expr and type(b) is Expr for a, b in pairs):
        return Expr.sum_products(pairs)
    total = pairs[0][0] * pairs[0][1]
    for a, b in pairs[1:]:
        total = total + a * b
    return total


def _lincomb(items):
    items = [x for x in items if x]
    if not items:
        return ZERO
    if all(type(x) is Expr for x in items):
        return Expr.sum(items)
    total = items[0]
    for x in items[1:]:
        total = total + x
    return total


# -- metric and inverse -----------------------------------------------------------

@lru_cache(maxsize=None)
def metric_tensor(m: WalkerMetric) -> TensorField:
    N, n = m.dim, m.n
    g = _zeros((N, N))
    U = n + 1
    g[0, U] = g[U, 0] = ONE
    for i in range(n):
        for j in range(n):
            g[i + 1, j + 1] = m.h[i][j]
        g[i + 1, U] = g[U, i + 1] = m.A[i]
    g[U, U] = m.H
    return TensorField(g, "ll")


def _det(mat: list[list[Expr]]) -> Expr:
    k = len(mat)
    if k == 0:
        return ONE
    if k == 1:
        return mat[0][0]
    if k == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    terms = []
    for j in range(k):
        if not mat[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        d = mat[0][j] * _det(minor)
        terms.append(d if j % 2 == 0 else -d)
    return _lincomb(terms)


@lru_cache(maxsize=None)
def h_determinant(m: WalkerMetric) -> Expr:
    return _det([list(r) for r in m.h])


@lru_cache(maxsize=None)
def h_inverse(m: WalkerMetric) -> np.ndarray:
    """``h^{ij}`` as Exprs when ``det h`` is constant (or divides the
    adjugate), otherwise as :class:`DenomExpr` over ``det h``."""
    n = m.n
    out = _zeros((n, n))
    if m.h_is_identity():
        for i in range(n):
            out[i, i] = ONE
        return out
    D = h_determinant(m)
    if not D:
        raise SingularMetric("det h vanishes identically")
    rows = [list(r) for r in m.h]
    adj = _zeros((n, n))
    for i in range(n):
        for j in range(n):
            minor = [r[:i] + r[i + 1:] for k, r in enumerate(rows) if k != j]
            c = _det(minor)
            adj[i, j] = c if (i + j) % 2 == 0 else -c
    if D.is_constant():
        inv = Fraction(1) / Fraction(D.constant_value())
        for idx, x in np.ndenumerate(adj):
            out[idx] = x.scale(inv)
        return out
    quots = [[adj[i, j].divide_exact(D) for j in range(n)] for i in range(n)]
    if all(q is not None for row in quots for q in row):
        for i in range(n):
            for j in range(n):
                out[i, j] = quots[i][j]
        return out
    for i in range(n):
        for j in range(n):
            out[i, j] = DenomExpr(adj[i, j], D, 1)
    return out


@lru_cache(maxsize=None)
def inverse_metric(m: WalkerMetric) -> TensorField:
    """``g^{-1} = p (x) q + q (x) p + h^{ij} X_i (x) X_j`` in coordinates."""
    N, n = m.dim, m.n
    U = n + 1
    hi = h_inverse(m)
    gi = _zeros((N, N))
    gi[0, U] = gi[U, 0] = ONE
    hA = [_dot((hi[i, j], m.A[j]) for j in range(n)) for i in range(n)]
    gi[0, 0] = _lincomb([-m.H, _dot((m.A[i], hA[i]) for i in range(n))])
    for i in range(n):
        gi[0, i + 1] = gi[i + 1, 0] = -hA[i]
        for j in range(n):
            gi[i + 1, j + 1] = hi[i, j]
    return TensorField(gi, "uu")


# -- connection and curvature ----------------------------------------------------

@lru_cache(maxsize=None)
def christoffel(m: WalkerMetric) -> np.ndarray:
    """``Gamma[a, b, c] = Gamma^a_{bc}`` (symmetric in b, c)."""
    N = m.dim
    X = m.coords
    g = metric_tensor(m).comps
    gi = inverse_metric(m).comps
    dg = [[[g[b, c].diff(X[a]) for c in range(N)] for b in range(N)] for a in range(N)]
    # lowered: Gamma_{d,bc} = 1/2 (d_b g_dc + d_c g_db - d_d g_bc)
    low = _zeros((N, N, N))
    for d in range(N):
        for b in range(N):
            for c in range(b, N):
                val = _lincomb([dg[b][d][c], dg[c][d][b], -dg[d][b][c]])
                if val:
                    val = val * Fraction(1, 2)
                low[d, b, c] = low[d, c, b] = val
    gam = _zeros((N, N, N))
    for a in range(N):
        for b in range(N):
            for c in range(b, N):
                val = _dot((gi[a, d], low[d, b, c]) for d in range(N))
                gam[a, b, c] = gam[a, c, b] = val
    return gam


@lru_cache(maxsize=None)
def _christoffel_tables(m: WalkerMetric):
    """Sparse views of Gamma used by the covariant derivative.

    lower[(mu, a)] = [(s, Gamma^s_{mu a}) ...];  upper[(mu, a)] = [(s, Gamma^a_{mu s}) ...]
    """
    gam = christoffel(m)
    N = m.dim
    lower = {}
    upper = {}
    for mu in range(N):
        for a in range(N):
            lower[(mu, a)] = [(s, gam[s, mu, a]) for s in range(N) if gam[s, mu, a]]
            upper[(mu, a)] = [(s, gam[a, mu, s]) for s in range(N) if gam[a, mu, s]]
    return lower, upper


@lru_cache(maxsize=None)
def riemann(m: WalkerMetric) -> TensorField:
    """``R_abcd = g(R(d_a, d_b) d_c, d_d)``."""
    N = m.dim
    X = m.coords
    gam = christoffel(m)
    g = metric_tensor(m).comps
    dgam = [[[[gam[e, b, c].diff(X[a]) for c in range(N)] for b in range(N)]
             for e in range(N)] for a in range(N)]
    R = _zeros((N,) * 4)
    for a in range(N):
        for b in range(a + 1, N):
            for c in range(N):
                # R(d_a, d_b) d_c = R^e d_e
                up = []
                for e in range(N):
                    terms = [dgam[a][e][b][c], -dgam[b][e][a][c]]
                    terms.append(_dot((gam[f, b, c], gam[e, a, f]) for f in range(N)))
                    terms.append(-_dot((gam[f, a, c], gam[e, b, f]) for f in range(N)))
                    up.append(_lincomb(terms))
                for d in range(N):
                    val = _dot((g[d, e], up[e]) for e in range(N))
                    R[a, b, c, d] = val
                    R[b, a, c, d] = -val if val else ZERO
    return TensorField(R, "llll")


def covariant_derivative(t: TensorField, m: WalkerMetric) -> TensorField:
    """Levi-Civita derivative; the new covariant slot is prepended."""
    N = m.dim
    if t.dim != N:
        raise ValueError("tensor dimension does not match the metric")
    X = m.coords
    lower, upper = _christoffel_tables(m)
    r = t.rank
    T = t.comps
    out = _zeros((N,) * (r + 1))
    for idx in itertools.product(range(N), repeat=r):
        base = T[idx]
        for mu in range(N):
            plus = []
            minus = []
            for s_pos in range(r):
                a = idx[s_pos]
                table = lower if t.config[s_pos] == "l" else upper
                for s, G in table[(mu, a)]:
                    other = T[idx[:s_pos] + (s,) + idx[s_pos + 1:]]
                    if other:
                        (minus if t.config[s_pos] == "l" else plus).append((G, other))
            items = []
            if base:
                items.append(base.diff(X[mu]))
            if plus:
                items.append(_dot(plus))
            if minus:
                items.append(-_dot(minus))
            out[(mu,) + idx] = _lincomb(items)
    return TensorField(out, "l" + t.config)


@lru_cache(maxsize=None)
def nabla_riemann(m: WalkerMetric, order: int) -> TensorField:
    """``nabla^order R``, cached per metric."""
    if order == 0:
        return riemann(m)
    return covariant_derivative(nabla_riemann(m, order - 1), m)


@lru_cache(maxsize=None)
def ricci_and_scalar(m: WalkerMetric):
    N = m.dim
    R = riemann(m).comps
    gi = inverse_metric(m).comps
    ric = _zeros((N, N))
    for b in range(N):
        for c in range(b, N):
            val = _dot((gi[a, d], R[a, b, c, d]) for a in range(N) for d in range(N))
            ric[b, c] = ric[c, b] = val
    s = _dot((gi[b, c], ric[b, c]) for b in range(N) for c in range(N))
    return TensorField(ric, "ll"), s


def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    """``(h o k)_abcd = h_ad k_bc + h_bc k_ad - h_ac k_bd - h_bd k_ac``."""
    N = h.shape[0]
    out = _zeros((N,) * 4)
    for a, b, c, d in itertools.product(range(N), repeat=4):
        out[a, b, c, d] = _lincomb([
            h[a, d] * k[b, c], h[b, c] * k[a, d], -(h[a, c] * k[b, d]), -(h[b, d] * k[a, c]),
        ])
    return out


@lru_cache(maxsize=None)
def weyl_general(m: WalkerMetric) -> TensorField:
    """Weyl tensor from the standard conformal decomposition of R.

    ``W = R - Ric o g / (N-2) + s g o g / (2 (N-1)(N-2))`` with ``N = n + 2``.
    """
    N = m.dim
    if N < 4:
        raise DimensionTooSmall("the Weyl tensor needs dimension >= 4")
    R = riemann(m).comps
    g = metric_tensor(m).comps
    ric, s = ricci_and_scalar(m)
    kn_ric = kulkarni_nomizu(ric.comps, g)
    kn_gg = kulkarni_nomizu(g, g)
    c1 = Fraction(1, N - 2)
    c2 = s * Fraction(1, 2 * (N - 1) * (N - 2)) if s else ZERO
    W = _zeros((N,) * 4)
    for idx in itertools.product(range(N), repeat=4):
        items = [R[idx]]
        if kn_ric[idx]:
            items.append(-(kn_ric[idx] * c1))
        if c2 and kn_gg[idx]:
            items.append(c2 * kn_gg[idx])
        W[idx] = _lincomb(items)
    return TensorField(W, "llll")


# -- adapted frame -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AdaptedFrame:
    """``p = d_v``, ``X_i = d_i - A_i d_v``, ``q = d_u - H/2 d_v`` and the dual coframe.

    ``vectors[A, a]`` is the a-th coordinate component of frame vector A
    (order p, X_1..X_n, q); ``coframe[A, a]`` the a-th component of the dual
    one-form (``dv + A_i dx^i + H/2 du``, ``dx^i``, ``du``).  ``gram`` is the
    frame metric ``[[0,0,1],[0,h,0],[1,0,0]]``.
    """

    metric: WalkerMetric
    vectors: np.ndarray
    coframe: np.ndarray
    gram: np.ndarray

    @property
    def p(self) -> TensorField:
        return TensorField(self.vectors[0].copy(), "u")

    @property
    def q(self) -> TensorField:
        return TensorField(self.vectors[-1].copy(), "u")

    def X(self, i: int) -> TensorField:
        """``X_i`` for 1 <= i <= n."""
        return TensorField(self.vectors[i].copy(), "u")


@lru_cache(maxsize=None)
def adapted_frame(m: WalkerMetric) -> AdaptedFrame:
    N, n = m.dim, m.n
    U = n + 1
    half_H = m.H * Fraction(1, 2)
    vec = _zeros((N, N))
    cof = _zeros((N, N))
    vec[0, 0] = ONE
    for i in range(1, n + 1):
        vec[i, i] = ONE
        vec[i, 0] = -m.A[i - 1]
    vec[U, U] = ONE
    vec[U, 0] = -half_H
    cof[0, 0] = ONE
    for i in range(1, n + 1):
        cof[0, i] = m.A[i - 1]
        cof[i, i] = ONE
    cof[0, U] = half_H
    cof[U, U] = ONE
    gram = _zeros((N, N))
    gram[0, U] = gram[U, 0] = ONE
    for i in range(n):
        for j in range(n):
            gram[i + 1, j + 1] = m.h[i][j]
    return AdaptedFrame(m, vec, cof, gram)


def _contract_all(arr: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """new[A1..Ak] = sum mat[A1,a1] ... mat[Ak,ak] arr[a1..ak]."""
    out = arr
    for _ in range(arr.ndim):
        # contract the leading axis, append the new one at the end
        out = np.tensordot(out, mat, axes=([0], [1]))
    return out


def to_frame(t: TensorField, frame: AdaptedFrame) -> np.ndarray:
    """Frame components of a covariant tensor (all slots 'l')."""
    if set(t.config) != {"l"}:
        raise ValueError("to_frame expects a covariant tensor")
    return _contract_all(t.comps, frame.vectors)


def from_frame(comps: np.ndarray, frame: AdaptedFrame) -> TensorField:
    """Coordinate components of a covariant tensor given in the adapted frame."""
    return TensorField(_contract_all(comps, frame.coframe.T), "l" * comps.ndim)


# -- Weyl tensor from the curvature blocks ---------------------------------------------

def _wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    N = len(a)
    out = _zeros((N, N))
    for i in range(N):
        for j in range(N):
            out[i, j] = _lincomb([a[i] * b[j], -(b[i] * a[j])])
    return out


@lru_cache(maxsize=None)
def weyl_walker(m: WalkerMetric) -> TensorField:
    """Weyl tensor as ``R + R_L`` with ``R_L`` assembled from the curvature blocks.

    All vectors are handled through their flat (lowered) frame components, so
    only the traces ``s0``, ``tr T`` and ``Ric~P`` need ``h^{-1}``.  The scalar
    terms ``s / (2(n+1))`` in ``R_L(X, Y)`` multiply the identity of E.
    """
    from .decomp import decompose_curvature

    N, n = m.dim, m.n
    if N < 4:
        raise DimensionTooSmall("the Weyl tensor needs dimension >= 4")
    frame = adapted_frame(m)
    b = decompose_curvature(m, frame)
    hi = h_inverse(m)
    h = frame.gram[1:-1, 1:-1]
    P0, Q = 0, N - 1

    ric0 = b.ricci_h()
    s0 = _dot((hi[j, k], ric0[j, k]) for j in range(n) for k in range(n))
    trT = _dot((hi[i, j], b.T[i, j]) for i in range(n) for j in range(n))
    ricP = [_dot((hi[i, j], b.P[i, j, k]) for i in range(n) for j in range(n)) for k in range(n)]
    w = [_lincomb([b.v[k], -ricP[k]]) for k in range(n)]
    lam = b.lam
    s = _lincomb([lam * 2, s0])
    inv_n = Fraction(1, n)
    c_L = _lincomb([lam * (n - 1), -s0]) * Fraction(1, n + 1) if (lam or s0) else ZERO
    c_pq = _lincomb([lam * (2 * n), -s0]) * Fraction(1, n + 1) if (lam or s0) else ZERO
    c_s = s * Fraction(1, 2 * (n + 1)) if s else ZERO

    def flat_E(y) -> np.ndarray:
        out = _zeros(N)
        for k in range(n):
            out[k + 1] = y[k]
        return out

    p_flat = _zeros(N)
    p_flat[Q] = ONE
    q_flat = _zeros(N)
    q_flat[P0] = ONE
    X_flat = [flat_E(h[i]) for i in range(n)]
    w_flat = flat_E(w)

    def ric_shift(i, c):
        # flat of (Ric(h) + c id) X_i
        return flat_E([_lincomb([ric0[i, k], c * h[i, k]]) for k in range(n)])

    L = _zeros((N,) * 4)

    def put(A, B, form):
        for C in range(N):
            for D in range(N):
                x = form[C, D]
                L[A, B, C, D] = x
                L[B, A, C, D] = -x if x else ZERO

    def combo(*pairs):
        # sum of coefficient * 2-form, times 1/n
        acc = _zeros((N, N))
        for coef, form in pairs:
            if not coef:
                continue
            for idx, x in np.ndenumerate(form):
                if x:
                    acc[idx] = acc[idx] + coef * x
        return np.vectorize(lambda x: x * inv_n if x else ZERO, otypes=[object])(acc)

    for j in range(n):
        put(P0, j + 1, combo((ONE, _wedge(p_flat, ric_shift(j, c_L)))))
    put(P0, Q, combo((c_pq, _wedge(p_flat, q_flat)), (ONE, _wedge(p_flat, w_flat))))
    for i in range(n):
        for j in range(i + 1, n):
            rot = flat_E([_lincomb([w[i] * h[j, k], -(w[j] * h[i, k])]) for k in range(n)])
            put(i + 1, j + 1, combo(
                (ONE, _wedge(p_flat, rot)),
                (ONE, _wedge(ric_shift(i, -c_s), X_flat[j])),
                (ONE, _wedge(X_flat[i], ric_shift(j, -c_s))),
            ))
    for i in range(n):
        put(i + 1, Q, combo(
            (trT, _wedge(p_flat, X_flat[i])),
            (w[i], _wedge(p_flat, q_flat)),
            (ONE, _wedge(X_flat[i], w_flat)),
            (ONE, _wedge(ric_shift(i, c_L), q_flat)),
        ))

    Rf = to_frame(riemann(m), frame)
    Wf = _zeros((N,) * 4)
    for idx in itertools.product(range(N), repeat=4):
        Wf[idx] = _lincomb([Rf[idx], L[idx]])
    return from_frame(Wf, frame)


# -- coordinate changes ------------------------------------------------------------------

def pullback(m: WalkerMetric, substitution: dict[str, Expr]) -> np.ndarray:
    """Components of ``phi^* g`` for ``old_coord = substitution[old_coord](new coords)``.

    Coordinates not mentioned are unchanged.  ``u`` must be left unchanged
    when formal functions are present.
    """
    N = m.dim
    X = m.coords
    g = metric_tensor(m).comps
    phi = [substitution.get(x, coord(x)) for x in X]
    jac = [[phi[a].diff(X[b]) for b in range(N)] for a in range(N)]  # d old^a / d new^b
    gs = [[g[a, b].subs(substitution) for b in range(N)] for a in range(N)]
    out = _zeros((N, N))
    for c in range(N):
        for d in range(c, N):
            val = _dot((gs[a][b], jac[a][c] * jac[b][d]) for a in range(N) for b in range(N))
            out[c, d] = out[d, c] = val
    return out


def walker_from_components(n: int, g: np.ndarray, functions: Sequence[str] = ()) -> WalkerMetric:
    """Read ``(h, A, H)`` off a coordinate metric; raise NotWalkerForm otherwise."""
    N = n + 2
    U = N - 1
    if g[0, U] != 1 or any(g[0, a] for a in range(U)):
        raise NotWalkerForm("g(d_v, .) must equal du")
    h = [[g[i, j] for j in range(1, n + 1)] for i in range(1, n + 1)]
    A = [g[i, U] for i in range(1, n + 1)]
    return WalkerMetric.build(n, g[U, U], h=h, A=A, functions=functions)
