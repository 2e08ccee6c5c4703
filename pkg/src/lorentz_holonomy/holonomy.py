"""Infinitesimal holonomy algebras and their structure inside sim(n).

Matrices act on column vectors written in a Witt basis ``(p, e_1..e_n, q)``
with ``eta(p, q) = 1`` and ``eta(e_i, e_j) = G_ij``.  ``G`` is the identity
whenever ``h`` is the identity at the point; in general the ``e_i`` come from
Gram-Schmidt on the ``X_i`` without normalisation (no square roots), so ``G``
is diagonal and positive.

A element of sim(n) is written ``c p^q + B + p^w``; reading off the blocks:

    c = -(A p)_p,   w = E-part of A q,   B = E-block of A.
"""
from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _linalg as la
from .symexpr import JetPoint
from .walker import WalkerMetric, adapted_frame, nabla_riemann

Matrix = list

DEFAULT_ORDER = 2
DEFAULT_MAX_ORDER = 4

IRREDUCIBLE = "irreducible-so(1,n+1)"
TRIVIAL = "trivial"
DECOMPOSABLE = "decomposable"
NO_LINE = "no-invariant-line"
UNCLASSIFIED = "unclassified"


class NonPositiveDefiniteH(ValueError):
    pass


class NotClosedUnderBracket(ValueError):
    pass


# -- Witt basis helpers -----------------------------------------------------------------

def witt_eta(n: int, gram: Sequence[Fraction] | None = None) -> Matrix:
    """Full metric matrix in the Witt basis; ``gram`` is the diagonal of G."""
    N = n + 2
    eta = [[Fraction(0)] * N for _ in range(N)]
    eta[0][N - 1] = eta[N - 1][0] = Fraction(1)
    for i in range(n):
        eta[i + 1][i + 1] = Fraction(gram[i]) if gram is not None else Fraction(1)
    return eta


def basis_vector(n: int, name: str | int) -> list[Fraction]:
    """``'p'``, ``'q'`` or an integer 1..n for ``e_i``."""
    N = n + 2
    out = [Fraction(0)] * N
    idx = {"p": 0, "q": N - 1}.get(name, name)
    out[idx] = Fraction(1)
    return out


def wedge(X: Sequence, Y: Sequence, eta: Matrix | None = None) -> Matrix:
    """Matrix of ``Z -> eta(X, Z) Y - eta(Y, Z) X``."""
    N = len(X)
    if eta is None:
        eta = witt_eta(N - 2)
    X = [Fraction(x) for x in X]
    Y = [Fraction(y) for y in Y]
    eX = [sum(eta[a][b] * X[b] for b in range(N)) for a in range(N)]
    eY = [sum(eta[a][b] * Y[b] for b in range(N)) for a in range(N)]
    return [[Y[r] * eX[c] - X[r] * eY[c] for c in range(N)] for r in range(N)]


def is_skew(A: Matrix, eta: Matrix) -> bool:
    At = la.transpose(A)
    return la.is_zero_matrix(la.matadd(la.matmul(At, eta), la.matmul(eta, A)))


def bracket(A: Matrix, B: Matrix) -> Matrix:
    return la.matsub(la.matmul(A, B), la.matmul(B, A))


def _flat(A: Matrix) -> list[Fraction]:
    return [x for row in A for x in row]


def _unflat(vec: Sequence, N: int) -> Matrix:
    return [list(vec[r * N:(r + 1) * N]) for r in range(N)]


def lie_closure(gens: Sequence[Matrix]) -> list[Matrix]:
    """Basis (reduced echelon form) of the Lie algebra generated by ``gens``."""
    gens = [g for g in gens if not la.is_zero_matrix(g)]
    if not gens:
        return []
    N = len(gens[0])
    span = la.SpanBasis(N * N)
    elems: list[Matrix] = []
    for g in gens:
        if span.add(_flat(g)):
            elems.append(g)
    done = 0
    # elems[:done] have been bracketed against every earlier element
    while done < len(elems):
        a = elems[done]
        for b in elems[:done]:
            c = bracket(a, b)
            if span.add(_flat(c)):
                elems.append(c)
        done += 1
    return [_unflat(r, N) for r in span.rows]


def is_closed(basis: Sequence[Matrix]) -> bool:
    if not basis:
        return True
    N = len(basis[0])
    span = la.row_basis([_flat(b) for b in basis], N * N)
    return all(span.contains(_flat(bracket(a, b)))
               for a, b in itertools.combinations(basis, 2))


# -- evaluating curvature endomorphisms -------------------------------------------------------

def _ev(x, point):
    return Fraction(x.eval(point)) if x else Fraction(0)


def witt_frame(m: WalkerMetric, point: JetPoint):
    """Coordinate matrix ``S[a][A]`` of the Witt vectors at a point, and diag(G)."""
    frame = adapted_frame(m)
    n, N = m.n, m.dim
    vec = [[_ev(frame.vectors[A, a], point) for a in range(N)] for A in range(N)]
    h = [[_ev(m.h[i][j], point) for j in range(n)] for i in range(n)]
    # Gram-Schmidt: e_i = X_i - sum_{j<i} h(X_i, e_j)/G_j e_j, tracked as combinations of X
    L: list[list[Fraction]] = []
    G: list[Fraction] = []
    for i in range(n):
        row = [Fraction(0)] * n
        row[i] = Fraction(1)
        for j in range(i):
            # h(X_i, e_j) = sum_k L[j][k] h[i][k]
            c = sum(L[j][k] * h[i][k] for k in range(n)) / G[j]
            row = [x - c * y for x, y in zip(row, L[j])]
        norm = sum(row[a] * row[b] * h[a][b] for a in range(n) for b in range(n))
        if norm <= 0:
            raise NonPositiveDefiniteH(f"h is not positive definite at {point!r}")
        L.append(row)
        G.append(norm)
    S = [[Fraction(0)] * N for _ in range(N)]
    for a in range(N):
        S[a][0] = vec[0][a]
        S[a][N - 1] = vec[N - 1][a]
        for i in range(n):
            S[a][i + 1] = sum(L[i][k] * vec[k + 1][a] for k in range(n))
    return S, G


def curvature_endomorphisms(m: WalkerMetric, point: JetPoint, order: int,
                            S: Matrix, G: Sequence[Fraction]) -> list[Matrix]:
    """Values ``(nabla^order R)(..; a, b)`` as Witt-basis matrices.

    Derivative slots and the bivector pair stay in coordinates; they only
    label generators and do not change the span.
    """
    N = m.dim
    t = nabla_riemann(m, order)
    eta_inv = la.inverse(witt_eta(m.n, G))
    Snp = np.array(S, dtype=object)
    out = []
    for lead in itertools.product(range(N), repeat=order + 2):
        a, b = lead[-2], lead[-1]
        if a >= b:
            continue
        block = t.comps[lead]
        if not any(block.flat):
            continue
        vals = np.array([[_ev(block[c, e], point) for e in range(N)] for c in range(N)],
                        dtype=object)
        # R(.., w_C, w_E)
        RW = Snp.T.dot(vals).dot(Snp)
        # K[D][C] = eta^{DE} R(.., w_C, w_E)
        K = [[sum(eta_inv[D][E] * RW[C, E] for E in range(N)) for C in range(N)]
             for D in range(N)]
        if not la.is_zero_matrix(K):
            out.append(K)
    return out


def max_order_from_env(default: int = DEFAULT_MAX_ORDER) -> int:
    raw = os.environ.get("WALKER_MAX_ORDER")
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"WALKER_MAX_ORDER must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError("WALKER_MAX_ORDER must be non-negative")
    return value


def infinitesimal_holonomy(m: WalkerMetric, point: JetPoint, order: int = DEFAULT_ORDER, *,
                           escalate: bool = True, max_order: int | None = None,
                           ) -> "HolonomyReport":
    """Lie algebra generated by ``nabla^k R`` at ``point`` for k <= order.

    With ``escalate`` the order is raised until two consecutive orders give the
    same algebra or ``max_order`` is reached.  Equal spans are a heuristic
    certificate of stabilisation, not a proof.
    """
    if max_order is None:
        max_order = max_order_from_env()
    if order < 0:
        raise ValueError("order must be non-negative")
    order = min(order, max_order)
    S, G = witt_frame(m, point)
    gens: list[Matrix] = []
    history: list[int] = []
    basis: list[Matrix] = []
    k = 0
    while True:
        gens += curvature_endomorphisms(m, point, k, S, G)
        basis = lie_closure(gens)
        history.append(len(basis))
        stable = len(history) >= 2 and history[-1] == history[-2]
        if k >= order and (not escalate or stable or k >= max_order):
            break
        k += 1
    rep = build_report(basis, m.n, G, close=False)
    rep.order_used = k
    rep.dims_by_order = history
    rep.stabilized = len(history) >= 2 and history[-1] == history[-2]
    return rep


# -- structure ------------------------------------------------------------------------------

def _blocks(A: Matrix, n: int):
    N = n + 2
    c = -A[0][0]
    w = [A[i + 1][N - 1] for i in range(n)]
    B = [[A[i + 1][j + 1] for j in range(n)] for i in range(n)]
    return c, B, w


def _preserves_p(A: Matrix) -> bool:
    return all(A[r][0] == 0 for r in range(1, len(A)))


@dataclass
class HolonomyReport:
    """Basis of a subalgebra of so(1, n+1) together with its sim(n) structure.

    ``phi`` (type III) lists the values of the p^q coefficient on ``h_part``;
    ``psi`` (type IV) lists E_2-vectors, in e-coordinates, on ``h_part``.
    """

    n: int
    basis: list
    gram: list
    type: str | None = None
    h_part: list = field(default_factory=list)
    has_pq: bool = False
    pq_decoupled: bool = False
    pE_part: int = 0
    E1: list = field(default_factory=list)
    E2: list = field(default_factory=list)
    phi: list | None = None
    psi: list | None = None
    in_sim: bool = True
    weakly_irreducible: bool | None = None
    order_used: int | None = None
    dims_by_order: list | None = None
    stabilized: bool | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def eta(self) -> Matrix:
        return witt_eta(self.n, self.gram)

    def preserves_line_p(self) -> bool:
        return all(_preserves_p(A) for A in self.basis)

    def to_json(self) -> dict:
        def mat(A):
            return [[str(x) for x in row] for row in A]

        out = {
            "n": self.n,
            "dim": self.dim,
            "type": self.type,
            "witt_gram_diagonal": [str(x) for x in self.gram],
            "basis": [mat(A) for A in self.basis],
            "h_part": [mat(B) for B in self.h_part],
            "h_dim": len(self.h_part),
            "has_pq": self.has_pq,
            "pE_dim": self.pE_part,
            "preserves_isotropic_line": self.in_sim,
            "weakly_irreducible": self.weakly_irreducible,
        }
        if self.phi is not None:
            out["phi"] = [str(x) for x in self.phi]
        if self.psi is not None:
            out["psi"] = [[str(x) for x in v] for v in self.psi]
            out["E2"] = [[str(x) for x in v] for v in self.E2]
        if self.order_used is not None:
            out["derivative_order"] = self.order_used
            out["dims_by_order"] = self.dims_by_order
            out["stabilized_heuristic"] = self.stabilized
        return out


def _analyse(rep: HolonomyReport) -> None:
    n, N = rep.n, rep.n + 2
    basis = rep.basis
    rep.in_sim = rep.preserves_line_p()
    if not basis or not rep.in_sim:
        return
    parts = [_blocks(A, n) for A in basis]
    rep.has_pq = any(c for c, _, _ in parts)
    # h = span of the so(n) blocks; pick generators whose blocks are independent
    hspan = la.SpanBasis(n * n)
    chosen = []
    for k, (_, B, _) in enumerate(parts):
        if hspan.add(_flat(B)):
            chosen.append(k)
    rep.h_part = [parts[k][1] for k in chosen]
    # combinations with vanishing so(n) block
    cols = [_flat(B) for _, B, _ in parts]
    K = la.nullspace(la.transpose(cols))
    kernel = []
    for x in K:
        c = sum(xk * p[0] for xk, p in zip(x, parts))
        w = [sum(xk * p[2][i] for xk, p in zip(x, parts)) for i in range(n)]
        kernel.append((c, w))
    rep.pq_decoupled = any(c for c, _ in kernel)
    # L = {w : p^w in g}; restrict the kernel to c = 0
    if rep.pq_decoupled:
        pivot = next(k for k, (c, _) in enumerate(kernel) if c)
        c0, w0 = kernel[pivot]
        pure = [[wi - (c / c0) * w0i for wi, w0i in zip(w, w0)]
                for k, (c, w) in enumerate(kernel) if k != pivot]
    else:
        pure = [w for _, w in kernel]
    Lspan = la.row_basis(pure, n)
    rep.pE_part = len(Lspan)
    rep.E1 = [list(r) for r in Lspan.rows]
    G = rep.gram
    # E2 = G-orthogonal complement of E1 inside E
    rep.E2 = la.nullspace([[r[i] * G[i] for i in range(n)] for r in rep.E1]) if rep.E1 else [
        basis_vector(n, i + 1)[1:N - 1] for i in range(n)]
    if rep.has_pq and not rep.pq_decoupled:
        rep.phi = [parts[k][0] for k in chosen]
    if rep.E2 and not rep.has_pq:
        # psi(B) = E2-component of w, written in the E2 basis (as an E-vector)
        proj = _projector(rep.E2, G, n)
        rep.psi = [[sum(proj[i][j] * parts[k][2][j] for j in range(n)) for i in range(n)]
                   for k in chosen]


def _projector(vectors, G, n) -> Matrix:
    """G-orthogonal projection of E onto span(vectors)."""
    m = len(vectors)
    gram = [[sum(a[i] * G[i] * b[i] for i in range(n)) for b in vectors] for a in vectors]
    ginv = la.inverse(gram)
    # P = V ginv V^T G
    V = [[vectors[k][i] for k in range(m)] for i in range(n)]
    VG = [[vectors[k][j] * G[j] for j in range(n)] for k in range(m)]
    return la.matmul(la.matmul(V, ginv), VG)


# -- weak irreducibility ----------------------------------------------------------------------

def _selfadjoint_commutant(basis: Sequence[Matrix], eta: Matrix) -> list[Matrix]:
    """Basis of {M : [M, A] = 0 for all A, eta M symmetric}."""
    N = len(eta)
    rows = []
    for A in basis:
        for r in range(N):
            for c in range(N):
                # (M A - A M)[r][c]
                row = [Fraction(0)] * (N * N)
                for k in range(N):
                    row[r * N + k] += A[k][c]
                    row[k * N + c] -= A[r][k]
                rows.append(row)
    for r in range(N):
        for c in range(r + 1, N):
            # (eta M)[r][c] - (eta M)[c][r]
            row = [Fraction(0)] * (N * N)
            for k in range(N):
                row[k * N + c] += eta[r][k]
                row[k * N + r] -= eta[c][k]
            rows.append(row)
    return [_unflat(x, N) for x in la.nullspace(rows)]


def _is_nilpotent(M: Matrix) -> bool:
    P = M
    for _ in range(len(M)):
        P = la.matmul(P, M)
    return la.is_zero_matrix(P)


def _trace(M: Matrix) -> Fraction:
    return sum((M[i][i] for i in range(len(M))), Fraction(0))


def _is_primary(M: Matrix) -> bool:
    """Characteristic polynomial is a power of one real-irreducible factor."""
    N = len(M)
    I = la.identity(N)
    a = _trace(M) / N
    if _is_nilpotent(la.matsub(M, la.matscale(I, a))):
        return True
    if N % 2:
        return False
    half = N // 2
    s = 2 * _trace(M) / N
    t = (s * s - _trace(la.matmul(M, M)) / half) / 2
    if s * s - 4 * t >= 0:
        return False
    Q = la.matadd(la.matsub(la.matmul(M, M), la.matscale(M, s)), la.matscale(I, t))
    return _is_nilpotent(Q)


def is_weakly_irreducible(basis: Sequence[Matrix], eta: Matrix, trials: int = 4) -> bool:
    """No proper nondegenerate invariant subspace.

    Such a subspace exists iff some eta-self-adjoint operator commuting with the
    algebra has two coprime primary components; its spectral projections then
    split the space orthogonally.  The search tests each basis element of that
    commutant and a few fixed pseudo-random combinations.
    """
    S = _selfadjoint_commutant(basis, eta)
    if len(S) <= 1:
        return True
    rng = random.Random(0)
    candidates = list(S)
    for _ in range(trials):
        coeffs = [Fraction(rng.randint(-9, 9)) for _ in S]
        M = la.frac_matrix([[0] * len(eta)] * len(eta))
        for c, B in zip(coeffs, S):
            M = la.matadd(M, la.matscale(B, c))
        candidates.append(M)
    return all(_is_primary(M) for M in candidates)


# -- classification ------------------------------------------------------------------------------

def build_report(basis: Sequence[Matrix], n: int, gram: Sequence | None = None, *,
                 close: bool = True) -> HolonomyReport:
    """Report for the algebra spanned (``close=False``) or generated by ``basis``."""
    gram = [Fraction(x) for x in gram] if gram is not None else [Fraction(1)] * n
    mats = [[[Fraction(x) for x in row] for row in A] for A in basis]
    if close:
        mats = lie_closure(mats)
    else:
        N = n + 2
        span = la.row_basis([_flat(A) for A in mats], N * N)
        mats = [_unflat(r, N) for r in span.rows]
    rep = HolonomyReport(n, mats, gram)
    _analyse(rep)
    if is_closed(rep.basis):
        rep.type = classify_type(rep)
    return rep


def classify_type(rep: HolonomyReport) -> str:
    if not is_closed(rep.basis):
        raise NotClosedUnderBracket("basis is not closed under the Lie bracket")
    n = rep.n
    eta = rep.eta
    if not rep.basis:
        rep.weakly_irreducible = False
        return TRIVIAL
    if rep.dim == (n + 2) * (n + 1) // 2:
        rep.weakly_irreducible = True
        return IRREDUCIBLE
    if not rep.in_sim:
        return NO_LINE
    rep.weakly_irreducible = is_weakly_irreducible(rep.basis, eta)
    if not rep.weakly_irreducible:
        return DECOMPOSABLE
    if rep.pE_part == n:
        if rep.pq_decoupled:
            return "I"
        if not rep.has_pq:
            return "II"
        return "III"
    if rep.has_pq or not rep.psi:
        return UNCLASSIFIED
    # type IV: h acts on E1 only and psi is onto E2
    for B in rep.h_part:
        for e in rep.E2:
            if any(sum(B[i][j] * e[j] for j in range(n)) for i in range(n)):
                return UNCLASSIFIED
    return "IV"


def check_phi_psi_conditions(rep: HolonomyReport) -> bool:
    """phi (psi) vanishes on brackets of h; psi is onto E_2.

    Works on the recorded structure, so it also judges candidate bases that
    are not closed under the bracket.  Vacuously true without a coupling map.
    """
    n = rep.n
    h = rep.h_part
    if rep.phi is None and rep.psi is None:
        return True
    flats = [_flat(B) for B in h]
    for i, j in itertools.combinations(range(len(h)), 2):
        coords = la.solve_coordinates(flats, _flat(bracket(h[i], h[j])))
        if coords is None:
            return False
        if rep.phi is not None and sum(c * f for c, f in zip(coords, rep.phi)):
            return False
        if rep.psi is not None:
            vec = [sum(c * v[k] for c, v in zip(coords, rep.psi)) for k in range(n)]
            if any(vec):
                return False
    if rep.psi is not None:
        if len(la.row_basis(rep.psi, n)) != len(rep.E2):
            return False
    return True


def sim_element(n: int, c=0, B: Matrix | None = None, w: Sequence | None = None,
                gram: Sequence | None = None) -> Matrix:
    """``c p^q + B + p^w`` as a Witt-basis matrix (B given in e-coordinates)."""
    eta = witt_eta(n, gram)
    p, q = basis_vector(n, "p"), basis_vector(n, "q")
    A = la.matscale(wedge(p, q, eta), Fraction(c))
    if w is not None:
        full = [Fraction(0)] + [Fraction(x) for x in w] + [Fraction(0)]
        A = la.matadd(A, wedge(p, full, eta))
    if B is not None:
        for i in range(n):
            for j in range(n):
                A[i + 1][j + 1] += Fraction(B[i][j])
    return A


def so_generators(n: int) -> list[Matrix]:
    """``e_i ^ e_j`` (i < j) restricted to E, as n x n matrices."""
    out = []
    for i, j in itertools.combinations(range(n), 2):
        M = [[Fraction(0)] * n for _ in range(n)]
        # (e_i ^ e_j) e_i = e_j,  (e_i ^ e_j) e_j = -e_i
        M[j][i] = Fraction(1)
        M[i][j] = Fraction(-1)
        out.append(M)
    return out
