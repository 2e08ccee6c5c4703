"""Curvature blocks of a Walker metric in the adapted frame ``(p, X_1..X_n, q)``.

Every algebraic curvature tensor with values in sim(n) is fixed by

    R(p, q) = -lam p^q - p^v
    R(X, Y) = R0(X, Y) - p^(P(Y)X - P(X)Y)
    R(X, q) = -g(v, X) p^q + P(X) - p^T(X)
    R(p, X) = 0

with bivectors acting by ``(a^b) z = g(a, z) b - g(b, z) a``.  The blocks are
stored with E-indices lowered by ``h``:

    v[i]          = g(v, X_i)
    P[i, j, k]    = g(P(X_i) X_j, X_k)
    R0[i, j, k, l] = R(X_i, X_j, X_k, X_l)
    T[i, j]       = g(T X_i, X_j)
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .walker import (
    AdaptedFrame,
    TensorField,
    WalkerMetric,
    _dot,
    _zeros,
    adapted_frame,
    from_frame,
    h_inverse,
    riemann,
    to_frame,
)


class NotWalkerCompatible(RuntimeError):
    """R(p, .) does not vanish; cannot happen for a genuine Walker metric."""


class InvalidBlocks(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CurvatureBlocks:
    n: int
    lam: object
    v: np.ndarray
    P: np.ndarray
    R0: np.ndarray
    T: np.ndarray
    h_inv: np.ndarray | None = None

    def ricci_h(self) -> np.ndarray:
        """Ricci tensor of R0 (the Ricci form of the family h), lowered."""
        n = self.n
        hi = self.h_inv if self.h_inv is not None else _identity(n)
        out = _zeros((n, n))
        for j in range(n):
            for k in range(n):
                out[j, k] = _dot((hi[i, l], self.R0[i, j, k, l])
                                 for i in range(n) for l in range(n))
        return out

    def is_zero(self) -> bool:
        return not self.lam and all(not x for arr in (self.v, self.P, self.R0, self.T)
                                    for x in arr.flat)

    def as_dict(self, names=None) -> dict:
        def s(x):
            return x.to_string(names)

        def nested(arr):
            if not isinstance(arr, np.ndarray):
                return s(arr)
            return [nested(a) for a in arr]

        return {
            "lambda": s(self.lam),
            "v": nested(self.v),
            "P": nested(self.P),
            "R0": nested(self.R0),
            "T": nested(self.T),
        }


def _identity(n: int) -> np.ndarray:
    from .symexpr import ONE

    out = _zeros((n, n))
    for i in range(n):
        out[i, i] = ONE
    return out


def validate_P(P: np.ndarray) -> bool:
    """True iff g(P(X)Y, Z) + g(P(Y)Z, X) + g(P(Z)X, Y) = 0 on all basis triples."""
    n = P.shape[0]
    for i, j, k in itertools.product(range(n), repeat=3):
        if P[i, j, k] + P[j, k, i] + P[k, i, j]:
            return False
    return True


def decompose_curvature(m: WalkerMetric, frame: AdaptedFrame | None = None) -> CurvatureBlocks:
    frame = frame or adapted_frame(m)
    Rf = to_frame(riemann(m), frame)
    return blocks_from_frame(Rf, m.n, None if m.h_is_identity() else h_inverse(m))


def blocks_from_frame(Rf: np.ndarray, n: int, h_inv=None) -> CurvatureBlocks:
    """Read the blocks off frame components; checks that ``R(p, X) = 0`` for X in E."""
    N = n + 2
    P0, Q = 0, N - 1
    for B in range(1, N - 1):
        for C, D in itertools.product(range(N), repeat=2):
            if Rf[P0, B, C, D]:
                raise NotWalkerCompatible(f"R(p, X_{B}) has a nonzero component at {(C, D)}")
    lam = -Rf[P0, Q, Q, P0]
    v = _zeros(n)
    T = _zeros((n, n))
    P = _zeros((n, n, n))
    R0 = _zeros((n, n, n, n))
    for i in range(n):
        v[i] = -Rf[P0, Q, Q, i + 1]
        for k in range(n):
            T[i, k] = -Rf[i + 1, Q, Q, k + 1]
            for j in range(n):
                P[i, j, k] = Rf[i + 1, Q, j + 1, k + 1]
                for l in range(n):
                    R0[i, j, k, l] = Rf[i + 1, j + 1, k + 1, l + 1]
    return CurvatureBlocks(n, lam, v, P, R0, T, h_inv)


def frame_from_blocks(b: CurvatureBlocks) -> np.ndarray:
    """Frame components ``R(F_A, F_B, F_C, F_D)`` of the tensor the blocks define."""
    n = b.n
    N = n + 2
    P0, Q = 0, N - 1
    Rf = _zeros((N,) * 4)

    def put(A, B, C, D, x):
        if not x:
            return
        Rf[A, B, C, D] = x
        Rf[B, A, C, D] = -x
        Rf[A, B, D, C] = -x
        Rf[B, A, D, C] = x

    put(P0, Q, Q, P0, -b.lam)
    for k in range(n):
        put(P0, Q, Q, k + 1, -b.v[k])
        put(k + 1, Q, Q, P0, -b.v[k])
    for i in range(n):
        for k in range(n):
            put(i + 1, Q, Q, k + 1, -b.T[i, k])
            for j in range(n):
                put(i + 1, Q, j + 1, k + 1, b.P[i, j, k])
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                put(i + 1, j + 1, Q, k + 1, b.P[i, j, k] - b.P[j, i, k])
            for k in range(n):
                for l in range(k + 1, n):
                    put(i + 1, j + 1, k + 1, l + 1, b.R0[i, j, k, l])
    return Rf


def reconstruct_curvature(b: CurvatureBlocks, frame: AdaptedFrame) -> TensorField:
    n = b.n
    for i in range(n):
        for j in range(i):
            if b.T[i, j] != b.T[j, i]:
                raise InvalidBlocks("T must be symmetric")
    if not validate_P(b.P):
        raise InvalidBlocks("P violates the cyclic identity")
    for i, j, k in itertools.product(range(n), repeat=3):
        if b.P[i, j, k] + b.P[i, k, j]:
            raise InvalidBlocks("P(X) must be skew-symmetric")
    return from_frame(frame_from_blocks(b), frame)


def p_image_algebra(b: CurvatureBlocks, point):
    """Smallest Lie subalgebra of so(n) containing the values ``P(X_i)`` at a point.

    Matrices act on E-components in the basis X_1..X_n; ``P(X_i)`` is raised with
    ``h^{-1}`` evaluated at the point.
    """
    from fractions import Fraction

    from . import _linalg as la
    from .holonomy import lie_closure

    n = b.n
    hi = b.h_inv if b.h_inv is not None else _identity(n)
    hiv = [[Fraction(hi[a, c].eval(point)) if hi[a, c] else Fraction(0) for c in range(n)]
           for a in range(n)]
    gens = []
    for i in range(n):
        low = [[Fraction(b.P[i, j, k].eval(point)) if b.P[i, j, k] else Fraction(0)
                for k in range(n)] for j in range(n)]
        # matrix M[c][j] = coefficient of X_c in P(X_i) X_j
        gens.append(la.transpose(la.matmul(low, hiv)))
    return lie_closure(gens)
