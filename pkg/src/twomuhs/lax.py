"""Lax pair of the gamma = 0 system and its zero-curvature residual.

    U = [[0, 1], [Q, 0]],  Q = lam Lambda(f) - lam^2 v^2
    V = [[p, r], [q, -p]], r = f - 1/(2 lam), p = -f_x/2, q = p_x + r Q

Matrix entries are Fields or Python scalars; scalar 0 and 1 entries are kept
exact so the structurally vanishing residual entries cancel to roundoff.
"""
from __future__ import annotations

import numbers
import warnings
from dataclasses import dataclass

import numpy as np

from .spectral import Field, deriv, lambda_apply, mean


def _check_lambda(lam) -> float:
    if isinstance(lam, complex) or np.iscomplexobj(lam):
        raise NotImplementedError("complex spectral parameters are not supported; fields are real")
    lam = float(lam)
    if lam == 0.0:
        raise ValueError("spectral parameter must be nonzero")
    return lam


def _mul(a, b):
    if isinstance(a, numbers.Number) and isinstance(b, numbers.Number):
        return a * b
    if isinstance(a, numbers.Number):
        return 0.0 if a == 0 else (b if a == 1 else b * a)
    if isinstance(b, numbers.Number):
        return 0.0 if b == 0 else (a if b == 1 else a * b)
    return a * b


def _add(a, b):
    if isinstance(a, numbers.Number) and a == 0:
        return b
    if isinstance(b, numbers.Number) and b == 0:
        return a
    return a + b


def _neg(a):
    return -a if not isinstance(a, numbers.Number) else -float(a)


def matmul(A, B):
    return [[_add(_mul(A[i][0], B[0][j]), _mul(A[i][1], B[1][j])) for j in range(2)]
            for i in range(2)]


def _entry_norm(a) -> float:
    return abs(float(a)) if isinstance(a, numbers.Number) else a.max_norm()


@dataclass(frozen=True)
class LaxData:
    lam: float
    U: list
    V: list
    p: Field
    q: Field
    r: Field

    @property
    def potential(self) -> Field:
        """The (2,1) entry of U, lam Lambda(f) - lam^2 v^2."""
        return self.U[1][0]


def build_lax(f: Field, v: Field, lam: float) -> LaxData:
    lam = _check_lambda(lam)
    Q = lam * lambda_apply(f) - (lam * lam) * (v * v)
    r = f - 1.0 / (2.0 * lam)
    p = -0.5 * deriv(f)
    q = deriv(p) + r * Q
    U = [[0.0, 1.0], [Q, 0.0]]
    V = [[p, r], [q, -p]]
    return LaxData(lam, U, V, p, q, r)


@dataclass(frozen=True)
class ZeroCurvatureResidual:
    entries: list
    term_scales: np.ndarray

    def norm(self, i: int, j: int) -> float:
        return _entry_norm(self.entries[i][j])

    def scaled(self, i: int, j: int) -> float:
        s = self.term_scales[i, j]
        return self.norm(i, j) / s if s > 0 else self.norm(i, j)

    @property
    def max_norm(self) -> float:
        return max(self.norm(i, j) for i in range(2) for j in range(2))

    @property
    def max_scaled(self) -> float:
        return max(self.scaled(i, j) for i in range(2) for j in range(2))


def zero_curvature_residual(f: Field, v: Field, f_t: Field, v_t: Field, lam: float,
                            gamma=None) -> ZeroCurvatureResidual:
    """U_t - V_x + UV - VU for the supplied rates.

    Each entry is scaled by the sum of max norms of its four contributions.
    """
    if gamma is not None and any(gamma):
        warnings.warn("Lax pair is derived for gamma = 0; residual is diagnostic only",
                      stacklevel=2)
    data = build_lax(f, v, lam)
    lam = data.lam
    # d/dt Lambda(f) = mu(f_t) - f_txx
    Q_t = lam * (mean(f_t) - deriv(f_t, 2)) - (2.0 * lam * lam) * (v * v_t)
    U_t = [[0.0, 0.0], [Q_t, 0.0]]
    V_x = [[deriv(e) if isinstance(e, Field) else 0.0 for e in row] for row in data.V]
    UV = matmul(data.U, data.V)
    VU = matmul(data.V, data.U)
    entries = [[None, None], [None, None]]
    scales = np.zeros((2, 2))
    for i in range(2):
        for j in range(2):
            e = _add(_add(U_t[i][j], _neg(V_x[i][j])), _add(UV[i][j], _neg(VU[i][j])))
            entries[i][j] = e
            scales[i, j] = sum(_entry_norm(m[i][j]) for m in (U_t, V_x, UV, VU))
    return ZeroCurvatureResidual(entries, scales)
