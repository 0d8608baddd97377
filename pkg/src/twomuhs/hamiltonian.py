"""Hamiltonians H1, H2, the Poisson operators J1, J2 and their brackets.

Covectors are pairs (xi, eta) of fields paired with (u, v) through the L2
product. The central charges gamma are parameters, never dynamical variables.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .algebra import (
    STANDARD,
    ZERO3,
    AlgebraElement,
    CocycleVariant,
    DualElement,
    Triple,
    bracket,
    coadjoint,
    pairing,
)
from .spectral import Field, PeriodicGrid, deriv, inner, lambda_apply, lambda_invert, mean

# Sign relating the Lie-Poisson bracket <u, [dF, dG]> to int dF . J2 dG.
# Fixed by requiring the Lie-Poisson flow of H1 to be the Euler flow
# du/dt = ad*_{A^-1 u} u (checked in tests/test_hamiltonian.py).
BRACKET_SIGN = 1

Covector = tuple[Field, Field]


@dataclass(frozen=True)
class Functional:
    name: str
    evaluate: Callable[[Field, Field, Triple], float]
    variational_derivative: Optional[Callable[[Field, Field, Triple], Covector]] = None

    def __call__(self, u: Field, v: Field, gamma: Triple = ZERO3) -> float:
        return float(self.evaluate(u, v, gamma))

    def gradient(self, u: Field, v: Field, gamma: Triple = ZERO3) -> Covector:
        if self.variational_derivative is not None:
            return self.variational_derivative(u, v, gamma)
        return fd_gradient(self, u, v, gamma)


@dataclass(frozen=True)
class FrozenPoint:
    u0: Field
    v0: Field
    gamma0: Triple

    @classmethod
    def standard(cls, grid: PeriodicGrid) -> "FrozenPoint":
        """The freezing point (0, 0, (1, 0, 1/2)) at which the frozen operator is J1."""
        return cls(grid.zeros(), grid.zeros(), (1.0, 0.0, 0.5))

    def as_dual(self) -> DualElement:
        return DualElement(self.u0, self.v0, self.gamma0)


def h1(u: Field, v: Field) -> float:
    f = lambda_invert(u)
    return 0.5 * (inner(u, f) + inner(v, v))


def h2(u: Field, v: Field, gamma: Triple = ZERO3) -> float:
    g1, g2, g3 = gamma
    f = lambda_invert(u)
    fx = deriv(f)
    return (mean(f) * inner(f, f)
            + 0.5 * inner(f, fx * fx)
            + 0.5 * inner(f, v * v)
            - g2 * inner(v, fx)
            + g3 * inner(v, v)
            - 0.5 * g1 * inner(f, deriv(f, 2)))


def vd_h1(u: Field, v: Field) -> Covector:
    return lambda_invert(u), v


def vd_h2(u: Field, v: Field, gamma: Triple = ZERO3, printed: bool = False) -> Covector:
    """Variational derivative of H2.

    ``printed=True`` drops the v^2/2 term inside the inverse inertia operator,
    which is the form that fails the finite-difference check.
    """
    g1, g2, g3 = gamma
    f = lambda_invert(u)
    fx, fxx = deriv(f), deriv(f, 2)
    mu = mean(f)
    inside = (mean(f * f) + 2.0 * mu * f - 0.5 * (fx * fx) - f * fxx
              - g1 * fxx + g2 * deriv(v))
    if not printed:
        inside = inside + 0.5 * (v * v)
    dv = v * f - g2 * fx + 2.0 * g3 * v
    return lambda_invert(inside), dv


H1 = Functional("H1", lambda u, v, gamma: h1(u, v), lambda u, v, gamma: vd_h1(u, v))
H2 = Functional("H2", h2, vd_h2)


def apply_j1(xi: Field, eta: Field) -> Covector:
    return deriv(lambda_apply(xi)), deriv(eta)


def apply_j2(u: Field, v: Field, gamma: Triple, xi: Field, eta: Field) -> Covector:
    g1, g2, g3 = gamma
    xi_x = deriv(xi)
    eta_x = deriv(eta)
    first = u * xi_x + deriv(u * xi) - g1 * deriv(xi, 3) + v * eta_x + g2 * deriv(eta, 2)
    second = deriv(v * xi) - g2 * deriv(xi, 2) + 2.0 * g3 * eta_x
    return first, second


def covector_pairing(a: Covector, b: Covector) -> float:
    return inner(a[0], b[0]) + inner(a[1], b[1])


def fd_gradient(F, u: Field, v: Field, gamma: Triple = ZERO3, rel_step: float = 1e-5) -> Covector:
    """Central-difference gradient of F per grid sample, divided by dx."""
    if isinstance(F, Functional):
        evaluate = F.evaluate
    else:
        evaluate = F
    grid = u.grid
    out = []
    for idx, fld in enumerate((u, v)):
        h = rel_step * max(1.0, fld.max_norm())
        base = fld.values.copy()
        grad = np.empty(grid.n)
        for j in range(grid.n):
            vals = []
            for s in (h, -h):
                pert = base.copy()
                pert[j] += s
                p = Field(grid, pert)
                args = (p, v) if idx == 0 else (u, p)
                vals.append(evaluate(*args, gamma))
            grad[j] = (vals[0] - vals[1]) / (2.0 * h * grid.dx)
        out.append(Field(grid, grad))
    return out[0], out[1]


def _as_algebra(cov: Covector) -> AlgebraElement:
    # F depends on gamma only as a parameter: zero central slot
    return AlgebraElement(cov[0], cov[1], ZERO3)


def lie_poisson_bracket(F: Functional, G: Functional, du: DualElement,
                        variant: CocycleVariant = STANDARD) -> float:
    dF = _as_algebra(F.gradient(du.u, du.v, du.gamma))
    dG = _as_algebra(G.gradient(du.u, du.v, du.gamma))
    return pairing(du, bracket(dF, dG, variant))


def j2_bracket(F: Functional, G: Functional, du: DualElement) -> float:
    """BRACKET_SIGN * int dF . J2 dG, the operator form of the Lie-Poisson bracket."""
    dF = F.gradient(du.u, du.v, du.gamma)
    dG = G.gradient(du.u, du.v, du.gamma)
    return BRACKET_SIGN * covector_pairing(dF, apply_j2(du.u, du.v, du.gamma, *dG))


def frozen_bracket(F: Functional, G: Functional, du: DualElement, point: FrozenPoint,
                   variant: CocycleVariant = STANDARD) -> float:
    """Lie-Poisson bracket with the pairing taken at the frozen point."""
    dF = _as_algebra(F.gradient(du.u, du.v, du.gamma))
    dG = _as_algebra(G.gradient(du.u, du.v, du.gamma))
    return pairing(point.as_dual(), bracket(dF, dG, variant))


def j1_bracket(F: Functional, G: Functional, du: DualElement) -> float:
    dF = F.gradient(du.u, du.v, du.gamma)
    dG = G.gradient(du.u, du.v, du.gamma)
    return covector_pairing(dF, apply_j1(*dG))


def frozen_flow(F: Functional, du: DualElement, point: FrozenPoint,
                variant: CocycleVariant = STANDARD) -> Covector:
    """(u_t, v_t) = ad*_{dF} u0 for the Hamiltonian F under the frozen bracket.

    For constant u0 this is the familiar
    u_t = 2 u0 F_u' + F_v' v0 - g1 F_u''' + g2 F_v'',
    v_t = (v0 F_u)' - g2 F_u'' + 2 g3 F_v';
    a non-constant u0 adds the u0' F_u term that the coadjoint action requires.
    """
    x = _as_algebra(F.gradient(du.u, du.v, du.gamma))
    out = coadjoint(x, point.as_dual(), variant)
    return out.u, out.v


def _j2_structural(w: Covector, xi: Covector) -> Covector:
    """Derivative of J2 in direction w (J2 is affine in (u, v)), applied to xi."""
    wu, wv = w
    x, e = xi
    first = wu * deriv(x) + deriv(wu * x) + wv * deriv(e)
    second = deriv(wv * x)
    return first, second


def jacobi_terms(which: str, du: DualElement, xis: Sequence[Covector],
                 point: Optional[FrozenPoint] = None) -> np.ndarray:
    """The three cyclic terms <J'(u)[K xi_i] xi_j, xi_k> of the Jacobi obstruction.

    ``which="J2"`` uses K = J2; ``"pencil"`` uses K = J1, or the operator frozen
    at ``point`` if one is given; ``"J1"`` has a constant operator so every
    term is zero.
    """
    if len(xis) != 3:
        raise ValueError("need three covectors")
    for xi in xis:
        if xi[0].grid != du.grid or xi[1].grid != du.grid:
            raise ValueError("grid mismatch")
    if which == "J1":
        return np.zeros(3)

    if which == "J2":
        def K(xi):
            return apply_j2(du.u, du.v, du.gamma, *xi)
    elif which == "pencil":
        if point is None:
            def K(xi):
                return apply_j1(*xi)
        else:
            def K(xi):
                return apply_j2(point.u0, point.v0, point.gamma0, *xi)
    else:
        raise ValueError(f"unknown operator {which!r}")

    terms = []
    for i in range(3):
        a, b, c = xis[i], xis[(i + 1) % 3], xis[(i + 2) % 3]
        terms.append(covector_pairing(_j2_structural(K(a), b), c))
    return np.array(terms)


def jacobi_residual(which: str, du: DualElement, xis: Sequence[Covector],
                    point: Optional[FrozenPoint] = None) -> float:
    return float(np.sum(jacobi_terms(which, du, xis, point)))
