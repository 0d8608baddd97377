"""The centrally extended algebra Vect(S^1) |x C^inf(S^1) + R^3 and its regular dual.

An algebra element is (f d/dx, a, alpha); a dual element is (u dx^2, v, gamma).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .spectral import (
    Field,
    PeriodicGrid,
    _check_same_grid,
    deriv,
    inner,
    lambda_apply,
    lambda_invert,
    mean,
    read_field_csv,
    write_field_csv,
)

Triple = tuple[float, float, float]
ZERO3: Triple = (0.0, 0.0, 0.0)


def _triple(t) -> Triple:
    t = tuple(float(c) for c in t)
    if len(t) != 3:
        raise ValueError(f"expected a real triple, got {t!r}")
    return t


@dataclass(frozen=True)
class AlgebraElement:
    f: Field
    a: Field
    alpha: Triple = ZERO3

    def __post_init__(self):
        _check_same_grid(self.f, self.a)
        object.__setattr__(self, "alpha", _triple(self.alpha))

    @property
    def grid(self) -> PeriodicGrid:
        return self.f.grid

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.f + other.f, self.a + other.a,
                              tuple(np.add(self.alpha, other.alpha)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-1.0) * other

    def __mul__(self, s: float) -> "AlgebraElement":
        return AlgebraElement(self.f * s, self.a * s, tuple(s * np.asarray(self.alpha)))

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self


@dataclass(frozen=True)
class DualElement:
    u: Field
    v: Field
    gamma: Triple = ZERO3

    def __post_init__(self):
        _check_same_grid(self.u, self.v)
        object.__setattr__(self, "gamma", _triple(self.gamma))

    @property
    def grid(self) -> PeriodicGrid:
        return self.u.grid

    def __add__(self, other: "DualElement") -> "DualElement":
        return DualElement(self.u + other.u, self.v + other.v,
                           tuple(np.add(self.gamma, other.gamma)))

    def __mul__(self, s: float) -> "DualElement":
        return DualElement(self.u * s, self.v * s, tuple(s * np.asarray(self.gamma)))

    __rmul__ = __mul__


@dataclass(frozen=True)
class CocycleVariant:
    """Choice of the first cocycle and of the omega_3 form.

    ``kind="modified"`` replaces int f'g'' by int (c1 f'g'' + c2 f'g).
    ``omega3="printed"`` selects the symmetric form 2 int a b'' that is kept
    only to demonstrate that it is not a cocycle.
    """

    kind: str = "standard"
    c1: float = 1.0
    c2: float = 0.0
    omega3: str = field(default="corrected")

    def __post_init__(self):
        if self.kind not in ("standard", "modified"):
            raise ValueError(f"unknown cocycle kind {self.kind!r}")
        if self.omega3 not in ("corrected", "printed"):
            raise ValueError(f"unknown omega3 form {self.omega3!r}")

    @property
    def coefficients(self) -> tuple[float, float]:
        if self.kind == "standard":
            return 1.0, 0.0
        return float(self.c1), float(self.c2)


STANDARD = CocycleVariant()


def cocycles(x: AlgebraElement, y: AlgebraElement, variant: CocycleVariant = STANDARD) -> Triple:
    _check_same_grid(x.f, y.f)
    c1, c2 = variant.coefficients
    fx = deriv(x.f)
    w1 = c1 * inner(fx, deriv(y.f, 2))
    if c2:
        w1 += c2 * inner(fx, y.f)
    w2 = inner(deriv(x.f, 2), y.a) - inner(deriv(y.f, 2), x.a)
    if variant.omega3 == "printed":
        w3 = 2.0 * inner(x.a, deriv(y.a, 2))
    else:
        w3 = 2.0 * inner(x.a, deriv(y.a))
    return (w1, w2, w3)


def bracket_alg(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Bracket of the non-extended algebra (central slot zero)."""
    _check_same_grid(x.f, y.f)
    vec = x.f * deriv(y.f) - deriv(x.f) * y.f
    fun = x.f * deriv(y.a) - deriv(x.a) * y.f
    return AlgebraElement(vec, fun, ZERO3)


def bracket(x: AlgebraElement, y: AlgebraElement, variant: CocycleVariant = STANDARD) -> AlgebraElement:
    """Commutator of the central extension; central inputs alpha never enter."""
    b = bracket_alg(x, y)
    return AlgebraElement(b.f, b.a, cocycles(x, y, variant))


def pairing(du: DualElement, x: AlgebraElement) -> float:
    _check_same_grid(du.u, x.f)
    return inner(du.u, x.f) + inner(x.a, du.v) + float(np.dot(du.gamma, x.alpha))


def inner_mu(x: AlgebraElement, y: AlgebraElement) -> float:
    """mu(f)mu(g) + int (f'g' + ab) + alpha.beta"""
    _check_same_grid(x.f, y.f)
    return (mean(x.f) * mean(y.f) + inner(deriv(x.f), deriv(y.f)) + inner(x.a, y.a)
            + float(np.dot(x.alpha, y.alpha)))


def inertia(y: AlgebraElement) -> DualElement:
    return DualElement(lambda_apply(y.f), y.a, y.alpha)


def inertia_inverse(du: DualElement) -> AlgebraElement:
    return AlgebraElement(lambda_invert(du.u), du.v, du.gamma)


def coadjoint(x: AlgebraElement, du: DualElement, variant: CocycleVariant = STANDARD) -> DualElement:
    """ad*_x(du), defined by <ad*_x du, y> = -<du, [x, y]>.

    The central charges entering the result are those of ``du``.
    """
    _check_same_grid(x.f, du.u)
    g1, g2, g3 = du.gamma
    c1, c2 = variant.coefficients
    f, a, u, v = x.f, x.a, du.u, du.v
    fx = deriv(f)
    ax = deriv(a)
    u_part = 2.0 * (u * fx) + deriv(u) * f + ax * v + g2 * deriv(a, 2)
    u_part = u_part - (g1 * c1) * deriv(f, 3)
    if c2:
        u_part = u_part - (g1 * c2) * fx
    v_part = deriv(v * f) - g2 * deriv(f, 2)
    if variant.omega3 == "printed":
        v_part = v_part - (2.0 * g3) * deriv(a, 2)
    else:
        v_part = v_part + (2.0 * g3) * ax
    return DualElement(u_part, v_part, ZERO3)


def save_element(el, directory) -> None:
    """Write an AlgebraElement or DualElement as two field CSVs plus a JSON header."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    if isinstance(el, AlgebraElement):
        kind, names, central = "algebra", ("f", "a"), el.alpha
        parts = (el.f, el.a)
    else:
        kind, names, central = "dual", ("u", "v"), el.gamma
        parts = (el.u, el.v)
    for name, fld in zip(names, parts):
        write_field_csv(fld, d / f"{name}.csv")
    header = {"kind": kind, "fields": list(names), "central": list(central), "n": el.grid.n}
    (d / "element.json").write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")


def load_element(directory):
    d = Path(directory)
    header = json.loads((d / "element.json").read_text())
    parts = [read_field_csv(d / f"{name}.csv") for name in header["fields"]]
    cls = AlgebraElement if header["kind"] == "algebra" else DualElement
    return cls(*parts, tuple(header["central"]))
