"""Time evolution of the two-component muHS system.

The state is (f, v) with central charges gamma; u = Lambda(f) is derived.
Five right-hand sides are provided that must agree to spectral accuracy:

direct     transcription of -f_xxt = 2 mu f_x - 2 f_x f_xx - f f_xxx + v v_x
           - g1 f_xxx + g2 v_xx, v_t = (v f)_x - g2 f_xx + 2 g3 v_x
j1         J1 applied to the gradient of H2
j2         J2 applied to the gradient of H1
coadjoint  du/dt = ad*_{A^-1 u} u
frozen     frozen Lie-Poisson flow of H2 at (0, 0, (1, 0, 1/2))
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import STANDARD, CocycleVariant, DualElement, Triple, coadjoint, inertia_inverse
from .hamiltonian import H2, FrozenPoint, apply_j1, apply_j2, frozen_flow, h1, h2, vd_h1, vd_h2
from .spectral import Field, deriv, inverse_deriv, lambda_apply, lambda_invert, mean, project

log = logging.getLogger(__name__)

FORMULATIONS = ("direct", "j1", "j2", "coadjoint", "frozen")
BLOWUP_THRESHOLD = 1e6


class BlowUpError(RuntimeError):
    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class State:
    f: Field
    v: Field
    gamma: Triple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.f.grid != self.v.grid:
            raise ValueError("f and v must share a grid")
        object.__setattr__(self, "gamma", tuple(float(g) for g in self.gamma))

    @property
    def grid(self):
        return self.f.grid

    @property
    def u(self) -> Field:
        return lambda_apply(self.f)

    def dual(self) -> DualElement:
        return DualElement(self.u, self.v, self.gamma)

    def replace(self, f: Field, v: Field) -> "State":
        return State(f, v, self.gamma)


def _f_rate_from_u_rate(u_t: Field) -> Field:
    # mean(u_t) vanishes identically (integration by parts); drop the roundoff residue
    return lambda_invert(u_t - mean(u_t))


def _rhs_direct(state: State, c1: float = 1.0, c2: float = 0.0) -> tuple[Field, Field]:
    g1, g2, g3 = state.gamma
    f, v = state.f, state.v
    fx, fxx, fxxx = deriv(f), deriv(f, 2), deriv(f, 3)
    vx = deriv(v)
    minus_fxxt = (2.0 * mean(f) * fx - 2.0 * (fx * fxx) - f * fxxx + vx * v
                  - (g1 * c1) * fxxx + g2 * deriv(v, 2))
    if c2:
        minus_fxxt = minus_fxxt + (g1 * c2) * fx
    f_t = -inverse_deriv(minus_fxxt, 2)
    v_t = deriv(v * f) - g2 * fxx + 2.0 * g3 * vx
    return f_t, v_t


def rhs(state: State, formulation: str = "direct",
        variant: CocycleVariant = STANDARD) -> tuple[Field, Field]:
    """Time derivative (f_t, v_t) under the chosen formulation.

    ``variant`` only affects the coadjoint formulation; use ``rhs_modified``
    for the direct form with the modified cocycle.
    """
    if formulation == "direct":
        return _rhs_direct(state)
    if formulation == "j1":
        u_t, v_t = apply_j1(*vd_h2(state.u, state.v, state.gamma))
    elif formulation == "j2":
        u_t, v_t = apply_j2(state.u, state.v, state.gamma, *vd_h1(state.u, state.v))
    elif formulation == "coadjoint":
        du = state.dual()
        out = coadjoint(inertia_inverse(du), du, variant)
        u_t, v_t = out.u, out.v
    elif formulation == "frozen":
        u_t, v_t = frozen_flow(H2, state.dual(), FrozenPoint.standard(state.grid))
    else:
        raise ValueError(f"unknown formulation {formulation!r}; expected one of {FORMULATIONS}")
    return _f_rate_from_u_rate(u_t), v_t


def rhs_modified(state: State, c1: float, c2: float,
                 printed_sign: bool = False) -> tuple[Field, Field]:
    """Direct right-hand side for the modified first cocycle.

    The u-equation carries -g1 (c1 f_xxx + c2 f_x), the sign that follows
    from the cocycle int (c1 f'g'' + c2 f'g). ``printed_sign=True`` flips the
    c2 term to +g1 c2 f_x for comparison.
    """
    return _rhs_direct(state, c1, c2 if printed_sign else -c2)


def rhs_muhs(f: Field) -> Field:
    """Scalar muHS: f_t = Lambda^-1(-2 mu f_x + 2 f_x f_xx + f f_xxx)."""
    fx, fxx, fxxx = deriv(f), deriv(f, 2), deriv(f, 3)
    rhs_ = -2.0 * mean(f) * fx + 2.0 * (fx * fxx) + f * fxxx
    return _f_rate_from_u_rate(rhs_)


def relative_discrepancy(a: tuple[Field, Field], b: tuple[Field, Field]) -> float:
    diff = max(np.max(np.abs(x.values - y.values)) for x, y in zip(a, b))
    scale = max(max(x.max_norm(), y.max_norm()) for x, y in zip(a, b))
    return float(diff / scale) if scale > 0 else float(diff)


def formulation_discrepancy(state: State, formulations=FORMULATIONS) -> float:
    """Largest pairwise relative discrepancy among the right-hand sides."""
    rates = {name: rhs(state, name) for name in formulations}
    return max((relative_discrepancy(rates[a], rates[b])
                for a, b in itertools.combinations(formulations, 2)), default=0.0)


def rk4(fun: Callable, y: tuple[Field, ...], dt: float) -> tuple[Field, ...]:
    k1 = fun(y)
    k2 = fun(tuple(a + (0.5 * dt) * k for a, k in zip(y, k1)))
    k3 = fun(tuple(a + (0.5 * dt) * k for a, k in zip(y, k2)))
    k4 = fun(tuple(a + dt * k for a, k in zip(y, k3)))
    return tuple(a + (dt / 6.0) * (p + 2.0 * q + 2.0 * r + s)
                 for a, p, q, r, s in zip(y, k1, k2, k3, k4))


def step_rk4(state: State, dt: float, formulation: str = "direct",
             variant: CocycleVariant = STANDARD) -> State:
    if not dt > 0:
        raise ValueError("dt must be positive")

    def fun(y):
        return rhs(state.replace(*y), formulation, variant)

    f, v = rk4(fun, (state.f, state.v), dt)
    f, v = project(f), project(v)
    if not (np.all(np.isfinite(f.values)) and np.all(np.isfinite(v.values))):
        raise BlowUpError("non-finite values after RK4 step",
                          {"reason": "non-finite", "dt": dt})
    return state.replace(f, v)


def evolve_muhs(f: Field, dt: float, steps: int) -> Field:
    """RK4 evolution of the scalar muHS equation; dt may be negative."""
    for _ in range(steps):
        (f,) = rk4(lambda y: (rhs_muhs(y[0]),), (f,), dt)
        f = project(f)
    return f


@dataclass(frozen=True)
class StepperConfig:
    dt: float = 1e-3
    t_end: float = 1.0
    formulation: str = "direct"
    variant: CocycleVariant = STANDARD
    cadence: int = 10
    monitor_discrepancy: bool = True

    @property
    def steps(self) -> int:
        return int(round(self.t_end / self.dt))


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    monitors: dict = field(default_factory=lambda: {"mu": [], "H1": [], "H2": [], "discrepancy": []})

    def record(self, t: float, state: State, discrepancy: bool = True) -> None:
        self.times.append(t)
        self.states.append(state)
        self.monitors["mu"].append(mean(state.f))
        self.monitors["H1"].append(h1(state.u, state.v))
        self.monitors["H2"].append(h2(state.u, state.v, state.gamma))
        self.monitors["discrepancy"].append(formulation_discrepancy(state) if discrepancy else 0.0)

    @property
    def final(self) -> State:
        return self.states[-1]


def integrate(state: State, cfg: StepperConfig) -> Trajectory:
    """Fixed-step RK4 to t_end, recording monitors every ``cadence`` steps."""
    if not cfg.t_end > 0:
        raise ValueError("t_end must be positive")
    steps = cfg.steps
    traj = Trajectory()
    traj.record(0.0, state, cfg.monitor_discrepancy)
    for i in range(1, steps + 1):
        state = step_rk4(state, cfg.dt, cfg.formulation, cfg.variant)
        peak = max(state.f.max_norm(), state.v.max_norm())
        if peak > BLOWUP_THRESHOLD:
            report = {"reason": "max-norm", "step": i, "t": i * cfg.dt, "max_norm": peak,
                      "threshold": BLOWUP_THRESHOLD}
            log.warning("blow-up at t=%g (max norm %g)", i * cfg.dt, peak)
            raise BlowUpError(f"max norm {peak:.3g} exceeded {BLOWUP_THRESHOLD:g} at t={i * cfg.dt:g}",
                              report)
        if i % cfg.cadence == 0 or i == steps:
            traj.record(i * cfg.dt, state, cfg.monitor_discrepancy)
    return traj


def smooth_default(grid, gamma: Triple = (0.0, 0.0, 0.0), mu0: float = 1.0) -> State:
    """f = mu0 + 0.1 cos(2 pi x), v = 0.05 sin(2 pi x)."""
    f = grid.field(lambda x: mu0 + 0.1 * np.cos(2 * np.pi * x))
    v = grid.field(lambda x: 0.05 * np.sin(2 * np.pi * x))
    return State(f, v, gamma)
