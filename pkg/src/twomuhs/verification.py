"""Numerical certification suite behind ``twomuhs verify``.

Every check records the measured residual, its tolerance, the direction of
the comparison (``<=`` for identities, ``>=`` for negative controls) and a
pass flag. ``run_verification`` executes the ten criteria in order.
"""
from __future__ import annotations

import itertools
import json
import logging
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import (
    STANDARD,
    AlgebraElement,
    CocycleVariant,
    DualElement,
    bracket,
    bracket_alg,
    coadjoint,
    cocycles,
    pairing,
)
from .dynamics import (
    FORMULATIONS,
    State,
    StepperConfig,
    evolve_muhs,
    integrate,
    relative_discrepancy,
    rhs,
    smooth_default,
)
from .hamiltonian import (
    H1,
    H2,
    apply_j1,
    apply_j2,
    covector_pairing,
    fd_gradient,
    h1,
    jacobi_terms,
    vd_h2,
)
from .lax import zero_curvature_residual
from .spectral import (
    Field,
    PeriodicGrid,
    RandomFieldSpec,
    deriv,
    inverse_deriv,
    lambda_apply,
    random_field,
)
from .variational import (
    L1Fields,
    L2Fields,
    SpaceTimeGrid,
    action_l1,
    action_l2,
    el1_action_gradients,
    el1_constrain,
    el1_reduce,
    el2_action_gradients,
    el2_residuals,
    fd_action_gradient,
    legendre_h_from_l1,
    legendre_h_from_l2,
    random_spacetime,
)

log = logging.getLogger(__name__)

GAMMA_SAMPLES = ((0.0, 0.0, 0.0), (0.3, 0.2, 0.1), (-0.5, 0.4, 0.7))
NONZERO_GAMMAS = ((0.3, 0.2, 0.1), (-0.5, 0.4, 0.7), (1.0, -0.3, 0.5))
MODIFIED = CocycleVariant("modified", c1=0.7, c2=1.3)
LAX_LAMBDAS = (0.5, 1.0, 2.0)
KAPPA_L2 = -2.0  # H / H2 for constant f: H = -2c^3, H2 = c^3


@dataclass
class Check:
    criterion: int
    name: str
    residual: float
    tolerance: float
    comparison: str = "<="
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.residual):
            return False
        if self.comparison == ">=":
            return self.residual >= self.tolerance
        return self.residual <= self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] C{self.criterion:<2d} {self.name:<44s} "
                f"{self.residual:.3e} {self.comparison} {self.tolerance:.1e}")


@dataclass
class VerifyReport:
    checks: list
    settings: dict
    environment: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def criterion_passed(self, criterion: int) -> bool:
        return all(c.passed for c in self.checks if c.criterion == criterion)

    def to_dict(self) -> dict:
        entries = []
        for c in self.checks:
            d = asdict(c)
            d["passed"] = c.passed
            entries.append(d)
        n_pass = sum(c.passed for c in self.checks)
        return {
            "passed": self.passed,
            "summary": {"total": len(self.checks), "passed": n_pass,
                        "failed": len(self.checks) - n_pass},
            "settings": self.settings,
            "environment": self.environment,
            "checks": entries,
        }

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True,
                                         default=float) + "\n")


def environment_stamp() -> dict:
    return {
        "package": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "machine": platform.machine(),
        "float": "float64",
    }


class _Seeds:
    """Deterministic stream of child seeds."""

    def __init__(self, seed: int):
        self._rng = np.random.default_rng(seed)

    def __call__(self) -> int:
        return int(self._rng.integers(0, 2**62))


def _rand(grid, seeds, k_max=16, amplitude=0.5, mean=0.0) -> Field:
    return random_field(RandomFieldSpec(seeds(), k_max, amplitude, mean), grid)


def _rand_algebra(grid, seeds, k_max=16) -> AlgebraElement:
    alpha = tuple(np.random.default_rng(seeds()).normal(size=3))
    return AlgebraElement(_rand(grid, seeds, k_max), _rand(grid, seeds, k_max), alpha)


def _rand_dual(grid, seeds, k_max=16) -> DualElement:
    gamma = tuple(np.random.default_rng(seeds()).normal(size=3))
    return DualElement(_rand(grid, seeds, k_max, mean=0.3), _rand(grid, seeds, k_max), gamma)


def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else abs(a - b)


def _field_rel(a: Field, b: Field) -> float:
    scale = max(a.max_norm(), b.max_norm())
    d = float(np.max(np.abs(a.values - b.values)))
    return d / scale if scale > 0 else d


# 1 -------------------------------------------------------------------------
def check_formulations(grid, seeds, trials=100, k_max=16) -> list[Check]:
    worst = 0.0
    for _ in range(trials):
        f = _rand(grid, seeds, k_max, 0.5, 1.0)
        v = _rand(grid, seeds, k_max, 0.5, 0.2)
        for gamma in GAMMA_SAMPLES:
            rates = {name: rhs(State(f, v, gamma), name) for name in FORMULATIONS}
            for a, b in itertools.combinations(FORMULATIONS, 2):
                worst = max(worst, relative_discrepancy(rates[a], rates[b]))
    return [Check(1, "formulation_equivalence", worst, 1e-9,
                  detail={"states": trials, "gammas": [list(g) for g in GAMMA_SAMPLES]})]


# 2 -------------------------------------------------------------------------
def check_coadjoint(grid, seeds, trials=100) -> list[Check]:
    out = []
    for label, variant in (("standard", STANDARD), ("modified", MODIFIED)):
        worst = 0.0
        for _ in range(trials):
            x, y, du = _rand_algebra(grid, seeds), _rand_algebra(grid, seeds), _rand_dual(grid, seeds)
            lhs = pairing(coadjoint(x, du, variant), y)
            rhs_ = -pairing(du, bracket(x, y, variant))
            worst = max(worst, _rel(lhs, rhs_))
        out.append(Check(2, f"coadjoint_identity[{label}]", worst, 1e-10))
    return out


# 3 -------------------------------------------------------------------------
COCYCLE_FORMS = {
    "omega1": (STANDARD, 0),
    "omega1_modified": (MODIFIED, 0),
    "omega2": (STANDARD, 1),
    "omega3": (STANDARD, 2),
}


def check_cocycles(grid, seeds, trials=20) -> list[Check]:
    out = []
    for name, (variant, comp) in COCYCLE_FORMS.items():
        anti = 0.0
        cyc = 0.0
        for _ in range(trials):
            x, y, z = (_rand_algebra(grid, seeds) for _ in range(3))
            wxy = cocycles(x, y, variant)[comp]
            wyx = cocycles(y, x, variant)[comp]
            anti = max(anti, abs(wxy + wyx) / max(abs(wxy) + abs(wyx), 1e-300))
            terms = [cocycles(bracket_alg(a, b), c, variant)[comp]
                     for a, b, c in ((x, y, z), (y, z, x), (z, x, y))]
            cyc = max(cyc, abs(sum(terms)) / max(sum(map(abs, terms)), 1e-300))
        out.append(Check(3, f"antisymmetry[{name}]", anti, 1e-10))
        out.append(Check(3, f"cocycle_identity[{name}]", cyc, 1e-10))

    jac = 0.0
    for _ in range(trials):
        x, y, z = (_rand_algebra(grid, seeds) for _ in range(3))
        parts = [bracket(bracket(a, b), c) for a, b, c in ((x, y, z), (y, z, x), (z, x, y))]
        total = parts[0] + parts[1] + parts[2]
        scale_f = max(max(p.f.max_norm() for p in parts), 1e-300)
        scale_a = max(max(p.a.max_norm() for p in parts), 1e-300)
        scale_c = max(max(np.max(np.abs(p.alpha)) for p in parts), 1e-300)
        jac = max(jac, total.f.max_norm() / scale_f, total.a.max_norm() / scale_a,
                  float(np.max(np.abs(total.alpha))) / scale_c)
    out.append(Check(3, "bracket_jacobi", jac, 1e-10))

    # The printed omega3 = 2 int a b'' is symmetric. On a = sin, b = cos both
    # orderings vanish, so the failure is shown with b = sin + cos.
    printed = CocycleVariant(omega3="printed")
    zero = grid.zeros()
    sin = grid.field(lambda t: np.sin(2 * np.pi * t))
    cos = grid.field(lambda t: np.cos(2 * np.pi * t))
    literal = (cocycles(AlgebraElement(zero, sin), AlgebraElement(zero, cos), printed)[2]
               + cocycles(AlgebraElement(zero, cos), AlgebraElement(zero, sin), printed)[2])
    x, y = AlgebraElement(zero, sin), AlgebraElement(zero, sin + cos)
    resid = abs(cocycles(x, y, printed)[2] + cocycles(y, x, printed)[2])
    out.append(Check(3, "printed_omega3_fails_antisymmetry", resid, 1e-2, ">=",
                     detail={"a": "sin(2 pi x)", "b": "sin(2 pi x) + cos(2 pi x)",
                             "sin_cos_pair_residual": abs(literal)}))
    return out


# 4 -------------------------------------------------------------------------
def check_bihamiltonian(grid, seeds, trials=100, k_max=16) -> list[Check]:
    worst = {"J1": 0.0, "J2": 0.0, "pencil": 0.0}
    skew1 = skew2 = 0.0
    for _ in range(trials):
        du = DualElement(lambda_apply(_rand(grid, seeds, k_max, 0.5, 1.0)),
                         _rand(grid, seeds, k_max, 0.5, 0.2),
                         tuple(np.random.default_rng(seeds()).normal(size=3)))
        xis = [(_rand(grid, seeds, k_max), _rand(grid, seeds, k_max)) for _ in range(3)]
        for which in worst:
            terms = jacobi_terms(which, du, xis)
            s = float(np.sum(np.abs(terms)))
            val = abs(float(np.sum(terms)))
            worst[which] = max(worst[which], val / s if s > 0 else val)
        a, b = xis[0], xis[1]
        p, q = covector_pairing(b, apply_j1(*a)), covector_pairing(a, apply_j1(*b))
        skew1 = max(skew1, abs(p + q) / max(abs(p) + abs(q), 1e-300))
        p = covector_pairing(b, apply_j2(du.u, du.v, du.gamma, *a))
        q = covector_pairing(a, apply_j2(du.u, du.v, du.gamma, *b))
        skew2 = max(skew2, abs(p + q) / max(abs(p) + abs(q), 1e-300))
    return [
        Check(4, "jacobi[J1]", worst["J1"], 0.0),
        Check(4, "jacobi[J2]", worst["J2"], 1e-9),
        Check(4, "jacobi[pencil]", worst["pencil"], 1e-9),
        Check(4, "skew_adjoint[J1]", skew1, 1e-10),
        Check(4, "skew_adjoint[J2]", skew2, 1e-10),
    ]


# 5 -------------------------------------------------------------------------
def check_gradients(grid, seeds, trials=3, k_max=16) -> list[Check]:
    e1 = e2 = 0.0
    neg = np.inf
    for i in range(trials):
        gamma = GAMMA_SAMPLES[i % len(GAMMA_SAMPLES)]
        u = lambda_apply(_rand(grid, seeds, k_max, 0.5, 1.0))
        v = _rand(grid, seeds, k_max, 1.0, 0.5)
        for F, store in ((H1, 1), (H2, 2)):
            fd = fd_gradient(F, u, v, gamma)
            an = F.gradient(u, v, gamma)
            err = max(_field_rel(a, b) for a, b in zip(fd, an))
            if store == 1:
                e1 = max(e1, err)
            else:
                e2 = max(e2, err)
                printed = vd_h2(u, v, gamma, printed=True)
                neg = min(neg, max(_field_rel(a, b) for a, b in zip(fd, printed)))
    return [
        Check(5, "gradient[H1]", e1, 1e-6),
        Check(5, "gradient[H2]", e2, 1e-6),
        Check(5, "printed_gradient[H2]_fails", float(neg), 1e-2, ">="),
    ]


# 6 / 7 ---------------------------------------------------------------------
def _drift(series) -> float:
    return abs(series[-1] - series[0]) / abs(series[0])


def check_conservation(grid, dt=1e-3, t_end=1.0):
    """Returns (checks, trajectory at dt) so the Lax checks can reuse it."""
    state = smooth_default(grid)
    coarse = integrate(state, StepperConfig(dt=dt, t_end=t_end, cadence=50,
                                            monitor_discrepancy=False))
    fine = integrate(state, StepperConfig(dt=dt / 2, t_end=t_end, cadence=10**9,
                                          monitor_discrepancy=False))
    d1, d2 = _drift(coarse.monitors["H1"]), _drift(coarse.monitors["H2"])
    dmu = abs(coarse.monitors["mu"][-1] - coarse.monitors["mu"][0])
    ratio = d1 / _drift(fine.monitors["H1"])
    ratio_h2 = d2 / _drift(fine.monitors["H2"])
    checks = [
        Check(6, "drift[H1]", d1, 1e-8),
        Check(6, "drift[H2]", d2, 1e-8),
        Check(6, "mean_conservation", dmu, 1e-12),
        Check(6, "drift_order[H1] |ratio/16 - 1|", abs(ratio / 16.0 - 1.0), 0.3,
              detail={"ratio": ratio, "h2_ratio": ratio_h2}),
    ]
    return checks, coarse


def check_lax(trajectory) -> list[Check]:
    worst = 0.0
    structural = 0.0
    neg = np.inf
    for state in trajectory.states:
        f_t, v_t = rhs(state, "direct")
        rate_norm = max(f_t.max_norm(), v_t.max_norm())
        for lam in LAX_LAMBDAS:
            Z = zero_curvature_residual(state.f, state.v, f_t, v_t, lam)
            worst = max(worst, Z.scaled(1, 0), Z.scaled(1, 1))
            structural = max(structural, Z.scaled(0, 0), Z.scaled(0, 1))
            Z0 = zero_curvature_residual(state.f, state.v, state.grid.zeros(), state.grid.zeros(), lam)
            neg = min(neg, Z0.norm(1, 0) / rate_norm)
    return [
        Check(7, "zero_curvature", worst, 1e-9,
              detail={"lambdas": list(LAX_LAMBDAS), "snapshots": len(trajectory.states)}),
        Check(7, "zero_curvature_structural_entries", structural, 1e-12),
        Check(7, "zero_curvature_negative_control", float(neg), 1e-3, ">="),
    ]


# 8 -------------------------------------------------------------------------
def check_variational(grid, seeds, trials=10, st_nt=4, st_n=32) -> list[Check]:
    st = SpaceTimeGrid(st_nt, PeriodicGrid(st_n))
    gamma = GAMMA_SAMPLES[1]
    arrs = [random_spacetime(st, seeds(), k_max=4, m_max=1, mean_value=m)
            for m in (0.5, 0.0, 0.0, 0.0)]
    fd = fd_action_gradient(lambda *a: action_l1(st, *a, gamma), arrs, st)
    an = el1_action_gradients(st, *arrs, gamma)
    e_l1 = max(float(np.max(np.abs(a - b)) / np.max(np.abs(b))) for a, b in zip(fd, an))
    fd = fd_action_gradient(lambda *a: action_l2(st, *a, gamma), arrs[:2], st)
    an = el2_action_gradients(st, *arrs[:2], gamma)
    e_l2 = max(float(np.max(np.abs(a - b)) / np.max(np.abs(b))) for a, b in zip(fd, an))

    red = 0.0
    for gamma in ((0.0, 0.0, 0.0),) + NONZERO_GAMMAS:
        for _ in range(trials):
            r = el1_reduce(_rand(grid, seeds, 10, 0.5, 0.2), _rand(grid, seeds, 10, 0.5), gamma)
            red = max(red, *r.scaled_defects)

    el2 = 0.0
    for gamma in GAMMA_SAMPLES:
        for _ in range(trials):
            f = _rand(grid, seeds, 16, 0.5, 1.0)
            phi = _rand(grid, seeds, 16, 0.1)
            fields = L2Fields(f, phi, gamma)
            f_t_dir, v_t_dir = rhs(State(f, fields.v, gamma), "direct")
            f_t = _rand(grid, seeds, 16, 0.5)
            phi_t = _rand(grid, seeds, 16, 0.5)
            R1, R2 = el2_residuals(fields, f_t, phi_t)
            expect1 = deriv(f_t - f_t_dir, 2)
            expect2 = deriv(phi_t) - v_t_dir
            scale1 = max(deriv(f_t, 2).max_norm(), deriv(f_t_dir, 2).max_norm())
            scale2 = max(deriv(phi_t).max_norm(), v_t_dir.max_norm())
            el2 = max(el2, (deriv(R1) - expect1).max_norm() / scale1,
                      (R2 - expect2).max_norm() / scale2)
            # on the exact flow both residuals vanish
            R1, R2 = el2_residuals(fields, f_t_dir, inverse_deriv(v_t_dir))
            el2 = max(el2, deriv(R1).max_norm() / deriv(f_t_dir, 2).max_norm(),
                      R2.max_norm() / max(v_t_dir.max_norm(), 1e-300))
    return [
        Check(8, "action_gradient[L1]", e_l1, 1e-6, detail={"grid": list(st.shape)}),
        Check(8, "action_gradient[L2]", e_l2, 1e-6, detail={"grid": list(st.shape)}),
        Check(8, "el1_reduce_defects", red, 1e-9),
        Check(8, "el2_reduction", el2, 1e-9),
    ]


# 9 -------------------------------------------------------------------------
def check_legendre(grid, seeds, trials=20) -> list[Check]:
    e1 = 0.0
    ratios = []
    for i in range(trials):
        gamma = GAMMA_SAMPLES[i % len(GAMMA_SAMPLES)]
        w, z = _rand(grid, seeds, 10, 0.5, 0.2), _rand(grid, seeds, 10, 0.5)
        f, v = el1_constrain(w, z, gamma)
        H = legendre_h_from_l1(L1Fields(f, v, w, z, gamma))
        e1 = max(e1, _rel(H, h1(lambda_apply(f), v)))
        fields = L2Fields(_rand(grid, seeds, 16, 0.5, 1.0), _rand(grid, seeds, 16, 0.2), gamma)
        ratios.append(legendre_h_from_l2(fields)[1])
    ratios = np.array(ratios)
    kappa = float(np.mean(ratios))
    c = 1.7
    const = L2Fields(grid.constant(c), grid.zeros())
    H_c, ratio_c = legendre_h_from_l2(const)
    return [
        Check(9, "legendre[L1] = H1", e1, 1e-9),
        Check(9, "legendre[L2] / H2 spread", float(np.max(ratios) - np.min(ratios)), 1e-10,
              detail={"kappa": kappa}),
        Check(9, "legendre[L2] kappa vs constant-field value", abs(kappa - KAPPA_L2), 1e-10,
              detail={"kappa": kappa, "constant_field_ratio": ratio_c, "expected": KAPPA_L2,
                      "constant_field_H": H_c}),
    ]


# 10 ------------------------------------------------------------------------
def check_muhs(grid, dt=1e-3, t_end=1.0, cadence=50) -> list[Check]:
    state = State(grid.field(lambda x: 1.0 + 0.1 * np.cos(2 * np.pi * x)), grid.zeros())
    traj = integrate(state, StepperConfig(dt=dt, t_end=t_end, cadence=cadence,
                                          monitor_discrepancy=False))
    f = state.f
    worst = 0.0
    prev = 0.0
    for t, s in zip(traj.times[1:], traj.states[1:]):
        f = evolve_muhs(f, -dt, int(round((t - prev) / dt)))
        prev = t
        worst = max(worst, _field_rel(s.f, f))
    return [
        Check(10, "muhs_time_reversal", worst, 1e-8),
        Check(10, "v_stays_zero", traj.final.v.max_norm(), 1e-12),
    ]


PROFILES = {"default": 1.0, "strict": 0.1}


def run_verification(n: int = 128, seed: int = 42, profile: str = "default",
                     criteria=None) -> VerifyReport:
    if profile not in PROFILES:
        raise ValueError(f"unknown tolerance profile {profile!r}")
    grid = PeriodicGrid(n)
    seeds = _Seeds(seed)
    wanted = set(criteria) if criteria else set(range(1, 11))
    checks: list[Check] = []
    if 1 in wanted:
        checks += check_formulations(grid, seeds)
    if 2 in wanted:
        checks += check_coadjoint(grid, seeds)
    if 3 in wanted:
        checks += check_cocycles(grid, seeds)
    if 4 in wanted:
        checks += check_bihamiltonian(grid, seeds)
    if 5 in wanted:
        checks += check_gradients(grid, seeds)
    if wanted & {6, 7}:
        cons, traj = check_conservation(grid)
        if 6 in wanted:
            checks += cons
        if 7 in wanted:
            checks += check_lax(traj)
    if 8 in wanted:
        checks += check_variational(grid, seeds)
    if 9 in wanted:
        checks += check_legendre(grid, seeds)
    if 10 in wanted:
        checks += check_muhs(grid)
    factor = PROFILES[profile]
    for c in checks:
        if c.comparison == "<=" and "ratio" not in c.name:
            c.tolerance *= factor
    for c in checks:
        log.info(c.line())
    return VerifyReport(checks, {"n": n, "seed": seed, "profile": profile,
                                 "criteria": sorted(wanted)}, environment_stamp())
