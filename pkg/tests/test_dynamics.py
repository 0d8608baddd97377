import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twomuhs.algebra import CocycleVariant, inertia_inverse, coadjoint
from twomuhs.dynamics import (
    FORMULATIONS,
    BlowUpError,
    State,
    StepperConfig,
    evolve_muhs,
    formulation_discrepancy,
    integrate,
    rhs,
    rhs_modified,
    rhs_muhs,
    relative_discrepancy,
    smooth_default,
    step_rk4,
)
from twomuhs.hamiltonian import h2
from twomuhs.spectral import PeriodicGrid, lambda_invert, mean

from conftest import rand

GRID = PeriodicGrid(64)
GAMMAS = [(0.0, 0.0, 0.0), (0.3, 0.2, 0.1), (-0.5, 0.4, 0.7)]


@pytest.mark.parametrize("gamma", GAMMAS)
@given(seed=st.integers(0, 2**31))
@settings(max_examples=10, deadline=None)
def test_formulations_agree(gamma, seed):
    s = State(rand(GRID, seed, 10, 0.5, 1.0), rand(GRID, seed + 1, 10, 0.5, 0.2), gamma)
    assert formulation_discrepancy(s) <= 1e-9


def test_unknown_formulation():
    with pytest.raises(ValueError):
        rhs(smooth_default(GRID), "leapfrog")


def test_modified_cocycle_direct_matches_coadjoint():
    variant = CocycleVariant("modified", 0.6, 1.4)
    s = State(rand(GRID, 1, 8, 0.5, 1.0), rand(GRID, 2, 8), (0.7, 0.2, 0.3))
    a = rhs_modified(s, 0.6, 1.4)
    b = rhs(s, "coadjoint", variant)
    assert relative_discrepancy(a, b) <= 1e-10
    # the opposite sign on the c2 term gives a different flow
    c = rhs_modified(s, 0.6, 1.4, printed_sign=True)
    assert relative_discrepancy(c, b) > 1e-3


def test_constant_state_is_stationary():
    s = State(GRID.constant(1.3), GRID.zeros(), (0.2, 0.0, 0.4))
    traj = integrate(s, StepperConfig(dt=1e-2, t_end=0.1, cadence=2))
    assert np.array_equal(traj.final.f.values, s.f.values)
    for name in ("mu", "H1", "H2"):
        assert np.ptp(traj.monitors[name]) == 0.0


def test_trajectory_bookkeeping():
    traj = integrate(smooth_default(GRID), StepperConfig(dt=1e-2, t_end=0.1, cadence=3))
    assert traj.times == pytest.approx([0.0, 0.03, 0.06, 0.09, 0.1])
    assert len(traj.monitors["discrepancy"]) == len(traj.times)
    assert max(traj.monitors["discrepancy"]) < 1e-9


def test_rk4_local_order():
    s = smooth_default(GRID, (0.3, 0.2, 0.1))
    s = State(s.f + GRID.field(lambda x: 0.2 * np.sin(4 * np.pi * x)), s.v, s.gamma)

    def reference(h):
        out = s
        for _ in range(64):
            out = step_rk4(out, h / 64)
        return out

    errs = []
    for h in (0.02, 0.01):
        a, b = step_rk4(s, h), reference(h)
        errs.append(max(np.abs(a.f.values - b.f.values).max(), np.abs(a.v.values - b.v.values).max()))
    assert errs[0] / errs[1] == pytest.approx(32, rel=0.2)


def test_resolution_doubling_changes_h2_little():
    cfg = StepperConfig(dt=1e-3, t_end=0.2, cadence=1000, monitor_discrepancy=False)
    vals = []
    for n in (64, 128):
        traj = integrate(smooth_default(PeriodicGrid(n), (0.1, 0.05, 0.2)), cfg)
        vals.append(traj.monitors["H2"][-1])
    assert abs(vals[0] - vals[1]) <= 1e-9 * abs(vals[1])


def test_v_zero_invariant_without_gamma2():
    s = State(rand(GRID, 3, 6, 0.2, 1.0), GRID.zeros(), (0.4, 0.0, 0.9))
    traj = integrate(s, StepperConfig(dt=1e-2, t_end=0.2, cadence=5, monitor_discrepancy=False))
    assert traj.final.v.max_norm() <= 1e-12


def test_mean_conserved_short_run():
    s = smooth_default(GRID, (0.3, 0.2, 0.1))
    traj = integrate(s, StepperConfig(dt=1e-2, t_end=0.5, cadence=50, monitor_discrepancy=False))
    assert abs(traj.monitors["mu"][-1] - traj.monitors["mu"][0]) <= 1e-12


def test_muhs_reduction_short_run():
    f0 = GRID.field(lambda x: 1.0 + 0.1 * np.cos(2 * np.pi * x))
    traj = integrate(State(f0, GRID.zeros()),
                     StepperConfig(dt=1e-2, t_end=0.2, cadence=20, monitor_discrepancy=False))
    back = evolve_muhs(f0, -1e-2, 20)
    assert np.max(np.abs(back.values - traj.final.f.values)) <= 1e-12
    # forward muHS is the other time direction
    fwd = evolve_muhs(f0, 1e-2, 20)
    assert np.max(np.abs(fwd.values - traj.final.f.values)) > 1e-6


def test_rhs_muhs_is_reversed_rhs():
    f = rand(GRID, 4, 8, 0.3, 1.0)
    f_t, _ = rhs(State(f, GRID.zeros()), "direct")
    assert np.allclose(rhs_muhs(f).values, -f_t.values, atol=1e-12 * f_t.max_norm())


def test_blow_up_aborts_with_report():
    g = PeriodicGrid(16)
    s = State(rand(g, 1, 2, 30.0, 1.0), rand(g, 2, 2, 30.0))
    with pytest.raises(BlowUpError) as info:
        integrate(s, StepperConfig(dt=0.1, t_end=1.0, monitor_discrepancy=False))
    assert info.value.report["reason"] in ("max-norm", "non-finite")


def test_invalid_step_parameters():
    s = smooth_default(GRID)
    with pytest.raises(ValueError):
        step_rk4(s, 0.0)
    with pytest.raises(ValueError):
        integrate(s, StepperConfig(t_end=0.0))
    with pytest.raises(ValueError):
        State(GRID.zeros(), PeriodicGrid(16).zeros())


def test_coadjoint_formulation_is_euler_flow():
    s = smooth_default(GRID, (0.1, 0.2, 0.3))
    du = s.dual()
    out = coadjoint(inertia_inverse(du), du)
    f_t, v_t = rhs(s, "coadjoint")
    assert np.allclose(v_t.values, out.v.values)
    assert np.allclose(f_t.values, lambda_invert(out.u - mean(out.u)).values)


def test_formulation_list():
    assert FORMULATIONS == ("direct", "j1", "j2", "coadjoint", "frozen")
    assert h2(smooth_default(GRID).u, smooth_default(GRID).v) > 0
