"""Lagrangian densities L1 (Clebsch-type, fields f, v, w, z) and L2 (fields f, phi).

Their Euler-Lagrange systems, the reduction of the L1 system to the 2-muHS
equation, the Legendre transforms back to H1 and H2, and a space-time
discrete action used to check residuals against finite differences.

The linear term of L1 is -g1 f (``printed=True`` selects -2 g1 f). Only the
-g1 f form reduces to the 2-muHS equation under f -> f + g1; the -2 g1 f form
leaves an extra -2 g1 f_x, i.e. it produces the modified-cocycle flow with
c1 = 1, c2 = 2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import State, rhs
from .hamiltonian import h2
from .spectral import Field, PeriodicGrid, deriv, inverse_deriv, lambda_apply, mean

Triple = tuple[float, float, float]


def _l1_linear_coeff(printed: bool) -> float:
    return 2.0 if printed else 1.0


@dataclass(frozen=True)
class L1Fields:
    f: Field
    v: Field
    w: Field
    z: Field
    gamma: Triple = (0.0, 0.0, 0.0)

    @property
    def gamma3_tilde(self) -> float:
        return self.gamma[2] - 0.5 * self.gamma[0]


@dataclass(frozen=True)
class L2Fields:
    f: Field
    phi: Field
    gamma: Triple = (0.0, 0.0, 0.0)

    @property
    def v(self) -> Field:
        return deriv(self.phi)


def density_l1(fields: L1Fields, z_t: Field, printed: bool = False) -> Field:
    g1, g2, _ = fields.gamma
    gt = fields.gamma3_tilde
    f, v, w, z = fields.f, fields.v, fields.w, fields.z
    fx, zx = deriv(f), deriv(z)
    return (0.5 * (fx * fx) + (0.5 * mean(f)) * f + 0.5 * (v * v) - v * zx
            + w * (f * zx - z_t + gt * v) + g2 * (deriv(w) * f)
            - (_l1_linear_coeff(printed) * g1) * f)


def el1_residuals(fields: L1Fields, z_t: Field, w_t: Field, printed: bool = False):
    """Residuals (R_f, R_v, R_z, R_w) of the four L1 Euler-Lagrange equations.

    Action gradients: dS/df = -R_f, dS/dv = -R_v, dS/dw = -R_z, dS/dz = R_w.
    """
    g1, g2, _ = fields.gamma
    gt = fields.gamma3_tilde
    f, v, w, z = fields.f, fields.v, fields.w, fields.z
    zx, wx = deriv(z), deriv(w)
    R_f = deriv(f, 2) - mean(f) - w * zx - g2 * wx + _l1_linear_coeff(printed) * g1
    R_v = zx - v - gt * w
    R_z = z_t - f * zx - gt * v + g2 * deriv(f)
    R_w = w_t - deriv(w * f) + deriv(v)
    return R_f, R_v, R_z, R_w


def el1_rates(fields: L1Fields) -> tuple[Field, Field]:
    """(z_t, w_t) from the evolution lines of the L1 system."""
    g2 = fields.gamma[1]
    gt = fields.gamma3_tilde
    f, v, w, z = fields.f, fields.v, fields.w, fields.z
    z_t = f * deriv(z) + gt * v - g2 * deriv(f)
    w_t = deriv(w * f) - deriv(v)
    return z_t, w_t


def _constraint_source(w: Field, z: Field, gamma: Triple, printed: bool) -> Field:
    return w * deriv(z) + gamma[1] * deriv(w) - _l1_linear_coeff(printed) * gamma[0]


def el1_constrain(w: Field, z: Field, gamma: Triple = (0.0, 0.0, 0.0),
                  printed: bool = False) -> tuple[Field, Field]:
    """Solve the two spatial constraints of the L1 system for (f, v).

    f_xx = mu(f) + R integrates to mu(f) = -mu(R); the zero-mean part of f
    follows from the periodic Poisson solve.
    """
    gt = gamma[2] - 0.5 * gamma[0]
    v = deriv(z) - gt * w
    R = _constraint_source(w, z, gamma, printed)
    f = inverse_deriv(R, 2) - mean(R)
    return f, v


@dataclass(frozen=True)
class L1Reduction:
    f: Field
    v: Field
    f_xxt: Field
    v_t: Field
    defect_f: Field
    defect_v: Field
    scale_f: float
    scale_v: float

    @property
    def scaled_defects(self) -> tuple[float, float]:
        sf = self.defect_f.max_norm() / self.scale_f if self.scale_f else self.defect_f.max_norm()
        sv = self.defect_v.max_norm() / self.scale_v if self.scale_v else self.defect_v.max_norm()
        return sf, sv


def el1_reduce(w: Field, z: Field, gamma: Triple = (0.0, 0.0, 0.0),
               printed: bool = False) -> L1Reduction:
    """Rates implied by the L1 system, compared with the 2-muHS flow of f - g1."""
    g1, g2, _ = gamma
    gt = gamma[2] - 0.5 * g1
    f, v = el1_constrain(w, z, gamma, printed)
    fields = L1Fields(f, v, w, z, gamma)
    z_t, w_t = el1_rates(fields)
    v_t = deriv(z_t) - gt * w_t
    R_t = w_t * deriv(z) + w * deriv(z_t) + g2 * deriv(w_t)
    f_xxt = R_t - mean(R_t)

    shifted = State(f - g1, v, gamma)
    f_t_ref, v_t_ref = rhs(shifted, "direct")
    f_xxt_ref = deriv(f_t_ref, 2)
    return L1Reduction(
        f=f, v=v, f_xxt=f_xxt, v_t=v_t,
        defect_f=f_xxt - f_xxt_ref, defect_v=v_t - v_t_ref,
        scale_f=max(f_xxt.max_norm(), f_xxt_ref.max_norm()),
        scale_v=max(v_t.max_norm(), v_t_ref.max_norm()),
    )


def density_l2(fields: L2Fields, f_t: Field, phi_t: Field) -> Field:
    g1, g2, g3 = fields.gamma
    f = fields.f
    fx = deriv(f)
    px = fields.v
    return (-(fx * f_t) + (2.0 * mean(f)) * (f * f) + f * (fx * fx) + f * (px * px)
            - g1 * (f * deriv(f, 2)) - (2.0 * g2) * (px * fx) + (2.0 * g3) * (px * px)
            - px * phi_t)


def el2_residuals(fields: L2Fields, f_t: Field, phi_t: Field) -> tuple[Field, Field]:
    """(R1, R2) with dS/df = 2 R1 and dS/dphi = 2 R2; the g1 term is -g1 f_xx."""
    g1, g2, g3 = fields.gamma
    f = fields.f
    fx, fxx = deriv(f), deriv(f, 2)
    px = fields.v
    mu = mean(f)
    R1 = (deriv(f_t) + 2.0 * mu * f + mean(f * f) - 0.5 * (fx * fx) - f * fxx
          + 0.5 * (px * px) - g1 * fxx + g2 * deriv(px))
    R2 = deriv(phi_t) - deriv(f * px) + g2 * fxx - 2.0 * g3 * deriv(px)
    return R1, R2


def constraint_residual(fields: L1Fields, printed: bool = False) -> float:
    """Scaled max residual of the two spatial constraints of the L1 system."""
    f, v, w, z = fields.f, fields.v, fields.w, fields.z
    R_f = deriv(f, 2) - mean(f) - _constraint_source(w, z, fields.gamma, printed)
    R_v = deriv(z) - v - fields.gamma3_tilde * w
    scale = max(deriv(f, 2).max_norm(), deriv(z).max_norm(), 1.0)
    return max(R_f.max_norm(), R_v.max_norm()) / scale


def legendre_h_from_l1(fields: L1Fields, printed: bool = False, tol: float = 1e-8) -> float:
    """int (-z_t w - L1) dx with z_t from the L1 system; equals H1 on constrained fields."""
    res = constraint_residual(fields, printed)
    if res > tol:
        raise ValueError(f"fields violate the L1 spatial constraints (residual {res:.3g})")
    z_t, _ = el1_rates(fields)
    return mean(-(z_t * fields.w) - density_l1(fields, z_t, printed))


def legendre_h_from_l2(fields: L2Fields, f_t: Field | None = None,
                       phi_t: Field | None = None) -> tuple[float, float | None]:
    """(H, H / H2) with H = int (-f_x f_t - phi_x phi_t - L2) dx; the rates cancel."""
    grid = fields.f.grid
    f_t = grid.zeros() if f_t is None else f_t
    phi_t = grid.zeros() if phi_t is None else phi_t
    dens = -(deriv(fields.f) * f_t) - fields.v * phi_t - density_l2(fields, f_t, phi_t)
    H = mean(dens)
    ref = h2(lambda_apply(fields.f), fields.v, fields.gamma)
    return H, (H / ref if ref != 0 else None)


# space-time discrete actions ------------------------------------------------

@dataclass(frozen=True)
class SpaceTimeGrid:
    """Doubly periodic grid: nt time levels on [0, period) times a spatial grid."""

    nt: int
    grid: PeriodicGrid
    period: float = 1.0

    @property
    def dt(self) -> float:
        return self.period / self.nt

    @property
    def shape(self) -> tuple[int, int]:
        return self.nt, self.grid.n

    def time_derivative(self, arr: np.ndarray) -> np.ndarray:
        c = np.fft.rfft(arr, axis=0)
        m = np.arange(c.shape[0])
        mult = 2j * np.pi * m / self.period
        if self.nt % 2 == 0:
            mult[-1] = 0.0
        return np.fft.irfft(c * mult[:, None], self.nt, axis=0)

    def slices(self, arr: np.ndarray) -> list[Field]:
        return [Field(self.grid, row) for row in arr]


def action_l1(st: SpaceTimeGrid, f, v, w, z, gamma: Triple, printed: bool = False) -> float:
    z_t = st.time_derivative(z)
    total = 0.0
    for i in range(st.nt):
        fields = L1Fields(*(Field(st.grid, a[i]) for a in (f, v, w, z)), gamma)
        total += mean(density_l1(fields, Field(st.grid, z_t[i]), printed))
    return total * st.dt


def action_l2(st: SpaceTimeGrid, f, phi, gamma: Triple) -> float:
    f_t = st.time_derivative(f)
    phi_t = st.time_derivative(phi)
    total = 0.0
    for i in range(st.nt):
        fields = L2Fields(Field(st.grid, f[i]), Field(st.grid, phi[i]), gamma)
        total += mean(density_l2(fields, Field(st.grid, f_t[i]), Field(st.grid, phi_t[i])))
    return total * st.dt


def fd_action_gradient(action, arrays: list[np.ndarray], st: SpaceTimeGrid,
                       rel_step: float = 1e-5) -> list[np.ndarray]:
    """Central-difference gradient of a discrete action per sample, divided by dt dx."""
    weight = st.dt * st.grid.dx
    grads = []
    for idx, arr in enumerate(arrays):
        h = rel_step * max(1.0, float(np.max(np.abs(arr))))
        g = np.empty_like(arr)
        for ij in np.ndindex(arr.shape):
            vals = []
            for s in (h, -h):
                pert = [a.copy() for a in arrays]
                pert[idx][ij] += s
                vals.append(action(*pert))
            g[ij] = (vals[0] - vals[1]) / (2.0 * h * weight)
        grads.append(g)
    return grads


def el1_action_gradients(st: SpaceTimeGrid, f, v, w, z, gamma: Triple,
                         printed: bool = False) -> list[np.ndarray]:
    """Action gradients predicted from the residuals: (-R_f, -R_v, -R_z, R_w)."""
    z_t = st.time_derivative(z)
    w_t = st.time_derivative(w)
    out = [np.empty(st.shape) for _ in range(4)]
    for i in range(st.nt):
        fields = L1Fields(*(Field(st.grid, a[i]) for a in (f, v, w, z)), gamma)
        R_f, R_v, R_z, R_w = el1_residuals(fields, Field(st.grid, z_t[i]),
                                           Field(st.grid, w_t[i]), printed)
        for k, (sign, R) in enumerate(((-1, R_f), (-1, R_v), (-1, R_z), (1, R_w))):
            out[k][i] = sign * R.values
    return out


def el2_action_gradients(st: SpaceTimeGrid, f, phi, gamma: Triple) -> list[np.ndarray]:
    """Action gradients predicted from the residuals: (2 R1, 2 R2)."""
    f_t = st.time_derivative(f)
    phi_t = st.time_derivative(phi)
    out = [np.empty(st.shape), np.empty(st.shape)]
    for i in range(st.nt):
        fields = L2Fields(Field(st.grid, f[i]), Field(st.grid, phi[i]), gamma)
        R1, R2 = el2_residuals(fields, Field(st.grid, f_t[i]), Field(st.grid, phi_t[i]))
        out[0][i] = 2.0 * R1.values
        out[1][i] = 2.0 * R2.values
    return out


def random_spacetime(st: SpaceTimeGrid, seed: int, k_max: int = 4, m_max: int = 2,
                     amplitude: float = 1.0, mean_value: float = 0.0) -> np.ndarray:
    """Band-limited random field on the space-time torus (|k| <= k_max, |m| <= m_max)."""
    rng = np.random.default_rng(seed)
    nt, n = st.shape
    t = np.arange(nt)[:, None] * st.dt / st.period
    x = st.grid.x[None, :]
    out = np.full((nt, n), float(mean_value))
    for m in range(-m_max, m_max + 1):
        for k in range(0, k_max + 1):
            if k == 0 and m <= 0:
                continue
            a, phase = rng.normal(), rng.uniform(0, 2 * np.pi)
            out += amplitude * a / (1 + k * k + m * m) * np.cos(2 * np.pi * (k * x + m * t) + phase)
    return out
