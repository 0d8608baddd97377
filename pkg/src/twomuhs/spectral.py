"""Pseudospectral calculus on the unit circle R/Z.

Fields are real samples on a uniform grid x_j = j/n. The spectral view holds
the normalised rfft coefficients c_k (k = 0..n/2) so that c_0 is the mean and
f(x) = sum_k c_k exp(2 pi i k x) over |k| < n/2.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

MAX_DERIV_ORDER = 4


@dataclass(frozen=True)
class PeriodicGrid:
    n: int = 128

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 8, got {n!r}")

    @property
    def dx(self) -> float:
        return 1.0 / self.n

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    @cached_property
    def k(self) -> np.ndarray:
        """Integer wavenumbers of the rfft layout."""
        return np.arange(self.n // 2 + 1)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * self.k

    def field(self, func) -> "Field":
        return Field(self, func(self.x))

    def constant(self, c: float) -> "Field":
        return Field(self, np.full(self.n, float(c)))

    def zeros(self) -> "Field":
        return self.constant(0.0)


class Field:
    """Immutable real periodic field with a cached spectral view."""

    __array_priority__ = 1000

    def __init__(self, grid: PeriodicGrid, values):
        values = np.array(values, dtype=float)
        if values.shape != (grid.n,):
            raise ValueError(f"expected {grid.n} samples, got shape {values.shape}")
        values.flags.writeable = False
        self.grid = grid
        self.values = values

    @classmethod
    def from_coeffs(cls, grid: PeriodicGrid, coeffs) -> "Field":
        return cls(grid, np.fft.irfft(np.asarray(coeffs) * grid.n, grid.n))

    @cached_property
    def coeffs(self) -> np.ndarray:
        c = np.fft.rfft(self.values) / self.grid.n
        c.flags.writeable = False
        return c

    def coefficient(self, k: int) -> complex:
        """Two-sided coefficient c_k, using c_{-k} = conj(c_k)."""
        c = self.coeffs[abs(k)]
        return complex(np.conj(c)) if k < 0 else complex(c)

    def bandwidth(self, tol: float = 1e-13) -> int:
        mags = np.abs(self.coeffs)
        big = np.nonzero(mags > tol * max(mags.max(), 1e-300))[0]
        return int(big[-1]) if big.size else 0

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Field):
            _check_same_grid(self, other)
            return other.values
        return float(other)

    def __add__(self, other):
        return Field(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return Field(self.grid, self._coerce(other) - self.values)

    def __neg__(self):
        return Field(self.grid, -self.values)

    def __mul__(self, other):
        if isinstance(other, Field):
            return multiply(self, other)
        return Field(self.grid, self.values * float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field(self.grid, self.values / float(other))

    def __repr__(self):
        return f"Field(n={self.grid.n}, mean={mean(self):.6g}, max={self.max_norm():.6g})"


def _check_same_grid(*fields: Field) -> None:
    grid = fields[0].grid
    for g in fields[1:]:
        if g.grid != grid:
            raise ValueError(f"grid mismatch: n={grid.n} vs n={g.grid.n}")


def _drop_nyquist(c: np.ndarray) -> np.ndarray:
    c = np.array(c, dtype=complex)
    c[-1] = 0.0
    return c


def mean(f: Field) -> float:
    return float(f.coeffs[0].real)


def inner(f: Field, g: Field) -> float:
    """L2 pairing of two fields, exact for fields resolved on the grid."""
    _check_same_grid(f, g)
    return float(f.grid.dx * np.dot(f.values, g.values))


def project(f: Field) -> Field:
    """Remove the Nyquist mode (the band every product is truncated to)."""
    return Field.from_coeffs(f.grid, _drop_nyquist(f.coeffs))


def deriv(f: Field, order: int = 1) -> Field:
    if not 1 <= order <= MAX_DERIV_ORDER:
        raise ValueError(f"derivative order must be in 1..{MAX_DERIV_ORDER}, got {order}")
    mult = (1j * f.grid.wavenumbers) ** order
    return Field.from_coeffs(f.grid, _drop_nyquist(f.coeffs * mult))


def inverse_deriv(f: Field, order: int = 1) -> Field:
    """Zero-mean solution g of d^order g = f - mean(f)."""
    if order < 1:
        raise ValueError("order must be positive")
    c = _drop_nyquist(f.coeffs)
    c[0] = 0.0
    c[1:] /= (1j * f.grid.wavenumbers[1:]) ** order
    return Field.from_coeffs(f.grid, c)


def multiply(f: Field, g: Field) -> Field:
    """Dealiased product: evaluated on a 2n grid, truncated to |k| < n/2."""
    _check_same_grid(f, g)
    n = f.grid.n
    m = 2 * n
    pad = np.zeros(m // 2 + 1, dtype=complex)
    pad[: n // 2 + 1] = _drop_nyquist(f.coeffs)
    fv = np.fft.irfft(pad * m, m)
    pad[: n // 2 + 1] = _drop_nyquist(g.coeffs)
    gv = np.fft.irfft(pad * m, m)
    c = np.fft.rfft(fv * gv)[: n // 2 + 1] / m
    return Field.from_coeffs(f.grid, _drop_nyquist(c))


def _lambda_symbol(grid: PeriodicGrid) -> np.ndarray:
    s = grid.wavenumbers**2
    s[0] = 1.0
    return s


def lambda_apply(g: Field) -> Field:
    """Inertia symbol mu(g) - g''."""
    return Field.from_coeffs(g.grid, g.coeffs * _lambda_symbol(g.grid))


def lambda_invert(h: Field) -> Field:
    return Field.from_coeffs(h.grid, h.coeffs / _lambda_symbol(h.grid))


@dataclass(frozen=True)
class RandomFieldSpec:
    seed: int
    k_max: int
    amplitude: float = 1.0
    mean: float = 0.0
    decay: float = 2.0


def random_field(spec: RandomFieldSpec, grid: PeriodicGrid) -> Field:
    """Band-limited field mean + sum_k amplitude k^-decay cos(2 pi k x + theta_k)."""
    if spec.k_max < 0 or 6 * spec.k_max > grid.n:
        raise ValueError(f"k_max={spec.k_max} too large for n={grid.n} (need k_max <= n/6)")
    rng = np.random.default_rng(spec.seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, spec.k_max)
    c = np.zeros(grid.n // 2 + 1, dtype=complex)
    k = np.arange(1, spec.k_max + 1)
    c[1 : spec.k_max + 1] = 0.5 * spec.amplitude * k ** (-float(spec.decay)) * np.exp(1j * theta)
    c[0] = spec.mean
    if spec.amplitude == 0:
        return grid.constant(spec.mean)
    return Field.from_coeffs(grid, c)


def write_field_csv(f: Field, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "value"])
        for xj, fj in zip(f.grid.x, f.values):
            w.writerow([f"{xj:.17g}", f"{fj:.17g}"])


def read_field_csv(path) -> Field:
    with Path(path).open() as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["x", "value"]:
        raise ValueError(f"{path}: expected header 'x,value'")
    values = [float(r[1]) for r in rows[1:]]
    return Field(PeriodicGrid(len(values)), values)
