"""Torus discretization and spectral operators.

Fields live on the periodic square [0, 2pi)^2 sampled on an n x n grid and
are stored as Fourier-series coefficients in rfft2 layout (axis 0: full
integer frequencies k1, axis 1: non-negative k2).  Conventions:

    f(x) = sum_k  f_hat[k] exp(i k.x),      f_hat = rfft2(f) / n^2,
    int |f|^2 dx = (2pi)^2 sum_k |f_hat[k]|^2   (full-lattice sum).

The Nyquist row/column (|k_i| = n/2) is always zeroed so differentiation
preserves Hermitian symmetry, and quadratic products are dealiased by the
two-thirds rule (|k_i| <= n//3).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import numpy.fft as fft


class SpectralError(Exception):
    pass


class NonZeroMean(SpectralError):
    pass


class SymbolGridMismatch(SpectralError):
    pass


class SpectralGrid:
    """Immutable torus discretization: wavenumbers, masks, transform helpers."""

    def __init__(self, n: int):
        if n < 4 or n % 2:
            raise SpectralError(f"grid size must be even and >= 4, got {n}")
        self.n = int(n)
        self.length = 2.0 * np.pi
        self.dx = self.length / n
        self.k1 = fft.fftfreq(n, d=1.0 / n)            # full axis, ints as floats
        self.k2 = np.arange(n // 2 + 1, dtype=float)   # rfft axis
        self.K1 = self.k1[:, None]
        self.K2 = self.k2[None, :]
        self.ksq = self.K1 ** 2 + self.K2 ** 2
        self.kmag = np.sqrt(self.ksq)
        kcut = n // 3
        self.kcut = kcut
        self.dealias_mask = (np.abs(self.K1) <= kcut) & (self.K2 <= kcut)
        nyq = (np.abs(self.K1) == n // 2) | (self.K2 == n // 2)
        self.keep_mask = ~nyq
        # Parseval weights: rfft2 stores one half-plane; interior k2 columns
        # stand in for their conjugates
        w = np.full(n // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        self.parseval_w = w[None, :]
        x = np.arange(n) * self.dx
        self.x1 = x[:, None] + np.zeros((1, n))
        self.x2 = np.zeros((n, 1)) + x[None, :]
        # inverse |k|^2 with the zero mode nulled (Biot-Savart / stream function)
        inv = np.zeros_like(self.ksq)
        nz = self.ksq > 0
        inv[nz] = 1.0 / self.ksq[nz]
        self.inv_ksq = inv

    def __eq__(self, other):
        return isinstance(other, SpectralGrid) and other.n == self.n

    def __hash__(self):
        return hash(("SpectralGrid", self.n))

    def __repr__(self):
        return f"SpectralGrid(n={self.n})"

    def forward(self, samples: np.ndarray) -> np.ndarray:
        """Real samples -> series coefficients (Nyquist zeroed)."""
        hat = fft.rfft2(samples) / (self.n * self.n)
        hat[~self.keep_mask] = 0.0
        return hat

    def inverse(self, hat: np.ndarray) -> np.ndarray:
        return fft.irfft2(hat * (self.n * self.n), s=(self.n, self.n))

    @cached_property
    def unique_kmags(self) -> np.ndarray:
        """Distinct wavenumber magnitudes present on the full grid."""
        return np.unique(self.kmag.ravel())

    def spectral_sum(self, quad_hat: np.ndarray) -> float:
        """Full-lattice sum of a quadratic spectral quantity given on the
        rfft2 half-plane (e.g. |f_hat|^2)."""
        return float(np.sum(quad_hat * self.parseval_w))


@dataclass(frozen=True)
class ScalarField:
    """Real scalar field, canonically stored by its spectral coefficients."""

    grid: SpectralGrid
    hat: np.ndarray

    @classmethod
    def from_real(cls, grid: SpectralGrid, samples: np.ndarray) -> "ScalarField":
        return cls(grid, grid.forward(np.asarray(samples, dtype=float)))

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> "ScalarField":
        return cls(grid, np.zeros((grid.n, grid.n // 2 + 1), dtype=complex))

    def real(self) -> np.ndarray:
        return self.grid.inverse(self.hat)

    def mean(self) -> float:
        return float(self.hat[0, 0].real)

    def l2(self) -> float:
        """Physical L2 norm via Parseval."""
        return float(np.sqrt((2 * np.pi) ** 2 *
                             self.grid.spectral_sum(np.abs(self.hat) ** 2)))

    def lp(self, p: float) -> float:
        r = self.real()
        return float((np.sum(np.abs(r) ** p) * self.grid.dx ** 2) ** (1.0 / p))

    def linf(self) -> float:
        return float(np.max(np.abs(self.real())))


@dataclass(frozen=True)
class VectorField:
    c1: ScalarField
    c2: ScalarField

    @property
    def grid(self) -> SpectralGrid:
        return self.c1.grid

    def real(self):
        return self.c1.real(), self.c2.real()

    def l2(self) -> float:
        return float(np.sqrt(self.c1.l2() ** 2 + self.c2.l2() ** 2))

    def linf(self) -> float:
        """Pointwise sup of the Euclidean magnitude."""
        r1, r2 = self.real()
        return float(np.max(np.hypot(r1, r2)))


# --------------------------------------------------------------------------
# operators


def dealias(s: ScalarField) -> ScalarField:
    return ScalarField(s.grid, np.where(s.grid.dealias_mask, s.hat, 0.0))


def gradient(s: ScalarField) -> VectorField:
    g = s.grid
    return VectorField(ScalarField(g, 1j * g.K1 * s.hat),
                       ScalarField(g, 1j * g.K2 * s.hat))


def laplacian(s: ScalarField) -> ScalarField:
    return ScalarField(s.grid, -s.grid.ksq * s.hat)


def divergence(v: VectorField) -> ScalarField:
    g = v.grid
    return ScalarField(g, 1j * g.K1 * v.c1.hat + 1j * g.K2 * v.c2.hat)


def curl_2d(v: VectorField) -> ScalarField:
    """Scalar curl -d2 v1 + d1 v2 of a (divergence-free) plane field."""
    g = v.grid
    return ScalarField(g, 1j * g.K1 * v.c2.hat - 1j * g.K2 * v.c1.hat)


def biot_savart(omega: ScalarField) -> VectorField:
    """Divergence-free field with the given scalar curl and zero mean flow.

    Via the stream function psi_hat = -omega_hat/|k|^2 and u = grad^perp psi:
    u1_hat = i k2 omega_hat/|k|^2, u2_hat = -i k1 omega_hat/|k|^2.
    """
    g = omega.grid
    scale = np.max(np.abs(omega.hat)) if omega.hat.size else 0.0
    if abs(omega.hat[0, 0]) > 1e-13 * max(scale, 1e-300):
        raise NonZeroMean(f"mean(omega) = {omega.hat[0, 0]!r} must vanish")
    w = omega.hat * g.inv_ksq
    return VectorField(ScalarField(g, 1j * g.K2 * w),
                       ScalarField(g, -1j * g.K1 * w))


def apply_symbol(s: ScalarField, sym) -> ScalarField:
    """Apply the nonlocal dissipation operator: (L s)_hat = sigma(|k|) s_hat."""
    return ScalarField(s.grid, _sigma_on_grid(s.grid, sym) * s.hat)


def _sigma_on_grid(grid: SpectralGrid, sym) -> np.ndarray:
    key = grid.n
    cached = sym._grid_cache.get(key)
    if cached is None:
        cached = sym.lookup(grid.kmag)
        sym._grid_cache[key] = cached
    return cached


def pointwise_product(a: ScalarField, b: ScalarField) -> ScalarField:
    """Dealiased pseudo-spectral product."""
    if a.grid is not b.grid and a.grid != b.grid:
        raise SpectralError("fields live on different grids")
    return dealias(ScalarField.from_real(a.grid, a.real() * b.real()))


def project_zero_mean(s: ScalarField) -> ScalarField:
    hat = s.hat.copy()
    hat[0, 0] = 0.0
    return ScalarField(s.grid, hat)


def symbol_for_grid(profile, grid: SpectralGrid):
    """Dissipation symbol tabulated at every magnitude on the grid (cached)."""
    from .kernel import compute_symbol

    key = (profile, grid.n)
    cached = _SYMBOL_CACHE.get(key)
    if cached is None:
        cached = compute_symbol(profile, grid.unique_kmags)
        _SYMBOL_CACHE[key] = cached
    return cached


_SYMBOL_CACHE: dict = {}
