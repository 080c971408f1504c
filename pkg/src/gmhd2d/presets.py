"""Initial conditions.

The analytic setting prescribes smooth decaying data but no canonical
example; these presets are community-standard stand-ins.  All are
trigonometric polynomials or band-limited random fields, specified as
(u0, b0) and converted to (omega, j) through the scalar curl.
"""

from __future__ import annotations

import numpy as np

from .dynamics import SimState, from_velocity_fields
from .spectral import ScalarField, SpectralGrid, VectorField, biot_savart


def orszag_tang(grid: SpectralGrid, beta: float = 0.5) -> SimState:
    """u = (-sin x2, sin x1), b = beta (-sin x2, sin 2 x1)."""
    x1, x2 = grid.x1, grid.x2
    u = VectorField(ScalarField.from_real(grid, -np.sin(x2)),
                    ScalarField.from_real(grid, np.sin(x1)))
    b = VectorField(ScalarField.from_real(grid, -beta * np.sin(x2)),
                    ScalarField.from_real(grid, beta * np.sin(2.0 * x1)))
    return from_velocity_fields(grid, u, b)


def single_mode(grid: SpectralGrid, amplitude: float = 1.0) -> SimState:
    """omega0 = A sin x1, j0 = 0; exercises the closed-form linear checks."""
    om = ScalarField.from_real(grid, amplitude * np.sin(grid.x1))
    return SimState(t=0.0, omega_hat=om, j_hat=ScalarField.zeros(grid))


def random_band(grid: SpectralGrid, seed: int, kmin: int = 2, kmax: int = 8,
                amplitude: float = 1.0) -> SimState:
    """Independent Gaussian spectral coefficients on kmin <= |k| <= kmax,
    Hermitian-symmetrized, with u and b separately normalized so that
    ||u0||_L2 = ||b0||_L2 = amplitude."""
    rng = np.random.default_rng(seed)
    band = (grid.kmag >= kmin) & (grid.kmag <= kmax)

    def band_field():
        # white noise in real space keeps the coefficients Hermitian
        hat = grid.forward(rng.standard_normal((grid.n, grid.n)))
        hat = np.where(band, hat, 0.0)
        hat[0, 0] = 0.0
        return hat

    om_h = band_field()
    j_h = band_field()

    def normalized(hat):
        f = ScalarField(grid, hat)
        vel = biot_savart(f)
        norm = vel.l2()
        if norm == 0.0:
            return f
        return ScalarField(grid, hat * (amplitude / norm))

    return SimState(t=0.0, omega_hat=normalized(om_h), j_hat=normalized(j_h))


def build_preset(grid: SpectralGrid, init_cfg) -> SimState:
    """Construct the initial state described by an InitConfig."""
    if init_cfg.preset == "orszag_tang":
        return orszag_tang(grid, beta=init_cfg.beta)
    if init_cfg.preset == "single_mode":
        return single_mode(grid, amplitude=init_cfg.amplitude)
    if init_cfg.preset == "random_band":
        return random_band(grid, seed=init_cfg.seed, kmin=init_cfg.kmin,
                           kmax=init_cfg.kmax, amplitude=init_cfg.amplitude)
    raise ValueError(f"unknown preset {init_cfg.preset!r}")
