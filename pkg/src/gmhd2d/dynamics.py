"""Vorticity-current dynamics and time integration.

Evolved system (omega = scalar curl of u, j = scalar curl of b):

    omega_t + u.grad omega + L omega = b.grad j
    j_t     + u.grad j     - Lap j   = b.grad omega + T(grad u, grad b)
    T = 2 d1 b1 (d1 u2 + d2 u1) + 2 d2 u2 (d1 b2 + d2 b1)

u and b are reconstructed from omega and j by the Biot-Savart law, so both
stay exactly divergence-free.  The stiff diagonal terms (the multiplier
sigma(|k|) on omega and |k|^2 on j) are integrated exactly by an
integrating-factor classical RK4; rhs() returns only the nonlinear part.
Advection uses the divergence form div(v s), equivalent to v.grad s for
divergence-free v under the two-thirds dealiasing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import DissipationSymbol
from .spectral import (ScalarField, SpectralGrid, VectorField, _sigma_on_grid,
                       biot_savart)


class DynamicsError(Exception):
    pass


class CflViolation(DynamicsError):
    """Non-positive step size or non-finite fields: instability or blow-up."""

    def __init__(self, message, t=None, omega_max=None, tail_ratio=None):
        super().__init__(message)
        self.t = t
        self.omega_max = omega_max
        self.tail_ratio = tail_ratio


@dataclass(frozen=True)
class SimState:
    t: float
    omega_hat: ScalarField
    j_hat: ScalarField

    @property
    def grid(self) -> SpectralGrid:
        return self.omega_hat.grid


@dataclass(frozen=True)
class StepperConfig:
    cfl: float = 0.5
    dt_max: float = 0.05
    scheme: str = "ifrk4"

    def __post_init__(self):
        if not (0.0 < self.cfl <= 1.0):
            raise DynamicsError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not (self.dt_max > 0):
            raise DynamicsError(f"dt_max must be positive, got {self.dt_max}")
        if self.scheme != "ifrk4":
            raise DynamicsError(f"unknown scheme {self.scheme!r}")


@dataclass
class BudgetAccumulators:
    """Time integrals accumulated with RK4-stage quadrature (globally 4th
    order alongside the state), feeding the budget ledgers."""

    diss_u: float = 0.0    # int 2 sum sigma |u_hat|^2 dtau
    diss_b: float = 0.0    # int 2 ||grad b||^2 dtau
    grad_j: float = 0.0    # int ||grad j||^2 dtau
    d_total: float = 0.0   # int 2 sum sigma |omega_hat|^2 dtau


def from_velocity_fields(grid: SpectralGrid, u: VectorField, b: VectorField,
                         t: float = 0.0) -> SimState:
    """Initial state from (u0, b0) via the scalar curls."""
    from .spectral import curl_2d, project_zero_mean

    return SimState(t=t,
                    omega_hat=project_zero_mean(curl_2d(u)),
                    j_hat=project_zero_mean(curl_2d(b)))


def reconstruct(state: SimState):
    """(u, b) recovered from (omega, j) by Biot-Savart."""
    return biot_savart(state.omega_hat), biot_savart(state.j_hat)


def t_term(u: VectorField, b: VectorField) -> ScalarField:
    """Quadratic stretching source in the current equation (dealiased)."""
    g = u.grid
    raw = _t_term_raw(g, u.c1.hat, u.c2.hat, b.c1.hat, b.c2.hat)
    return ScalarField(g, np.where(g.dealias_mask, g.forward(raw), 0.0))


def _t_term_raw(g: SpectralGrid, u1h, u2h, b1h, b2h) -> np.ndarray:
    d1b1 = g.inverse(1j * g.K1 * b1h)
    d1u2 = g.inverse(1j * g.K1 * u2h)
    d2u1 = g.inverse(1j * g.K2 * u1h)
    d2u2 = g.inverse(1j * g.K2 * u2h)
    d1b2 = g.inverse(1j * g.K1 * b2h)
    d2b1 = g.inverse(1j * g.K2 * b1h)
    return 2.0 * d1b1 * (d1u2 + d2u1) + 2.0 * d2u2 * (d1b2 + d2b1)


def _nonlinear(g: SpectralGrid, om_h, j_h):
    """Nonlinear tendencies for (omega, j) plus the sup norms of (u, b).

    Advection in divergence form: -div(u s) + div(b q), pseudo-spectral with
    two-thirds dealiasing; means projected to exactly zero.
    """
    inv = g.inv_ksq
    u1h = 1j * g.K2 * om_h * inv
    u2h = -1j * g.K1 * om_h * inv
    b1h = 1j * g.K2 * j_h * inv
    b2h = -1j * g.K1 * j_h * inv

    u1 = g.inverse(u1h)
    u2 = g.inverse(u2h)
    b1 = g.inverse(b1h)
    b2 = g.inverse(b2h)
    om = g.inverse(om_h)
    jj = g.inverse(j_h)

    # d omega = -div(u omega) + div(b j)
    f1 = g.forward(b1 * jj - u1 * om)
    f2 = g.forward(b2 * jj - u2 * om)
    dom = 1j * (g.K1 * f1 + g.K2 * f2)

    # d j = -div(u j) + div(b omega) + T
    h1 = g.forward(b1 * om - u1 * jj)
    h2 = g.forward(b2 * om - u2 * jj)
    tt = g.forward(_t_term_raw(g, u1h, u2h, b1h, b2h))
    dj = 1j * (g.K1 * h1 + g.K2 * h2) + tt

    mask = g.dealias_mask
    dom = np.where(mask, dom, 0.0)
    dj = np.where(mask, dj, 0.0)
    dom[0, 0] = 0.0
    dj[0, 0] = 0.0
    umax = max(np.max(np.abs(u1)), np.max(np.abs(u2)))
    bmax = max(np.max(np.abs(b1)), np.max(np.abs(b2)))
    return dom, dj, float(umax), float(bmax)


def rhs(state: SimState, sym: DissipationSymbol):
    """Nonlinear right-hand sides (the stiff linear terms are handled by the
    integrating factor in step(), not here)."""
    g = state.grid
    _sigma_on_grid(g, sym)  # validates the symbol matches the grid
    dom, dj, _, _ = _nonlinear(g, state.omega_hat.hat, state.j_hat.hat)
    return ScalarField(g, dom), ScalarField(g, dj)


def _stage_rates(g: SpectralGrid, sigma, om_h, j_h):
    """Instantaneous dissipation rates entering the budget ledgers."""
    w = g.parseval_w
    vol = (2.0 * np.pi) ** 2
    om2 = np.abs(om_h) ** 2
    j2 = np.abs(j_h) ** 2
    diss_u = 2.0 * vol * float(np.sum(w * sigma * om2 * g.inv_ksq))
    d_total = 2.0 * vol * float(np.sum(w * sigma * om2))
    diss_b = 2.0 * vol * float(np.sum(w * j2))            # 2||grad b||^2 = 2||j||^2
    grad_j = vol * float(np.sum(w * g.ksq * j2))
    return diss_u, diss_b, grad_j, d_total


def step(state: SimState, sym: DissipationSymbol, cfg: StepperConfig,
         *, rhs_fn=None, induction_diffusion: bool = True,
         accum: BudgetAccumulators | None = None, dt_cap: float = np.inf) -> SimState:
    """One integrating-factor RK4 step with CFL-limited dt.

    rhs_fn(state, sym) -> (domega, dj) overrides the nonlinear tendency
    (test hook); with a hook installed the velocity sup norms are taken as
    zero, so dt falls back to dt_max.  induction_diffusion=False freezes the
    Laplacian propagator on j (test hook).  accum, when given, receives the
    RK-quadrature increments of the dissipation integrals.  dt_cap shortens
    the step (used by run() to land exactly on t_end).
    """
    g = state.grid
    om0 = state.omega_hat.hat
    j0 = state.j_hat.hat
    if not (np.all(np.isfinite(om0.view(float))) and np.all(np.isfinite(j0.view(float)))):
        raise CflViolation("non-finite state fields", t=state.t)

    if rhs_fn is None:
        k1o, k1j, umax, bmax = _nonlinear(g, om0, j0)
    else:
        do, dj = rhs_fn(state, sym)
        k1o, k1j = do.hat, dj.hat
        umax = bmax = 0.0

    dt = min(cfg.dt_max, cfg.cfl * g.dx / max(umax, bmax, 1e-12), dt_cap)
    if not (dt > 0 and np.isfinite(dt)):
        raise CflViolation(f"computed dt = {dt!r}", t=state.t)

    sigma = _sigma_on_grid(g, sym)
    e_om_h = np.exp(-sigma * (dt / 2.0))
    e_om = np.exp(-sigma * dt)
    if induction_diffusion:
        e_j_h = np.exp(-g.ksq * (dt / 2.0))
        e_j = np.exp(-g.ksq * dt)
    else:
        e_j_h = e_j = 1.0

    def nl(oh, jh, base: SimState):
        if rhs_fn is None:
            a, b, _, _ = _nonlinear(g, oh, jh)
            return a, b
        do, dj = rhs_fn(SimState(base.t, ScalarField(g, oh), ScalarField(g, jh)), sym)
        return do.hat, dj.hat

    om2 = e_om_h * (om0 + (dt / 2.0) * k1o)
    j2 = e_j_h * (j0 + (dt / 2.0) * k1j)
    k2o, k2j = nl(om2, j2, state)

    om3 = e_om_h * om0 + (dt / 2.0) * k2o
    j3 = e_j_h * j0 + (dt / 2.0) * k2j
    k3o, k3j = nl(om3, j3, state)

    om4 = e_om * om0 + dt * e_om_h * k3o
    j4 = e_j * j0 + dt * e_j_h * k3j
    k4o, k4j = nl(om4, j4, state)

    om_new = e_om * om0 + (dt / 6.0) * (e_om * k1o + 2.0 * e_om_h * (k2o + k3o) + k4o)
    j_new = e_j * j0 + (dt / 6.0) * (e_j * k1j + 2.0 * e_j_h * (k2j + k3j) + k4j)
    om_new[0, 0] = 0.0
    j_new[0, 0] = 0.0
    if not (np.all(np.isfinite(om_new.view(float))) and np.all(np.isfinite(j_new.view(float)))):
        raise CflViolation("non-finite fields produced within a step",
                           t=state.t + dt)

    if accum is not None:
        r1 = _stage_rates(g, sigma, om0, j0)
        r2 = _stage_rates(g, sigma, om2, j2)
        r3 = _stage_rates(g, sigma, om3, j3)
        r4 = _stage_rates(g, sigma, om4, j4)
        wsum = [(a + 2.0 * b + 2.0 * c + d) * (dt / 6.0)
                for a, b, c, d in zip(r1, r2, r3, r4)]
        accum.diss_u += wsum[0]
        accum.diss_b += wsum[1]
        accum.grad_j += wsum[2]
        accum.d_total += wsum[3]

    return SimState(state.t + dt, ScalarField(g, om_new), ScalarField(g, j_new))


def run(initial: SimState, sym: DissipationSymbol, cfg: StepperConfig,
        t_end: float, *, sample_every: int = 1, diagnostics_sink=None,
        snapshot_sink=None, rhs_fn=None, induction_diffusion: bool = True,
        accum: BudgetAccumulators | None = None) -> SimState:
    """Advance to t_end, invoking the sinks every sample_every steps (plus the
    initial and final instants).  The last step is shortened to land exactly
    on t_end.  On CflViolation the exception carries a blow-up report."""
    if t_end < initial.t:
        raise DynamicsError(f"t_end={t_end} precedes initial t={initial.t}")
    if accum is None:
        accum = BudgetAccumulators()

    state = initial
    if t_end == initial.t:
        return state

    def emit(s):
        if diagnostics_sink is not None:
            diagnostics_sink(s, accum)
        if snapshot_sink is not None:
            snapshot_sink(s)

    emit(state)
    nstep = 0
    # tolerance avoids an extra sliver step from float accumulation
    while state.t < t_end * (1.0 - 1e-14) - 1e-300:
        try:
            state = step(state, sym, cfg, rhs_fn=rhs_fn,
                         induction_diffusion=induction_diffusion,
                         accum=accum, dt_cap=t_end - state.t)
        except CflViolation as exc:
            exc.t = state.t
            exc.omega_max = state.omega_hat.linf()
            exc.tail_ratio = spectral_tail_ratio(state)
            raise
        nstep += 1
        final = not (state.t < t_end * (1.0 - 1e-14))
        if (nstep % sample_every == 0) or final:
            emit(state)
    return state


def spectral_tail_ratio(state: SimState) -> float:
    """Fraction of (|omega_hat|^2 + |j_hat|^2) carried by the top third of
    the retained (dealiased) band; an under-resolution indicator."""
    g = state.grid
    quad = (np.abs(state.omega_hat.hat) ** 2 + np.abs(state.j_hat.hat) ** 2) * g.parseval_w
    total = float(np.sum(quad))
    if total == 0.0:
        return 0.0
    hi = g.kmag > (2.0 / 3.0) * g.kcut
    return float(np.sum(quad[hi])) / total
