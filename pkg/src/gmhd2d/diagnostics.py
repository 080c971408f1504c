"""Budget ledgers, norm tracking, positivity checks, and blow-up monitoring.

Everything here is a pure function of state snapshots; the time-cumulative
dissipation integrals are produced by the stepper (BudgetAccumulators) and
threaded through the records.  The CSV schema is fixed: see CSV_COLUMNS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .dynamics import BudgetAccumulators, SimState, reconstruct, spectral_tail_ratio
from .kernel import KernelProfile
from .spectral import (ScalarField, SpectralGrid, VectorField, _sigma_on_grid,
                       dealias, laplacian)


class DiagnosticsError(Exception):
    pass


class InsufficientSamples(DiagnosticsError):
    pass


class OddP(DiagnosticsError):
    pass


class TooManyPoints(DiagnosticsError):
    pass


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    energy_u: float
    energy_b: float
    diss_u_cum: float
    diss_b_cum: float
    enstrophy: float
    current_sq: float
    grad_j_cum: float
    lp_omega_2: float
    lp_omega_4: float
    lp_omega_8: float
    lp_omega_inf: float
    lp_j_2: float
    lp_j_4: float
    lp_j_8: float
    lp_j_inf: float
    b_inf: float
    grad_b_lp: float          # L4 norm of |grad b|
    g_l2: float
    g_inf: float
    f_inf: float
    d_total: float
    bkm_integral: float
    tail_ratio: float

    def csv_row(self) -> str:
        return ",".join(f"{getattr(self, c):.16e}" for c in CSV_COLUMNS)


CSV_COLUMNS = tuple(f.name for f in fields(DiagnosticsRecord))
CSV_VERSION_LINE = "# gmhd2d diagnostics v1"
CSV_HEADER = ",".join(CSV_COLUMNS)


def _lp_grid(r: np.ndarray, p: float, dx2: float) -> float:
    return float((np.sum(np.abs(r) ** p) * dx2) ** (1.0 / p))


class Collector:
    """Assembles DiagnosticsRecords from state snapshots; accumulates the
    BKM integral by trapezoid across successive samples."""

    def __init__(self, sym, check_identities: bool = True):
        self.sym = sym
        self.check_identities = check_identities
        self.records: list[DiagnosticsRecord] = []
        self._prev_t = None
        self._prev_om_inf = None
        self._bkm = 0.0

    def __call__(self, state: SimState, accum: BudgetAccumulators):
        self.records.append(self.collect(state, accum))

    def collect(self, state: SimState, accum: BudgetAccumulators) -> DiagnosticsRecord:
        g = state.grid
        sigma = _sigma_on_grid(g, self.sym)
        om_h = state.omega_hat.hat
        j_h = state.j_hat.hat
        om2 = np.abs(om_h) ** 2
        j2 = np.abs(j_h) ** 2
        w = g.parseval_w

        energy_u = (2.0 * np.pi) ** 2 * float(np.sum(w * om2 * g.inv_ksq))
        energy_b = (2.0 * np.pi) ** 2 * float(np.sum(w * j2 * g.inv_ksq))
        enstrophy = (2.0 * np.pi) ** 2 * float(np.sum(w * om2))
        current_sq = (2.0 * np.pi) ** 2 * float(np.sum(w * j2))
        d_total = 2.0 * (2.0 * np.pi) ** 2 * float(np.sum(w * sigma * om2))

        om_r = g.inverse(om_h)
        j_r = g.inverse(j_h)
        dx2 = g.dx ** 2
        lp_om = [_lp_grid(om_r, p, dx2) for p in (2, 4, 8)]
        lp_j = [_lp_grid(j_r, p, dx2) for p in (2, 4, 8)]
        om_inf = float(np.max(np.abs(om_r)))
        j_inf = float(np.max(np.abs(j_r)))

        u, b = reconstruct(state)
        b1, b2 = b.real()
        b_inf = float(np.max(np.hypot(b1, b2)))
        gb1 = g.inverse(1j * g.K1 * b.c1.hat)
        gb2 = g.inverse(1j * g.K2 * b.c1.hat)
        gb3 = g.inverse(1j * g.K1 * b.c2.hat)
        gb4 = g.inverse(1j * g.K2 * b.c2.hat)
        grad_b_mag = np.sqrt(gb1 ** 2 + gb2 ** 2 + gb3 ** 2 + gb4 ** 2)
        grad_b_lp = _lp_grid(grad_b_mag, 4, dx2)

        g_field, g_norms = structural_g(u, b)
        f_field, f_inf = forcing_f(u, b)

        if self.check_identities:
            # Parseval identity for the quadratic dissipation form
            lom = g.inverse(sigma * om_h)
            d_real = 2.0 * float(np.sum(om_r * lom)) * dx2
            scale = max(abs(d_total), 1e-30)
            if abs(d_real - d_total) > 1e-10 * scale:
                raise DiagnosticsError(
                    f"d_total Parseval identity violated: {d_total!r} vs {d_real!r}")

        if self._prev_t is not None:
            self._bkm += 0.5 * (om_inf + self._prev_om_inf) * (state.t - self._prev_t)
        self._prev_t = state.t
        self._prev_om_inf = om_inf

        return DiagnosticsRecord(
            t=state.t,
            energy_u=energy_u,
            energy_b=energy_b,
            diss_u_cum=accum.diss_u,
            diss_b_cum=accum.diss_b,
            enstrophy=enstrophy,
            current_sq=current_sq,
            grad_j_cum=accum.grad_j,
            lp_omega_2=lp_om[0], lp_omega_4=lp_om[1], lp_omega_8=lp_om[2],
            lp_omega_inf=om_inf,
            lp_j_2=lp_j[0], lp_j_4=lp_j[1], lp_j_8=lp_j[2], lp_j_inf=j_inf,
            b_inf=b_inf,
            grad_b_lp=grad_b_lp,
            g_l2=g_norms["l2"],
            g_inf=g_norms["linf"],
            f_inf=f_inf,
            d_total=d_total,
            bkm_integral=self._bkm,
            tail_ratio=spectral_tail_ratio(state),
        )


# --------------------------------------------------------------------------
# structural quantities


def structural_g(u: VectorField, b: VectorField):
    """G = Lap b + (b.grad) u, with its L2/L4/L8/Linf norms."""
    g = u.grid
    b1, b2 = b.real()
    du = [[g.inverse(1j * g.K1 * u.c1.hat), g.inverse(1j * g.K2 * u.c1.hat)],
          [g.inverse(1j * g.K1 * u.c2.hat), g.inverse(1j * g.K2 * u.c2.hat)]]
    adv1 = b1 * du[0][0] + b2 * du[0][1]
    adv2 = b1 * du[1][0] + b2 * du[1][1]
    g1 = dealias(ScalarField(g, laplacian(b.c1).hat + g.forward(adv1)))
    g2 = dealias(ScalarField(g, laplacian(b.c2).hat + g.forward(adv2)))
    gf = VectorField(g1, g2)
    r1, r2 = gf.real()
    mag = np.hypot(r1, r2)
    dx2 = g.dx ** 2
    norms = {
        "l2": float(np.sqrt(np.sum(mag ** 2) * dx2)),
        "l4": _lp_grid(mag, 4, dx2),
        "l8": _lp_grid(mag, 8, dx2),
        "linf": float(np.max(mag)),
    }
    return gf, norms


def forcing_f(u: VectorField, b: VectorField):
    """f = b1 G2 - b2 G1 (real-space assembly) and its sup norm."""
    gf, _ = structural_g(u, b)
    b1, b2 = b.real()
    g1, g2 = gf.real()
    f = b1 * g2 - b2 * g1
    return f, float(np.max(np.abs(f)))


def positivity_check(omega: ScalarField, sym, p: int) -> float:
    """Quadrature value of int |omega|^(p-2) omega (L omega) dx.

    Non-negative for the continuum operator (Cordoba-Cordoba); small negative
    values up to quadrature error are tolerated by callers."""
    if p < 2 or p % 2:
        raise OddP(f"p must be an even integer >= 2, got {p}")
    g = omega.grid
    om_r = omega.real()
    lom = g.inverse(_sigma_on_grid(g, sym) * omega.hat)
    return float(np.sum(np.abs(om_r) ** (p - 2) * om_r * lom) * g.dx ** 2)


# --------------------------------------------------------------------------
# pointwise nonlocal dissipation density


def _offset_weights(grid: SpectralGrid, profile: KernelProfile):
    """Quadrature weights dx^2/(|y|^2 m(|y|)) for grid offsets with
    dx <= |y| <= pi (min-image), plus the sub-dx shell factor
    int_0^dx r/m(r) dr for the gradient surrogate."""
    n = grid.n
    idx = np.arange(n)
    c = (idx + n // 2) % n - n // 2      # min-image integer offsets
    y1 = c[:, None] * grid.dx
    y2 = c[None, :] * grid.dx
    rr = np.hypot(y1, y2)
    mask = (rr >= grid.dx * 0.999999) & (rr <= np.pi)
    w = np.zeros_like(rr)
    mv = profile._m_array(rr[mask])
    w[mask] = grid.dx ** 2 / (rr[mask] ** 2 * mv)
    # sub-dx shell: int_0^dx r/m(r) dr over 60 dyadic octaves
    edges = grid.dx * 2.0 ** (-np.arange(61, dtype=float))[::-1]
    from .kernel import _gl_panels

    nodes, wts = _gl_panels(edges)
    shell = float(np.sum(nodes / profile._m_array(nodes) * wts))
    return w, mask, shell


def pointwise_d(omega: ScalarField, profile: KernelProfile, points) -> list[float]:
    """D(x_i) = P.V. int (omega(x_i) - omega(x_i - y))^2 / (|y|^2 m(|y|)) dy,
    truncated to |y| <= pi on the torus; the |y| < dx shell uses the gradient
    surrogate pi |grad omega(x_i)|^2 int_0^dx r/m(r) dr.

    points: list of (i1, i2) grid indices, at most 16 (O(n^2) cost each).
    """
    pts = list(points)
    if len(pts) > 16:
        raise TooManyPoints(f"at most 16 sample points, got {len(pts)}")
    g = omega.grid
    om_r = omega.real()
    w, mask, shell = _offset_weights(g, profile)
    g1 = g.inverse(1j * g.K1 * omega.hat)
    g2 = g.inverse(1j * g.K2 * omega.hat)
    n = g.n
    idx = np.arange(n)
    out = []
    for (i1, i2) in pts:
        shifted = om_r[np.ix_((i1 - idx) % n, (i2 - idx) % n)]
        diff2 = (om_r[i1, i2] - shifted) ** 2
        val = float(np.sum(w * diff2))
        val += np.pi * (g1[i1, i2] ** 2 + g2[i1, i2] ** 2) * shell
        out.append(val)
    return out


def total_d_realspace(omega: ScalarField, profile: KernelProfile) -> float:
    """Grid sum of pointwise_d over all points, via FFT autocorrelation.

    Consistency target: within ~15% of the spectral d_total (the |y| > pi
    tail is truncated on the torus)."""
    g = omega.grid
    om_r = omega.real()
    w, mask, shell = _offset_weights(g, profile)
    spec = np.fft.rfft2(om_r)
    acorr = np.fft.irfft2(spec * np.conj(spec), s=(g.n, g.n))  # sum_x om(x) om(x-y)
    sum_sq = float(np.sum(om_r ** 2))
    diff2_sum = 2.0 * (sum_sq - acorr)                          # sum_x (om(x)-om(x-y))^2
    total = float(np.sum(w * diff2_sum)) * g.dx ** 2
    g1 = g.inverse(1j * g.K1 * omega.hat)
    g2 = g.inverse(1j * g.K2 * omega.hat)
    total += np.pi * shell * float(np.sum(g1 ** 2 + g2 ** 2)) * g.dx ** 2
    return total


# --------------------------------------------------------------------------
# budget verdicts


@dataclass(frozen=True)
class BudgetVerdict:
    passed: bool
    max_residual: float
    c_fit: float | None = None
    detail: str = ""


def energy_budget(records, tol: float = 1e-6) -> BudgetVerdict:
    """Lemma-2 ledger: E(t) + cumulative dissipation <= E(0)(1 + tol) at every
    sample; reports the max absolute residual |E(0) - E(t) - D_cum(t)|."""
    recs = list(records)
    if len(recs) < 2:
        raise InsufficientSamples("energy budget needs at least 2 samples")
    e0 = recs[0].energy_u + recs[0].energy_b
    passed = True
    max_res = 0.0
    for r in recs:
        e = r.energy_u + r.energy_b
        d = r.diss_u_cum + r.diss_b_cum
        if e + d > e0 * (1.0 + tol) + 1e-300:
            passed = False
        max_res = max(max_res, abs(e0 - e - d))
    return BudgetVerdict(passed=passed, max_residual=max_res,
                         detail=f"E(0)={e0:.6e}")


def enstrophy_budget(records, slack: float = 1e-9) -> BudgetVerdict:
    """Lemma-3 ledger.  Per sample interval the discrete form

        dY/dt + <d_total> + 2 <||grad j||^2>  <=  C_fit ||omega||^2 ||j||^2

    defines C_fit as the smallest constant making every interval pass
    (reported, never asserted a priori); the Gronwall-integrated inequality
    with that C_fit is then checked at every sample."""
    recs = list(records)
    if len(recs) < 2:
        raise InsufficientSamples("enstrophy budget needs at least 2 samples")
    y = [r.enstrophy + r.current_sq for r in recs]
    prod = [r.enstrophy * r.current_sq for r in recs]
    c_fit = 0.0
    for i in range(len(recs) - 1):
        a, b_ = recs[i], recs[i + 1]
        dt = b_.t - a.t
        if dt <= 0:
            continue
        dy = (y[i + 1] - y[i]) / dt
        davg = 0.5 * (a.d_total + b_.d_total)
        gj = 2.0 * (b_.grad_j_cum - a.grad_j_cum) / dt
        lhs = dy + davg + gj
        rhs_scale = 0.5 * (prod[i] + prod[i + 1])
        if lhs > 0 and rhs_scale > 0:
            c_fit = max(c_fit, lhs / rhs_scale)
    if not math.isfinite(c_fit):
        return BudgetVerdict(passed=False, max_residual=math.inf, c_fit=c_fit)

    # Trapezoid-error allowance for the only trapezoid-integrated term
    # (d_total); the grad-j integral comes exact from the stepper and Y from
    # the samples.  Per interval the error is dt^3 |f''|/12 = dt |D2 f|/12
    # with D2 the second difference; kept with a 2x safety factor.
    g = [r.d_total for r in recs]
    n_int = len(recs) - 1
    inc = [0.0] * n_int
    for i in range(1, n_int):
        dt = recs[i + 1].t - recs[i].t
        inc[i] = dt / 6.0 * abs(g[i + 1] - 2 * g[i] + g[i - 1])
    if n_int > 1:
        inc[0] = inc[1]  # no second difference at the left end
    else:
        # single interval: coarse first-difference bound
        inc[0] = (recs[1].t - recs[0].t) / 6.0 * abs(g[1] - g[0])
    eps_cum = [0.0]
    for v in inc:
        eps_cum.append(eps_cum[-1] + v)

    # integrated Gronwall form: Y(t) + int(d_total + 2||grad j||^2)
    #   <= Y(0) + C_fit int Y_prod dtau   (trapezoid, same discretization)
    passed = True
    max_res = 0.0
    diss = 0.0
    rhs_int = 0.0
    for i in range(len(recs) - 1):
        a, b_ = recs[i], recs[i + 1]
        dt = b_.t - a.t
        diss += 0.5 * (a.d_total + b_.d_total) * dt + 2.0 * (b_.grad_j_cum - a.grad_j_cum)
        rhs_int += 0.5 * (prod[i] + prod[i + 1]) * dt
        lhs = y[i + 1] + diss
        rhs = y[0] + c_fit * rhs_int
        margin = lhs - rhs
        max_res = max(max_res, margin)
        if margin > slack * max(abs(rhs), 1.0) + eps_cum[i + 1]:
            passed = False
    return BudgetVerdict(passed=passed, max_residual=max_res, c_fit=c_fit)


def bkm_monitor(records):
    """(integral of ||omega||_inf dt, blow-up heuristic flag).

    The flag trips on tail_ratio > 0.1 or a 10x jump of ||omega||_inf within
    one sample interval; reported, never asserted."""
    recs = list(records)
    if not recs:
        return 0.0, False
    flag = any(r.tail_ratio > 0.1 for r in recs)
    for a, b in zip(recs[:-1], recs[1:]):
        base = max(a.lp_omega_inf, 1e-300)
        if b.lp_omega_inf / base > 10.0:
            flag = True
    return recs[-1].bkm_integral, flag


# --------------------------------------------------------------------------
# CSV serialization


def write_csv(path, records):
    with open(path, "w", newline="\n") as fh:
        fh.write(CSV_VERSION_LINE + "\n")
        fh.write(CSV_HEADER + "\n")
        for r in records:
            fh.write(r.csv_row() + "\n")


def read_csv(path) -> list[DiagnosticsRecord]:
    with open(path, "r") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or not lines[0].startswith("#"):
        raise DiagnosticsError("missing version line")
    if lines[1] != CSV_HEADER:
        raise DiagnosticsError("unexpected CSV header")
    out = []
    for ln in lines[2:]:
        if not ln:
            continue
        vals = [float(tok) for tok in ln.split(",")]
        out.append(DiagnosticsRecord(**dict(zip(CSV_COLUMNS, vals))))
    return out
