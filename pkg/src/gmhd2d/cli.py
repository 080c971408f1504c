"""Command-line interface.

Exit codes: 0 success / admissible, 1 weak-only, 2 error / rejected,
3 blow-up abort.
"""

from __future__ import annotations

import os
import sys

import click
import numpy as np

from . import diagnostics as diag
from .config import ConfigError, parse_config
from .dynamics import (BudgetAccumulators, CflViolation, StepperConfig, run)
from .kernel import KernelError, Verdict, compute_symbol, validate_profile
from .presets import build_preset
from .snapshots import CorruptSnapshot, read_snapshot, write_snapshot
from .spectral import SpectralGrid, _sigma_on_grid, symbol_for_grid


@click.group()
def main():
    """2D generalized-MHD pseudo-spectral solver with nonlocal dissipation."""


def _load_config(path):
    try:
        return parse_config(path)
    except (ConfigError, OSError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)


@main.command("validate-kernel")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def cmd_validate_kernel(config_path):
    """Validate the kernel profile; print the report as key=value lines."""
    cfg = _load_config(config_path)
    try:
        report = validate_profile(cfg.kernel)
    except KernelError as exc:
        click.echo(f"validation error: {exc}", err=True)
        sys.exit(2)
    click.echo(report.as_key_values())
    sys.exit({Verdict.ADMISSIBLE: 0, Verdict.WEAK_ONLY: 1,
              Verdict.REJECTED: 2}[report.verdict])


@main.command("symbol")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--kappa-max", type=float, required=True)
def cmd_symbol(config_path, kappa_max):
    """Emit sigma(kappa) at integer magnitudes 0..kappa_max as CSV."""
    cfg = _load_config(config_path)
    if kappa_max < 0:
        click.echo("kappa-max must be non-negative", err=True)
        sys.exit(2)
    kappas = list(range(int(kappa_max) + 1))
    try:
        sym = compute_symbol(cfg.kernel, kappas)
    except KernelError as exc:
        click.echo(f"symbol error: {exc}", err=True)
        sys.exit(2)
    click.echo("kappa,sigma")
    for k, s in zip(sym.kappas, sym.sigmas):
        click.echo(f"{k:.16e},{s:.16e}")


@main.command("run")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Override output.dir from the config.")
def cmd_run(config_path, out_dir):
    """Run the simulation; write diagnostics CSV and optional snapshots."""
    cfg = _load_config(config_path)
    out = out_dir or cfg.output.dir
    os.makedirs(out, exist_ok=True)

    grid = SpectralGrid(cfg.grid.n)
    try:
        sym = symbol_for_grid(cfg.kernel, grid)
    except KernelError as exc:
        click.echo(f"kernel error: {exc}", err=True)
        sys.exit(2)
    state = build_preset(grid, cfg.init)
    stepper = StepperConfig(cfl=cfg.time.cfl, dt_max=cfg.time.dt_max)
    collector = diag.Collector(sym)
    accum = BudgetAccumulators()

    snap_idx = [0]

    def snapshot_sink(s):
        if cfg.output.snapshots:
            write_snapshot(os.path.join(out, f"snapshot_{snap_idx[0]:06d}.bin"), s)
            snap_idx[0] += 1

    csv_path = os.path.join(out, "diagnostics.csv")
    try:
        final = run(state, sym, stepper, cfg.time.t_end,
                    sample_every=cfg.time.sample_every,
                    diagnostics_sink=collector, snapshot_sink=snapshot_sink,
                    accum=accum)
    except CflViolation as exc:
        diag.write_csv(csv_path, collector.records)
        click.echo("blow-up abort:", err=True)
        click.echo(f"  t={exc.t:.16e}", err=True)
        click.echo(f"  max_abs_omega={exc.omega_max:.16e}", err=True)
        click.echo(f"  tail_ratio={exc.tail_ratio:.16e}", err=True)
        sys.exit(3)

    diag.write_csv(csv_path, collector.records)
    recs = collector.records
    if recs:
        bkm, flag = diag.bkm_monitor(recs)
        energy = diag.energy_budget(recs) if len(recs) >= 2 else None
        enstrophy = diag.enstrophy_budget(recs) if len(recs) >= 2 else None
        final_e = recs[-1].energy_u + recs[-1].energy_b
        max_om = max(r.lp_omega_inf for r in recs)
        click.echo(f"final_time={final.t:.16e}")
        click.echo(f"final_energy={final_e:.16e}")
        click.echo(f"max_omega_inf={max_om:.16e}")
        click.echo(f"bkm_integral={bkm:.16e}")
        click.echo(f"blowup_flag={str(flag).lower()}")
        if energy is not None:
            click.echo(f"energy_budget={'pass' if energy.passed else 'fail'} "
                       f"(max_residual={energy.max_residual:.3e})")
        if enstrophy is not None:
            click.echo(f"enstrophy_budget={'pass' if enstrophy.passed else 'fail'} "
                       f"(c_fit={enstrophy.c_fit:.6e})")
    else:
        click.echo(f"final_time={final.t:.16e}")
        click.echo("no samples (t_end equals the initial time)")


@main.command("diag")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.argument("snapshots", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
def cmd_diag(config_path, snapshots):
    """Recompute diagnostics records from stored snapshots (offline).

    Instantaneous columns are exact; cumulative columns are trapezoid
    re-integrations over the snapshot sequence."""
    cfg = _load_config(config_path)
    grid = SpectralGrid(cfg.grid.n)
    try:
        sym = symbol_for_grid(cfg.kernel, grid)
    except KernelError as exc:
        click.echo(f"kernel error: {exc}", err=True)
        sys.exit(2)

    try:
        states = [read_snapshot(p) for p in snapshots]
    except CorruptSnapshot as exc:
        click.echo(f"corrupt snapshot: {exc}", err=True)
        sys.exit(2)
    for s in states:
        if s.grid.n != grid.n:
            click.echo(f"snapshot grid n={s.grid.n} mismatches config n={grid.n}",
                       err=True)
            sys.exit(2)
    states.sort(key=lambda s: s.t)

    collector = diag.Collector(sym)
    accum = BudgetAccumulators()
    prev = None
    for s in states:
        if prev is not None:
            dt = s.t - prev.t
            accum.diss_u += 0.5 * (_diss_u_rate(prev, sym) + _diss_u_rate(s, sym)) * dt
            accum.diss_b += 0.5 * (_diss_b_rate(prev) + _diss_b_rate(s)) * dt
            accum.grad_j += 0.5 * (_grad_j_rate(prev) + _grad_j_rate(s)) * dt
        collector(s, accum)
        prev = s

    click.echo(diag.CSV_VERSION_LINE)
    click.echo(diag.CSV_HEADER)
    for r in collector.records:
        click.echo(r.csv_row())


def _diss_u_rate(state, sym):
    g = state.grid
    sigma = _sigma_on_grid(g, sym)
    om2 = np.abs(state.omega_hat.hat) ** 2
    return 2.0 * (2.0 * np.pi) ** 2 * float(np.sum(g.parseval_w * sigma * om2 * g.inv_ksq))


def _diss_b_rate(state):
    g = state.grid
    j2 = np.abs(state.j_hat.hat) ** 2
    return 2.0 * (2.0 * np.pi) ** 2 * float(np.sum(g.parseval_w * j2))


def _grad_j_rate(state):
    g = state.grid
    j2 = np.abs(state.j_hat.hat) ** 2
    return (2.0 * np.pi) ** 2 * float(np.sum(g.parseval_w * g.ksq * j2))


if __name__ == "__main__":
    main()
