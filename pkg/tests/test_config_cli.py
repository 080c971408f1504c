"""Config parsing, CLI subcommands, snapshot format."""

import os

import numpy as np
import pytest
from click.testing import CliRunner

from gmhd2d.cli import main
from gmhd2d.config import (ConfigError, config_from_dict, parse_config,
                           serialize_config)
from gmhd2d.kernel import PowerLaw
from gmhd2d.snapshots import (CorruptSnapshot, read_snapshot,
                              write_snapshot)

MINIMAL = """
[grid]
n = 64
[time]
t_end = 0.5
[kernel]
family = "power_law"
alpha = 0.5
[init]
preset = "orszag_tang"
"""


def write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_parse_minimal_defaults(tmp_path):
    cfg = parse_config(write(tmp_path, MINIMAL))
    assert cfg.grid.n == 64
    assert cfg.time.cfl == 0.5
    assert cfg.time.dt_max == 0.05
    assert cfg.time.sample_every == 10
    assert cfg.kernel == PowerLaw(alpha=0.5)
    assert cfg.output.dir == "out"
    assert not cfg.output.snapshots


def test_parse_odd_n_rejected(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, MINIMAL.replace("n = 64", "n = 33")))


def test_parse_small_n_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"grid": {"n": 16}, "time": {"t_end": 1.0},
                          "kernel": {"family": "power_law", "alpha": 0.5},
                          "init": {"preset": "orszag_tang"}})


def test_parse_unknown_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(write(tmp_path, MINIMAL + "\n[output]\ndirr = \"x\"\n"))
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config(write(tmp_path, MINIMAL + "\n[extra]\nx = 1\n"))


def test_parse_type_mismatch(tmp_path):
    bad = MINIMAL.replace('alpha = 0.5', 'alpha = "half"')
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, bad))


def test_parse_missing_required(tmp_path):
    with pytest.raises(ConfigError, match="missing"):
        parse_config(write(tmp_path, "[grid]\nn = 64\n"))


def test_random_band_requires_seed():
    base = {"grid": {"n": 64}, "time": {"t_end": 1.0},
            "kernel": {"family": "log_weak", "eps1": 1.0, "eps2": 1.0},
            "init": {"preset": "random_band"}}
    with pytest.raises(ConfigError, match="seed"):
        config_from_dict(base)
    base["init"]["seed"] = 42
    cfg = config_from_dict(base)
    assert cfg.init.seed == 42


def test_config_round_trip(tmp_path):
    full = {
        "grid": {"n": 96},
        "time": {"t_end": 1.5, "cfl": 0.4, "dt_max": 0.002, "sample_every": 5},
        "kernel": {"family": "log_weak", "eps1": 0.5, "eps2": 1.5,
                   "override_weak": True},
        "init": {"preset": "random_band", "seed": 7, "kmin": 3, "kmax": 9,
                 "amplitude": 2.0},
        "output": {"dir": "results", "snapshots": True},
    }
    cfg = config_from_dict(full)
    text = serialize_config(cfg)
    cfg2 = parse_config(write(tmp_path, text, "round.toml"))
    assert cfg2 == cfg


# --------------------------------------------------------------------------
# snapshots


def test_snapshot_round_trip(tmp_path, grid64, sym_lw_64):
    from gmhd2d.presets import orszag_tang

    st = orszag_tang(grid64)
    path = tmp_path / "snap.bin"
    write_snapshot(path, st)
    assert os.path.getsize(path) == 28 + 16 * 64 * 64
    back = read_snapshot(path)
    assert back.t == st.t
    assert np.max(np.abs(back.omega_hat.real() - st.omega_hat.real())) < 1e-14


def test_snapshot_corruption_detected(tmp_path, grid64):
    from gmhd2d.presets import single_mode

    path = tmp_path / "snap.bin"
    write_snapshot(path, single_mode(grid64))
    blob = path.read_bytes()
    (tmp_path / "trunc.bin").write_bytes(blob[:-8])
    with pytest.raises(CorruptSnapshot, match="size"):
        read_snapshot(tmp_path / "trunc.bin")
    (tmp_path / "magic.bin").write_bytes(b"XXXXXXXX" + blob[8:])
    with pytest.raises(CorruptSnapshot, match="magic"):
        read_snapshot(tmp_path / "magic.bin")


# --------------------------------------------------------------------------
# CLI


def test_cli_validate_kernel_exit_codes(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["validate-kernel", "--config",
                               write(tmp_path, MINIMAL)])
    assert res.exit_code == 0
    assert "verdict=admissible" in res.output
    assert "doubling_constant=2" in res.output

    r = np.geomspace(2.0 ** -62, 2.0 ** 11, 300)
    vals = 1.0 / np.log(np.e + 1.0 / r)
    radii_t = ", ".join(f"{x:.17g}" for x in r)
    vals_t = ", ".join(f"{x:.17g}" for x in vals)
    weak_cfg = MINIMAL.replace(
        'family = "power_law"\nalpha = 0.5',
        f'family = "tabulated"\noverride_weak = true\nradii = [{radii_t}]\nvalues = [{vals_t}]')
    res = runner.invoke(main, ["validate-kernel", "--config",
                               write(tmp_path, weak_cfg, "weak.toml")])
    assert res.exit_code == 1
    assert "verdict=weak_only" in res.output

    # non-monotone table -> rejected
    bad_cfg = MINIMAL.replace(
        'family = "power_law"\nalpha = 0.5',
        'family = "tabulated"\nradii = [1e-19, 1e-6, 1.0, 2048.0]\n'
        'values = [1e-3, 2e-3, 1e-3, 5e-3]')
    res = runner.invoke(main, ["validate-kernel", "--config",
                               write(tmp_path, bad_cfg, "bad.toml")])
    assert res.exit_code == 2
    assert "verdict=rejected" in res.output


def test_cli_symbol_zero_row(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["symbol", "--config", write(tmp_path, MINIMAL),
                               "--kappa-max", "0"])
    assert res.exit_code == 0
    lines = res.output.strip().split("\n")
    assert lines[0] == "kappa,sigma"
    k, s = lines[1].split(",")
    assert float(k) == 0.0 and float(s) == 0.0


def test_cli_symbol_powerlaw_ratios(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["symbol", "--config", write(tmp_path, MINIMAL),
                               "--kappa-max", "8"])
    rows = [ln.split(",") for ln in res.output.strip().split("\n")[1:]]
    sig = {float(k): float(s) for k, s in rows}
    for k in (1.0, 2.0, 4.0):
        assert sig[2 * k] / sig[k] == pytest.approx(2.0, rel=1e-6)


def test_cli_symbol_logweak_oracle(tmp_path):
    lw_cfg = MINIMAL.replace('family = "power_law"\nalpha = 0.5',
                             'family = "log_weak"\neps1 = 1.0\neps2 = 1.0')
    runner = CliRunner()
    res = runner.invoke(main, ["symbol", "--config",
                               write(tmp_path, lw_cfg, "lw.toml"),
                               "--kappa-max", "7"])
    rows = [ln.split(",") for ln in res.output.strip().split("\n")[1:]]
    sig = {float(k): float(s) for k, s in rows}
    # independent-quadrature oracle values
    assert sig[1.0] == pytest.approx(5.5503533092394743, rel=1e-6)
    assert sig[2.0] == pytest.approx(9.2331415619846879, rel=1e-6)
    assert sig[7.0] == pytest.approx(26.680887712001947, rel=1e-6)


RUN_CFG = """
[grid]
n = 32
[time]
t_end = 0.05
dt_max = 0.002
sample_every = 5
[kernel]
family = "power_law"
alpha = 0.5
[init]
preset = "random_band"
seed = 11
[output]
dir = "{out}"
snapshots = true
"""


def test_cli_run_t_end_zero_header_only(tmp_path):
    cfg = RUN_CFG.replace("t_end = 0.05", "t_end = 0.0").format(out=tmp_path / "o")
    runner = CliRunner()
    res = runner.invoke(main, ["run", "--config", write(tmp_path, cfg)])
    assert res.exit_code == 0
    lines = (tmp_path / "o" / "diagnostics.csv").read_text().strip().split("\n")
    assert len(lines) == 2  # version line + header, no records
    assert lines[1].startswith("t,energy_u,")


def test_cli_run_deterministic_bytes(tmp_path):
    runner = CliRunner()
    outs = []
    for tag in ("a", "b"):
        cfg = RUN_CFG.format(out=tmp_path / tag)
        res = runner.invoke(main, ["run", "--config",
                                   write(tmp_path, cfg, f"{tag}.toml")])
        assert res.exit_code == 0, res.output
        outs.append(tmp_path / tag)
    csv_a = (outs[0] / "diagnostics.csv").read_bytes()
    csv_b = (outs[1] / "diagnostics.csv").read_bytes()
    assert csv_a == csv_b
    snaps_a = sorted(os.listdir(outs[0]))
    snaps_b = sorted(os.listdir(outs[1]))
    assert snaps_a == snaps_b
    for name in snaps_a:
        if name.endswith(".bin"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_cli_diag_two_path_instantaneous(tmp_path):
    cfg_text = RUN_CFG.format(out=tmp_path / "o")
    cfg_path = write(tmp_path, cfg_text)
    runner = CliRunner()
    res = runner.invoke(main, ["run", "--config", cfg_path])
    assert res.exit_code == 0
    snaps = sorted(str(tmp_path / "o" / f) for f in os.listdir(tmp_path / "o")
                   if f.endswith(".bin"))
    assert snaps
    res = runner.invoke(main, ["diag", "--config", cfg_path] + snaps)
    assert res.exit_code == 0, res.output

    from gmhd2d.diagnostics import CSV_COLUMNS, read_csv
    in_run = read_csv(tmp_path / "o" / "diagnostics.csv")
    lines = res.output.strip().split("\n")
    redone = [dict(zip(CSV_COLUMNS, map(float, ln.split(","))))
              for ln in lines[2:]]
    assert len(redone) == len(in_run)
    instantaneous = [c for c in CSV_COLUMNS
                     if not c.endswith("_cum") and c != "bkm_integral"]
    for a, b in zip(in_run, redone):
        for c in instantaneous:
            av, bv = getattr(a, c), b[c]
            assert bv == pytest.approx(av, rel=1e-12, abs=1e-13), c


def test_cli_diag_corrupt_snapshot(tmp_path):
    cfg_path = write(tmp_path, RUN_CFG.format(out=tmp_path / "o"))
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"GARBAGE!")
    runner = CliRunner()
    res = runner.invoke(main, ["diag", "--config", cfg_path, str(bad)])
    assert res.exit_code == 2


def test_cli_run_blowup_reports_and_exits_3(tmp_path, monkeypatch):
    # force the stepper to report instability; the run command must emit the
    # blow-up report (time, max |omega|, tail ratio) and exit with code 3
    import gmhd2d.cli as cli_mod
    from gmhd2d.dynamics import CflViolation

    def exploding_run(initial, sym, cfg, t_end, **kw):
        sink = kw.get("diagnostics_sink")
        if sink is not None:
            from gmhd2d.dynamics import BudgetAccumulators
            sink(initial, kw.get("accum") or BudgetAccumulators())
        raise CflViolation("non-finite state fields", t=0.123,
                           omega_max=1e12, tail_ratio=0.7)

    monkeypatch.setattr(cli_mod, "run", exploding_run)
    cfg_path = write(tmp_path, RUN_CFG.format(out=tmp_path / "o"))
    res = CliRunner().invoke(main, ["run", "--config", cfg_path])
    assert res.exit_code == 3
    err = res.stderr
    assert "blow-up abort" in err
    assert "max_abs_omega" in err
    assert "tail_ratio" in err
    # partial diagnostics still written
    assert (tmp_path / "o" / "diagnostics.csv").exists()
