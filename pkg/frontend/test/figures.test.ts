import { describe, expect, it } from "vitest";
import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { PNG } from "pngjs";

import { parseDiagnosticsCsv } from "../src/csv.js";
import {
  fitSymbolSlopes,
  heatmapFigure,
  ledgerFigure,
  makeFigure,
  supnormFigure,
  symbolCompareFigure,
} from "../src/figures.js";

const FIX = join(__dirname, "..", "fixtures");
const CLI = join(__dirname, "..", "dist", "cli.js");

describe("ledger figure", () => {
  const input = join(FIX, "ledger_ot256.csv");

  it("renders with the E(0) reference line at the right height", () => {
    const svg = ledgerFigure([input]);
    expect(svg).toContain('class="e0-ref"');
    expect(svg).toContain('class="energy"');
    expect(svg).toContain('class="ledger"');
    // the reference line y-coordinate must coincide with the first point of
    // the ledger polyline (E(0) + zero dissipation)
    const ref = svg.match(/class="e0-ref"[^/]*y1="([0-9.\-]+)"/);
    const ledger = svg.match(/class="ledger" points="([0-9.\-]+),([0-9.\-]+)/);
    expect(ref).toBeTruthy();
    expect(ledger).toBeTruthy();
    expect(Number(ledger![2])).toBeCloseTo(Number(ref![1]), 1);
  });

  it("keeps the ledger curve at or below the reference (energy inequality)", () => {
    const rows = parseDiagnosticsCsv(input).rows;
    const e0 = rows[0].energy_u + rows[0].energy_b;
    for (const r of rows) {
      expect(r.energy_u + r.energy_b + r.diss_u_cum + r.diss_b_cum)
        .toBeLessThanOrEqual(e0 * (1 + 1e-6));
    }
  });

  it("is byte-deterministic", () => {
    expect(ledgerFigure([input])).toBe(ledgerFigure([input]));
  });

  it("renders an axes-only figure from a header-only CSV", () => {
    const svg = ledgerFigure([join(FIX, "empty.csv")]);
    expect(svg).toContain("<rect");
    expect(svg).not.toContain("<polyline");
  });
});

describe("symbol comparison figure", () => {
  const inputs = [join(FIX, "symbol_alpha_025.csv"), join(FIX, "symbol_alpha_075.csv")];

  it("recovers the power-law log-log slopes 2*alpha within 1%", () => {
    const fits = fitSymbolSlopes(inputs);
    expect(Math.abs(fits[0].slope / 0.5 - 1)).toBeLessThan(0.01);
    expect(Math.abs(fits[1].slope / 1.5 - 1)).toBeLessThan(0.01);
  });

  it("draws one monotone curve per input with fitted slopes in the legend", () => {
    const svg = symbolCompareFigure(inputs);
    expect(svg).toContain('class="symbol-0"');
    expect(svg).toContain('class="symbol-1"');
    expect(svg).toMatch(/slope 0\.50\d\d/);
    expect(svg).toMatch(/slope 1\.50\d\d/);
  });
});

describe("supnorm figure", () => {
  it("renders both traces", () => {
    const svg = supnormFigure([join(FIX, "ledger_ot256.csv")]);
    expect(svg).toContain('class="supnorm"');
    expect(svg).toContain('class="bkm"');
  });
});

describe("heatmap", () => {
  it("renders sin x1 as vertical stripes", () => {
    const buf = heatmapFigure([join(FIX, "single_mode_n64.bin")], "omega");
    const png = PNG.sync.read(buf);
    expect(png.width).toBe(64);
    expect(png.height).toBe(64);
    // constant within each column, varying across columns
    for (const x of [3, 16, 48]) {
      const top = png.data.subarray(4 * x, 4 * x + 3);
      for (const y of [10, 31, 63]) {
        const px = png.data.subarray(4 * (y * 64 + x), 4 * (y * 64 + x) + 3);
        expect(Array.from(px)).toEqual(Array.from(top));
      }
    }
    const colA = png.data[4 * 16];     // x=16: sin > 0 -> red-ish
    const colB = png.data[4 * 48];     // x=48: sin < 0 -> blue-ish
    expect(colA).not.toBe(colB);
  });

  it("is byte-deterministic", () => {
    const a = heatmapFigure([join(FIX, "single_mode_n64.bin")], "omega");
    const b = heatmapFigure([join(FIX, "single_mode_n64.bin")], "omega");
    expect(a.equals(b)).toBe(true);
  });
});

describe("makeFigure / CLI", () => {
  it("rejects unknown kinds", () => {
    expect(() =>
      makeFigure({ kind: "sparkline" as never, inputs: ["x"], output: "y" }),
    ).toThrow();
  });

  it("cli renders a ledger figure and exits 0 on a header-only CSV", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const out = join(dir, "empty.svg");
    execFileSync(process.execPath, [
      CLI, "--kind", "ledger", "--in", join(FIX, "empty.csv"), "--out", out,
    ]);
    expect(existsSync(out)).toBe(true);
    expect(readFileSync(out, "utf-8")).toContain("<svg");
  });

  it("cli writes the criterion figures", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    execFileSync(process.execPath, [
      CLI, "--kind", "ledger", "--in", join(FIX, "ledger_ot256.csv"),
      "--out", join(dir, "ledger.svg"),
    ]);
    execFileSync(process.execPath, [
      CLI, "--kind", "symbol_compare",
      "--in", join(FIX, "symbol_alpha_025.csv"), join(FIX, "symbol_alpha_075.csv"),
      "--out", join(dir, "symbols.svg"),
    ]);
    execFileSync(process.execPath, [
      CLI, "--kind", "heatmap", "--in", join(FIX, "single_mode_n64.bin"),
      "--out", join(dir, "omega.png"),
    ]);
    for (const f of ["ledger.svg", "symbols.svg", "omega.png"]) {
      expect(existsSync(join(dir, f))).toBe(true);
    }
  });

  it("cli exits 2 on a corrupt snapshot", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    let code = 0;
    try {
      execFileSync(process.execPath, [
        CLI, "--kind", "heatmap", "--in", join(FIX, "empty.csv"),
        "--out", join(dir, "x.png"),
      ], { stdio: "pipe" });
    } catch (err) {
      code = (err as { status: number }).status;
    }
    expect(code).toBe(2);
  });
});
