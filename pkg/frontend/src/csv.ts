/** Readers for the solver's CSV outputs.
 *
 * Diagnostics files carry a version comment line, a fixed header, and rows
 * of 17-significant-digit floats; symbol files are two-column kappa,sigma.
 */

import { readFileSync } from "node:fs";

export class SchemaMismatch extends Error {}

export const DIAGNOSTICS_COLUMNS = [
  "t", "energy_u", "energy_b", "diss_u_cum", "diss_b_cum", "enstrophy",
  "current_sq", "grad_j_cum", "lp_omega_2", "lp_omega_4", "lp_omega_8",
  "lp_omega_inf", "lp_j_2", "lp_j_4", "lp_j_8", "lp_j_inf", "b_inf",
  "grad_b_lp", "g_l2", "g_inf", "f_inf", "d_total", "bkm_integral",
  "tail_ratio",
] as const;

export type DiagnosticsRow = Record<(typeof DIAGNOSTICS_COLUMNS)[number], number>;

export interface DiagnosticsFile {
  version: string;
  rows: DiagnosticsRow[];
}

export function parseDiagnosticsCsv(path: string): DiagnosticsFile {
  const text = readFileSync(path, "utf-8");
  const lines = text.split("\n").filter((ln) => ln.length > 0);
  if (lines.length < 2 || !lines[0].startsWith("#")) {
    throw new SchemaMismatch(`${path}: missing version line`);
  }
  if (lines[1] !== DIAGNOSTICS_COLUMNS.join(",")) {
    throw new SchemaMismatch(`${path}: unexpected diagnostics header`);
  }
  const rows: DiagnosticsRow[] = [];
  for (const ln of lines.slice(2)) {
    const parts = ln.split(",");
    if (parts.length !== DIAGNOSTICS_COLUMNS.length) {
      throw new SchemaMismatch(`${path}: row has ${parts.length} columns`);
    }
    const row = {} as DiagnosticsRow;
    DIAGNOSTICS_COLUMNS.forEach((c, i) => {
      const v = Number(parts[i]);
      if (!Number.isFinite(v)) throw new SchemaMismatch(`${path}: bad float ${parts[i]}`);
      row[c] = v;
    });
    rows.push(row);
  }
  return { version: lines[0], rows };
}

export interface SymbolCurve {
  kappa: number[];
  sigma: number[];
}

export function parseSymbolCsv(path: string): SymbolCurve {
  const text = readFileSync(path, "utf-8");
  const lines = text.split("\n").filter((ln) => ln.length > 0);
  if (lines[0] !== "kappa,sigma") {
    throw new SchemaMismatch(`${path}: expected 'kappa,sigma' header`);
  }
  const kappa: number[] = [];
  const sigma: number[] = [];
  for (const ln of lines.slice(1)) {
    const [k, s] = ln.split(",").map(Number);
    if (!Number.isFinite(k) || !Number.isFinite(s)) {
      throw new SchemaMismatch(`${path}: bad row '${ln}'`);
    }
    kappa.push(k);
    sigma.push(s);
  }
  return { kappa, sigma };
}

/** 17-significant-digit serialization; lossless for binary64 round trips. */
export function formatFloat(x: number): string {
  return x.toExponential(16);
}

export function serializeDiagnosticsCsv(file: DiagnosticsFile): string {
  const out = [file.version, DIAGNOSTICS_COLUMNS.join(",")];
  for (const row of file.rows) {
    out.push(DIAGNOSTICS_COLUMNS.map((c) => formatFloat(row[c])).join(","));
  }
  return out.join("\n") + "\n";
}
