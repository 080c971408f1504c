/** Figure kinds: energy ledger, sup-norm/BKM traces, symbol comparison,
 * field heatmaps.  SVG output is byte-deterministic; heatmaps are PNG. */

import { basename } from "node:path";
import { writeFileSync } from "node:fs";

import { parseDiagnosticsCsv, parseSymbolCsv, DiagnosticsRow } from "./csv.js";
import { readSnapshot } from "./snapshot.js";
import { SvgDoc, leastSquaresSlope } from "./svg.js";
import { encodeHeatmapPng } from "./png.js";

export const FIGURE_KINDS = ["ledger", "supnorm", "symbol_compare", "heatmap"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  /** heatmap only: which field to render */
  field?: "omega" | "j";
}

export class UnknownFigureKind extends Error {}

const COLORS = ["#1965b0", "#dc050c", "#4eb265", "#f7a600", "#882e72", "#777777"];

export function makeFigure(spec: FigureSpec): void {
  switch (spec.kind) {
    case "ledger":
      return writeFileSync(spec.output, ledgerFigure(spec.inputs));
    case "supnorm":
      return writeFileSync(spec.output, supnormFigure(spec.inputs));
    case "symbol_compare":
      return writeFileSync(spec.output, symbolCompareFigure(spec.inputs));
    case "heatmap":
      return writeFileSync(spec.output, heatmapFigure(spec.inputs, spec.field ?? "omega"));
    default:
      throw new UnknownFigureKind(`unknown figure kind '${(spec as FigureSpec).kind}'`);
  }
}

function domainOf(vals: number[], padFrac = 0.05): [number, number] {
  if (vals.length === 0) return [0, 1];
  let lo = Math.min(...vals);
  let hi = Math.max(...vals);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = (hi - lo) * padFrac;
  return [lo - pad, hi + pad];
}

/** Energy ledger: E(t) and E(t) + cumulative dissipation against the E(0)
 * reference line.  The ledger curve staying at/below the reference is the
 * energy-inequality visual. */
export function ledgerFigure(inputs: string[]): string {
  const file = parseDiagnosticsCsv(inputs[0]);
  const rows = file.rows;
  const doc = new SvgDoc();
  const t = rows.map((r) => r.t);
  const energy = rows.map((r) => r.energy_u + r.energy_b);
  const ledger = rows.map((r) => r.energy_u + r.energy_b + r.diss_u_cum + r.diss_b_cum);
  const e0 = rows.length ? energy[0] : 0;
  const area = doc.axes(
    domainOf(t.length ? t : [0, 1], 0),
    domainOf(rows.length ? [0, Math.max(e0 * 1.08, ...ledger)] : [0, 1], 0),
    { xLabel: "t", yLabel: "energy", title: `energy ledger (${basename(inputs[0])})` },
  );
  if (rows.length) {
    doc.hline(area, e0, "#444444", "e0-ref");
    doc.polyline(area, t, energy, COLORS[0], "energy");
    doc.polyline(area, t, ledger, COLORS[1], "ledger");
    doc.legend(
      [
        ["E(t)", COLORS[0]],
        ["E(t) + dissipation", COLORS[1]],
        ["E(0) reference", "#444444"],
      ],
      96,
      56,
    );
  }
  return doc.render();
}

/** Sup-norm of omega and the accumulated BKM integral over time. */
export function supnormFigure(inputs: string[]): string {
  const rows = parseDiagnosticsCsv(inputs[0]).rows;
  const doc = new SvgDoc(720, 560);
  const t = rows.map((r) => r.t);
  // top panel: ||omega||_inf
  const top = new SvgDoc(720, 280);
  const areaTop = top.axes(domainOf(t.length ? t : [0, 1], 0),
    domainOf(rows.map((r) => r.lp_omega_inf), 0.08),
    { yLabel: "sup |omega|", title: `sup-norm and BKM trace (${basename(inputs[0])})` });
  top.polyline(areaTop, t, rows.map((r) => r.lp_omega_inf), COLORS[0], "supnorm");
  // bottom panel: BKM integral
  const bot = new SvgDoc(720, 280);
  const areaBot = bot.axes(domainOf(t.length ? t : [0, 1], 0),
    domainOf(rows.map((r) => r.bkm_integral), 0.08),
    { xLabel: "t", yLabel: "BKM integral" });
  bot.polyline(areaBot, t, rows.map((r) => r.bkm_integral), COLORS[1], "bkm");
  doc.raw(`<g transform="translate(0 0)">` + top.render().split("\n").slice(1, -2).join("\n") + "</g>");
  doc.raw(`<g transform="translate(0 280)">` + bot.render().split("\n").slice(1, -2).join("\n") + "</g>");
  return doc.render();
}

export interface SlopeFit {
  file: string;
  slope: number;
}

/** Least-squares log-log slopes over kappa >= 1; for power-law kernels the
 * slope recovers the exponent 2*alpha. */
export function fitSymbolSlopes(inputs: string[]): SlopeFit[] {
  return inputs.map((path) => {
    const { kappa, sigma } = parseSymbolCsv(path);
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < kappa.length; i++) {
      if (kappa[i] >= 1 && sigma[i] > 0) {
        xs.push(Math.log(kappa[i]));
        ys.push(Math.log(sigma[i]));
      }
    }
    return { file: path, slope: leastSquaresSlope(xs, ys) };
  });
}

export function symbolCompareFigure(inputs: string[]): string {
  const curves = inputs.map(parseSymbolCsv);
  const fits = fitSymbolSlopes(inputs);
  const doc = new SvgDoc();
  const kmax = Math.max(...curves.map((c) => Math.max(...c.kappa)), 2);
  const smin = Math.min(...curves.map((c) => Math.min(...c.sigma.filter((s) => s > 0))));
  const smax = Math.max(...curves.map((c) => Math.max(...c.sigma)));
  const area = doc.axes([1, kmax], [smin / 1.5, smax * 1.5], {
    xLog: true,
    yLog: true,
    xLabel: "kappa",
    yLabel: "sigma(kappa)",
    title: "dissipation symbols (log-log)",
  });
  curves.forEach((c, i) => {
    const xs: number[] = [];
    const ys: number[] = [];
    for (let k = 0; k < c.kappa.length; k++) {
      if (c.kappa[k] >= 1 && c.sigma[k] > 0) {
        xs.push(c.kappa[k]);
        ys.push(c.sigma[k]);
      }
    }
    doc.polyline(area, xs, ys, COLORS[i % COLORS.length], `symbol-${i}`);
  });
  doc.legend(
    fits.map((f, i) => [
      `${basename(f.file)} (slope ${f.slope.toFixed(4)})`,
      COLORS[i % COLORS.length],
    ]),
    96,
    56,
  );
  return doc.render();
}

export function heatmapFigure(inputs: string[], field: "omega" | "j"): Buffer {
  const snap = readSnapshot(inputs[0]);
  const data = field === "omega" ? snap.omega : snap.j;
  return encodeHeatmapPng(data, snap.n);
}

export { DiagnosticsRow };
