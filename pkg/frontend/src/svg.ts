/** Minimal deterministic SVG scene building: scales, axes, polylines.
 *
 * All numbers are formatted with fixed precision so identical inputs give
 * byte-identical files.
 */

export interface Scale {
  (x: number): number;
  domain: [number, number];
  range: [number, number];
  ticks(count: number): number[];
  log: boolean;
}

function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const s = x.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((x: number) => r0 + ((x - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  f.log = false;
  f.ticks = (count: number) => niceTicks(d0, d1, count);
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const d0 = Math.log10(domain[0]);
  const d1 = Math.log10(domain[1]);
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((x: number) => r0 + ((Math.log10(x) - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  f.log = true;
  f.ticks = () => {
    const out: number[] = [];
    for (let e = Math.ceil(d0); e <= Math.floor(d1); e++) out.push(10 ** e);
    return out.length >= 2 ? out : [domain[0], domain[1]];
  };
  return f;
}

function niceTicks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / Math.max(count, 1);
  const mag = 10 ** Math.floor(Math.log10(raw));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => (hi - lo) / s <= count) ?? raw;
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step) {
    out.push(Math.abs(v) < 1e-12 * step ? 0 : v);
  }
  return out;
}

function tickLabel(v: number, log: boolean): string {
  if (log) return v.toExponential(0);
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-2) return v.toExponential(1);
  return String(Math.round(v * 1000) / 1000);
}

export interface PlotArea {
  x: Scale;
  y: Scale;
  body: string[];
}

export class SvgDoc {
  readonly width: number;
  readonly height: number;
  private parts: string[] = [];

  constructor(width = 720, height = 480) {
    this.width = width;
    this.height = height;
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  text(x: number, y: number, s: string, opts = ""): void {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="Helvetica,Arial,sans-serif" ${opts}>${escapeXml(s)}</text>`,
    );
  }

  /** Axes box with ticks + labels; returns the plot area scales. */
  axes(
    xDomain: [number, number],
    yDomain: [number, number],
    opts: { xLog?: boolean; yLog?: boolean; xLabel?: string; yLabel?: string; title?: string },
  ): PlotArea {
    const m = { left: 76, right: 16, top: 36, bottom: 48 };
    const x = (opts.xLog ? logScale : linearScale)(xDomain, [m.left, this.width - m.right]);
    const y = (opts.yLog ? logScale : linearScale)(yDomain, [this.height - m.bottom, m.top]);
    const b: string[] = [];
    b.push(
      `<rect x="${fmt(m.left)}" y="${fmt(m.top)}" width="${fmt(this.width - m.left - m.right)}" height="${fmt(this.height - m.top - m.bottom)}" fill="none" stroke="black" stroke-width="1"/>`,
    );
    for (const v of x.ticks(8)) {
      const px = x(v);
      b.push(`<line x1="${fmt(px)}" y1="${fmt(this.height - m.bottom)}" x2="${fmt(px)}" y2="${fmt(this.height - m.bottom + 5)}" stroke="black"/>`);
      b.push(`<text x="${fmt(px)}" y="${fmt(this.height - m.bottom + 18)}" font-size="11" text-anchor="middle" font-family="Helvetica,Arial,sans-serif">${tickLabel(v, x.log)}</text>`);
    }
    for (const v of y.ticks(6)) {
      const py = y(v);
      b.push(`<line x1="${fmt(m.left - 5)}" y1="${fmt(py)}" x2="${fmt(m.left)}" y2="${fmt(py)}" stroke="black"/>`);
      b.push(`<text x="${fmt(m.left - 8)}" y="${fmt(py + 4)}" font-size="11" text-anchor="end" font-family="Helvetica,Arial,sans-serif">${tickLabel(v, y.log)}</text>`);
    }
    if (opts.xLabel) {
      b.push(`<text x="${fmt((m.left + this.width - m.right) / 2)}" y="${fmt(this.height - 10)}" font-size="13" text-anchor="middle" font-family="Helvetica,Arial,sans-serif">${escapeXml(opts.xLabel)}</text>`);
    }
    if (opts.yLabel) {
      const cx = 18;
      const cy = (m.top + this.height - m.bottom) / 2;
      b.push(`<text x="${fmt(cx)}" y="${fmt(cy)}" font-size="13" text-anchor="middle" transform="rotate(-90 ${fmt(cx)} ${fmt(cy)})" font-family="Helvetica,Arial,sans-serif">${escapeXml(opts.yLabel)}</text>`);
    }
    if (opts.title) {
      b.push(`<text x="${fmt(this.width / 2)}" y="${fmt(20)}" font-size="14" text-anchor="middle" font-family="Helvetica,Arial,sans-serif">${escapeXml(opts.title)}</text>`);
    }
    this.parts.push(...b);
    return { x, y, body: this.parts };
  }

  polyline(area: PlotArea, xs: number[], ys: number[], stroke: string, cls: string, dash = ""): void {
    if (xs.length === 0) return;
    const pts = xs.map((v, i) => `${fmt(area.x(v))},${fmt(area.y(ys[i]))}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(`<polyline class="${cls}" points="${pts}" fill="none" stroke="${stroke}" stroke-width="1.5"${dashAttr}/>`);
  }

  hline(area: PlotArea, yVal: number, stroke: string, cls: string, dash = "6,4"): void {
    const y = fmt(area.y(yVal));
    this.parts.push(`<line class="${cls}" x1="${fmt(area.x.range[0])}" y1="${y}" x2="${fmt(area.x.range[1])}" y2="${y}" stroke="${stroke}" stroke-width="1.2" stroke-dasharray="${dash}"/>`);
  }

  legend(entries: Array<[string, string]>, x: number, y: number): void {
    entries.forEach(([label, color], i) => {
      const yy = y + 16 * i;
      this.parts.push(`<line x1="${fmt(x)}" y1="${fmt(yy - 4)}" x2="${fmt(x + 22)}" y2="${fmt(yy - 4)}" stroke="${color}" stroke-width="2"/>`);
      this.text(x + 28, yy, label, 'font-size="12"');
    });
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">`,
      `<rect width="${this.width}" height="${this.height}" fill="white"/>`,
      ...this.parts,
      "</svg>",
      "",
    ].join("\n");
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Ordinary least squares slope of y against x. */
export function leastSquaresSlope(x: number[], y: number[]): number {
  const n = x.length;
  const mx = x.reduce((a, b) => a + b, 0) / n;
  const my = y.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) ** 2;
  }
  return num / den;
}
