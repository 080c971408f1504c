/** PNG heatmap rendering with a symmetric blue-white-red palette. */

import { PNG } from "pngjs";

/** field[i1*n + i2] -> pixel (x = i1, y = n-1-i2); value 0 maps to white,
 * extremes to saturated blue/red, symmetric about zero. */
export function encodeHeatmapPng(field: Float64Array, n: number): Buffer {
  const png = new PNG({ width: n, height: n, colorType: 6 });
  let vmax = 0;
  for (let i = 0; i < field.length; i++) {
    const a = Math.abs(field[i]);
    if (a > vmax) vmax = a;
  }
  if (vmax === 0) vmax = 1;
  for (let i1 = 0; i1 < n; i1++) {
    for (let i2 = 0; i2 < n; i2++) {
      const v = field[i1 * n + i2] / vmax; // in [-1, 1]
      const [r, g, b] = diverging(v);
      const px = i1;
      const py = n - 1 - i2;
      const idx = 4 * (py * n + px);
      png.data[idx] = r;
      png.data[idx + 1] = g;
      png.data[idx + 2] = b;
      png.data[idx + 3] = 255;
    }
  }
  return PNG.sync.write(png);
}

function diverging(v: number): [number, number, number] {
  const t = Math.max(-1, Math.min(1, v));
  if (t >= 0) {
    // white -> red
    const s = 1 - t;
    return [255, Math.round(255 * s), Math.round(255 * s)];
  }
  const s = 1 + t; // white -> blue
  return [Math.round(255 * s), Math.round(255 * s), 255];
}
