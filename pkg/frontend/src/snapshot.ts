/** Reader for the solver's binary field snapshots.
 *
 * Little-endian: 8-byte magic "GMHD2D\0\0", u32 version, u32 n,
 * u32 reserved, f64 time, then two row-major n*n f64 arrays (omega, j).
 */

import { readFileSync } from "node:fs";

export class CorruptSnapshot extends Error {}

const MAGIC = "GMHD2D\x00\x00";
const HEADER_BYTES = 28;

export interface Snapshot {
  time: number;
  n: number;
  /** omega[i1*n + i2], row-major real-space samples */
  omega: Float64Array;
  j: Float64Array;
}

export function readSnapshot(path: string): Snapshot {
  const buf = readFileSync(path);
  if (buf.length < HEADER_BYTES) {
    throw new CorruptSnapshot(`${path}: truncated header`);
  }
  if (buf.toString("latin1", 0, 8) !== MAGIC) {
    throw new CorruptSnapshot(`${path}: bad magic`);
  }
  const view = new DataView(buf.buffer, buf.byteOffset, buf.length);
  const version = view.getUint32(8, true);
  if (version !== 1) {
    throw new CorruptSnapshot(`${path}: unsupported version ${version}`);
  }
  const n = view.getUint32(12, true);
  const expected = HEADER_BYTES + 16 * n * n;
  if (buf.length !== expected) {
    throw new CorruptSnapshot(`${path}: size ${buf.length} != expected ${expected}`);
  }
  const time = view.getFloat64(20, true);
  const omega = new Float64Array(n * n);
  const j = new Float64Array(n * n);
  for (let i = 0; i < n * n; i++) {
    omega[i] = view.getFloat64(HEADER_BYTES + 8 * i, true);
    j[i] = view.getFloat64(HEADER_BYTES + 8 * (n * n + i), true);
  }
  return { time, n, omega, j };
}
