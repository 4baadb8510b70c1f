/**
 * Parsers for the simulator's documented CSV artifacts.
 *
 * Schemas (headers are exact):
 *   snapshot_t*.csv      w,c,f           row-major over (node, level)
 *   *_g.csv              w,g
 *   *_rho.csv            c,rho
 *   diagnostics.csv      t,mass,gamma,mean_opinion,l1_error  (l1 may be empty)
 */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {}

export interface SnapshotField {
  w: number[]; // distinct node positions, ascending
  c: number[]; // distinct connectivity levels, ascending
  values: number[][]; // values[i][j] = f(w[i], c[j])
}

export interface Series {
  x: number[];
  y: number[];
}

export interface Diagnostics {
  t: number[];
  mass: number[];
  gamma: number[];
  meanOpinion: number[];
  l1Error: (number | null)[];
}

function readTable(path: string, expectedHeader: string[]): string[][] {
  const text = readFileSync(path, "utf-8").trim();
  const lines = text.split(/\r?\n/);
  if (lines.length < 2) {
    throw new SchemaError(`${path}: empty table`);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  if (header.length !== expectedHeader.length ||
      !expectedHeader.every((h, i) => header[i] === h)) {
    throw new SchemaError(
      `${path}: header [${header.join(",")}] does not match expected ` +
      `[${expectedHeader.join(",")}]`);
  }
  return lines.slice(1).map((line, k) => {
    const cells = line.split(",");
    if (cells.length !== expectedHeader.length) {
      throw new SchemaError(`${path}:${k + 2}: expected ${expectedHeader.length} columns`);
    }
    return cells;
  });
}

function num(path: string, row: number, cell: string): number {
  const v = Number(cell);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`${path}:${row}: non-numeric value ${JSON.stringify(cell)}`);
  }
  return v;
}

/** Full (w, c, f) snapshot reshaped to a dense grid. */
export function readSnapshot(path: string): SnapshotField {
  const rows = readTable(path, ["w", "c", "f"]);
  const wSet: number[] = [];
  const cSet: number[] = [];
  for (const [ws, cs] of rows) {
    const w = Number(ws);
    const c = Number(cs);
    if (wSet.length === 0 || wSet[wSet.length - 1] !== w) wSet.push(w);
    if (wSet.length === 1) cSet.push(c);
  }
  const nW = wSet.length;
  const nC = cSet.length;
  if (nW * nC !== rows.length) {
    throw new SchemaError(`${path}: ${rows.length} rows do not form a ${nW} x ${nC} grid`);
  }
  const values: number[][] = [];
  for (let i = 0; i < nW; i++) {
    const rowVals: number[] = [];
    for (let j = 0; j < nC; j++) {
      const r = rows[i * nC + j];
      if (Number(r[0]) !== wSet[i] || Number(r[1]) !== cSet[j]) {
        throw new SchemaError(`${path}: rows are not row-major over (w, c)`);
      }
      rowVals.push(num(path, i * nC + j + 2, r[2]));
    }
    values.push(rowVals);
  }
  return { w: wSet, c: cSet, values };
}

export function readSeries(path: string, xName: string, yName: string): Series {
  const rows = readTable(path, [xName, yName]);
  return {
    x: rows.map((r, k) => num(path, k + 2, r[0])),
    y: rows.map((r, k) => num(path, k + 2, r[1])),
  };
}

export function readDegreeMarginal(path: string): Series {
  return readSeries(path, "c", "rho");
}

export function readOpinionMarginal(path: string): Series {
  return readSeries(path, "w", "g");
}

export function readDiagnostics(path: string): Diagnostics {
  const rows = readTable(path, ["t", "mass", "gamma", "mean_opinion", "l1_error"]);
  return {
    t: rows.map((r, k) => num(path, k + 2, r[0])),
    mass: rows.map((r, k) => num(path, k + 2, r[1])),
    gamma: rows.map((r, k) => num(path, k + 2, r[2])),
    meanOpinion: rows.map((r, k) => num(path, k + 2, r[3])),
    l1Error: rows.map((r, k) =>
      r[4].trim() === "" ? null : num(path, k + 2, r[4])),
  };
}
