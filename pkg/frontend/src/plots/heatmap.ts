/** Shared heatmap panel used by the surface and panel-grid figures. */

import { colormap, quantize } from "../color.js";
import { SnapshotField } from "../csv.js";
import { Scale, linearScale } from "../scale.js";
import { axes, el, fmt } from "../svg.js";

export interface HeatPanel {
  body: string;
  lo: number;
  hi: number;
}

/**
 * Render field values into the pixel box [px0, px1] x [py0, py1] (py0 is the
 * bottom edge).  ``transform`` maps a raw density value to the plotted one;
 * with run-length merging along the connectivity axis equal quantized
 * colors collapse into single rects.
 */
export function heatPanel(field: SnapshotField,
                          box: { px0: number; px1: number; py0: number; py1: number },
                          transform: (v: number) => number,
                          title: string,
                          fixedRange?: [number, number]): HeatPanel {
  const nW = field.w.length;
  const nC = field.c.length;
  let lo = Infinity;
  let hi = -Infinity;
  const vals: number[][] = field.values.map((row) => row.map((v) => {
    const t = transform(v);
    if (t < lo) lo = t;
    if (t > hi) hi = t;
    return t;
  }));
  if (fixedRange) [lo, hi] = fixedRange;
  const span = hi - lo || 1;

  const x: Scale = linearScale([field.w[0], field.w[nW - 1]], [box.px0, box.px1]);
  const y: Scale = linearScale([field.c[0], field.c[nC - 1]], [box.py0, box.py1]);
  const cellW = (box.px1 - box.px0) / (nW - 1 || 1);
  const cellH = (box.py1 - box.py0) / (nC - 1 || 1); // negative (y up)

  const parts: string[] = [];
  for (let i = 0; i < nW; i++) {
    let runStart = 0;
    let runLevel = quantize((vals[i][0] - lo) / span);
    const flush = (endJ: number) => {
      const yTop = y(field.c[endJ - 1]) + cellH / 2;
      const yBot = y(field.c[runStart]) - cellH / 2;
      parts.push(el("rect", {
        x: fmt(x(field.w[i]) - cellW / 2),
        y: fmt(Math.min(yTop, yBot)),
        width: fmt(Math.abs(cellW)),
        height: fmt(Math.abs(yBot - yTop)),
        fill: colormap(runLevel / 63),
      }));
    };
    for (let j = 1; j < nC; j++) {
      const level = quantize((vals[i][j] - lo) / span);
      if (level !== runLevel) {
        flush(j);
        runStart = j;
        runLevel = level;
      }
    }
    flush(nC);
  }
  parts.push(axes({ x, y, xLabel: "opinion w", yLabel: "connections c", title }));
  return { body: parts.join("\n"), lo, hi };
}
