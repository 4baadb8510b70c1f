/** The five figure kinds, each a pure function of parsed inputs. */

import { readDegreeMarginal, readDiagnostics, readSnapshot, SchemaError } from "../csv.js";
import { PlotJob } from "../job.js";
import { extent, linearScale, logScale, positiveExtent } from "../scale.js";
import { SERIES_COLORS, axes, document as svgDocument, legend, polyline } from "../svg.js";
import { heatPanel } from "./heatmap.js";

const W = 560;
const H = 420;
const M = { left: 70, right: 25, top: 40, bottom: 55 };

function label(job: PlotJob, i: number): string {
  return job.inputs[i].label ?? job.inputs[i].path;
}

/** Degree-law families on log-log axes with an optional power-law guide. */
export function degreeFamily(job: PlotJob): string {
  const curves = job.inputs.map((inp) => readDegreeMarginal(inp.path));
  const allC = curves.flatMap((s) => s.x.filter((v) => v > 0));
  const allR = curves.flatMap((s) => s.y.filter((v) => v > 0));
  const x = logScale(extent(allC), [M.left, W - M.right]);
  const [rLo, rHi] = positiveExtent(allR);
  const y = logScale([Math.max(rLo, rHi * 1e-8), rHi], [H - M.bottom, M.top]);

  const parts: string[] = [];
  parts.push(axes({
    x, y, xLabel: job.options.xLabel ?? "connections c",
    yLabel: job.options.yLabel ?? "degree density",
    title: job.options.title ?? "stationary degree laws",
  }));
  curves.forEach((s, i) => {
    const pts = s.x.map((v, k) => [v, s.y[k]] as const)
      .filter(([cv, rv]) => cv > 0 && rv >= y.domain[0]);
    parts.push(polyline(pts.map(([cv]) => x(cv)), pts.map(([, rv]) => y(rv)),
                        SERIES_COLORS[i % SERIES_COLORS.length]));
  });
  const slope = job.options.referenceSlope;
  if (slope !== undefined) {
    const [c0, c1] = x.domain;
    const anchor = rHi;
    const r1 = anchor * Math.pow(c1 / c0, slope);
    parts.push(polyline([x(c0), x(c1)], [y(anchor), y(Math.max(r1, y.domain[0]))],
                        "#555", 1, "5,4"));
  }
  parts.push(legend(M.left + 12, M.top + 16, job.inputs.map((inp, i) => ({
    label: inp.label ?? inp.path,
    color: SERIES_COLORS[i % SERIES_COLORS.length],
  })).concat(slope !== undefined
    ? [{ label: `slope ${slope}`, color: "#555" }] : [])));
  return svgDocument(W, H, parts.join("\n"));
}

/** Single density surface as a heatmap. */
export function surface(job: PlotJob): string {
  if (job.inputs.length !== 1) {
    throw new SchemaError("surface takes exactly one snapshot input");
  }
  const field = readSnapshot(job.inputs[0].path);
  const panel = heatPanel(field,
    { px0: M.left, px1: W - M.right, py0: H - M.bottom, py1: M.top },
    (v) => v, job.options.title ?? label(job, 0));
  return svgDocument(W, H, panel.body);
}

/** L1-error decay on a semilog-y axis, one curve per diagnostics file. */
export function errorDecay(job: PlotJob): string {
  const series = job.inputs.map((inp, i) => {
    const d = readDiagnostics(inp.path);
    const pts = d.t.map((tv, k) => [tv, d.l1Error[k]] as const)
      .filter((p): p is readonly [number, number] => p[1] !== null && p[1] > 0);
    if (pts.length < 2) {
      throw new SchemaError(`${inp.path}: no positive error values to plot (input ${i})`);
    }
    return pts;
  });
  const x = linearScale(extent(series.flatMap((s) => s.map((p) => p[0]))),
                        [M.left, W - M.right]);
  const y = logScale(positiveExtent(series.flatMap((s) => s.map((p) => p[1]))),
                     [H - M.bottom, M.top]);
  const parts: string[] = [];
  parts.push(axes({
    x, y, xLabel: job.options.xLabel ?? "time t",
    yLabel: job.options.yLabel ?? "relative L1 error",
    title: job.options.title ?? "error decay",
  }));
  series.forEach((pts, i) => {
    parts.push(polyline(pts.map((p) => x(p[0])), pts.map((p) => y(p[1])),
                        SERIES_COLORS[i % SERIES_COLORS.length]));
  });
  parts.push(legend(W - M.right - 170, M.top + 16, job.inputs.map((inp, i) => ({
    label: inp.label ?? inp.path,
    color: SERIES_COLORS[i % SERIES_COLORS.length],
  }))));
  return svgDocument(W, H, parts.join("\n"));
}

/** Grid of snapshot heatmaps in log-offset scale, shared color range. */
export function panelGrid(job: PlotJob): string {
  const offset = job.options.logOffset ?? 0.001;
  const fields = job.inputs.map((inp) => readSnapshot(inp.path));
  const transform = (v: number) => Math.log10(v + offset);
  let lo = Infinity;
  let hi = -Infinity;
  for (const f of fields) {
    for (const row of f.values) {
      for (const v of row) {
        const t = transform(v);
        if (t < lo) lo = t;
        if (t > hi) hi = t;
      }
    }
  }
  const cols = Math.ceil(Math.sqrt(fields.length));
  const rows = Math.ceil(fields.length / cols);
  const panelW = 360;
  const panelH = 300;
  const width = cols * panelW + M.left;
  const height = rows * panelH + M.top;
  const parts: string[] = [];
  fields.forEach((field, k) => {
    const ci = k % cols;
    const ri = Math.floor(k / cols);
    const px0 = M.left + ci * panelW;
    const py1 = M.top + ri * panelH;
    const panel = heatPanel(field, {
      px0, px1: px0 + panelW - 60, py0: py1 + panelH - 60, py1,
    }, transform, label(job, k), [lo, hi]);
    parts.push(panel.body);
  });
  return svgDocument(width, height, parts.join("\n"));
}

/** Mean-opinion traces over time. */
export function meanTrace(job: PlotJob): string {
  const series = job.inputs.map((inp) => {
    const d = readDiagnostics(inp.path);
    return { t: d.t, m: d.meanOpinion };
  });
  const x = linearScale(extent(series.flatMap((s) => s.t)), [M.left, W - M.right]);
  const y = linearScale([-1, 1], [H - M.bottom, M.top]);
  const parts: string[] = [];
  parts.push(axes({
    x, y, xLabel: job.options.xLabel ?? "time t",
    yLabel: job.options.yLabel ?? "mean opinion",
    title: job.options.title ?? "mean opinion trace",
  }));
  parts.push(polyline([x(x.domain[0]), x(x.domain[1])], [y(0), y(0)], "#999", 0.8, "2,3"));
  series.forEach((s, i) => {
    parts.push(polyline(s.t.map((v) => x(v)), s.m.map((v) => y(v)),
                        SERIES_COLORS[i % SERIES_COLORS.length]));
  });
  parts.push(legend(W - M.right - 170, M.top + 16, job.inputs.map((inp, i) => ({
    label: inp.label ?? inp.path,
    color: SERIES_COLORS[i % SERIES_COLORS.length],
  }))));
  return svgDocument(W, H, parts.join("\n"));
}
