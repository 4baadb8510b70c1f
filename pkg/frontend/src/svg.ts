/** Deterministic SVG assembly: plain string building, no ids, no timestamps. */

import { Scale, tickLabel } from "./scale.js";

export const SERIES_COLORS = [
  "#1f5fa8", "#d1342b", "#2c8a43", "#8237b0", "#d9860f", "#11808a",
];

export function fmt(v: number): string {
  // fixed short form keeps files small and byte-stable
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate ${v}`);
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export function el(tag: string, attrs: Record<string, string | number>,
                   body = ""): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join("");
  return body === "" ? `<${tag}${a}/>` : `<${tag}${a}>${body}</${tag}>`;
}

export function text(x: number, y: number, body: string,
                     attrs: Record<string, string | number> = {}): string {
  return el("text", {
    x: fmt(x), y: fmt(y), "font-family": "Helvetica,Arial,sans-serif",
    "font-size": 11, fill: "#222", ...attrs,
  }, escapeText(body));
}

export function escapeText(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function polyline(xs: number[], ys: number[], color: string,
                         width = 1.5, dash = ""): string {
  const pts = xs.map((x, i) => `${fmt(x)},${fmt(ys[i])}`).join(" ");
  const attrs: Record<string, string | number> = {
    points: pts, fill: "none", stroke: color, "stroke-width": width,
  };
  if (dash) attrs["stroke-dasharray"] = dash;
  return el("polyline", attrs);
}

export interface AxesOptions {
  x: Scale;
  y: Scale;
  xLabel: string;
  yLabel: string;
  title?: string;
}

/** Frame, ticks, grid lines and labels for one panel. */
export function axes(o: AxesOptions): string {
  const [x0, x1] = o.x.range;
  const [y0, y1] = o.y.range; // y0 is bottom (larger pixel value)
  const parts: string[] = [];
  parts.push(el("rect", {
    x: fmt(Math.min(x0, x1)), y: fmt(Math.min(y0, y1)),
    width: fmt(Math.abs(x1 - x0)), height: fmt(Math.abs(y0 - y1)),
    fill: "none", stroke: "#333", "stroke-width": 1,
  }));
  for (const v of o.x.ticks()) {
    const px = o.x(v);
    parts.push(el("line", {
      x1: fmt(px), y1: fmt(y0), x2: fmt(px), y2: fmt(y0 + 4),
      stroke: "#333", "stroke-width": 1,
    }));
    parts.push(el("line", {
      x1: fmt(px), y1: fmt(y0), x2: fmt(px), y2: fmt(y1),
      stroke: "#ddd", "stroke-width": 0.5,
    }));
    parts.push(text(px, y0 + 15, tickLabel(v, o.x.kind),
                    { "text-anchor": "middle" }));
  }
  for (const v of o.y.ticks()) {
    const py = o.y(v);
    parts.push(el("line", {
      x1: fmt(x0), y1: fmt(py), x2: fmt(x0 - 4), y2: fmt(py),
      stroke: "#333", "stroke-width": 1,
    }));
    parts.push(el("line", {
      x1: fmt(x0), y1: fmt(py), x2: fmt(x1), y2: fmt(py),
      stroke: "#ddd", "stroke-width": 0.5,
    }));
    parts.push(text(x0 - 7, py + 3.5, tickLabel(v, o.y.kind),
                    { "text-anchor": "end" }));
  }
  const xc = (x0 + x1) / 2;
  parts.push(text(xc, y0 + 32, o.xLabel, { "text-anchor": "middle" }));
  parts.push(el("g", { transform: `translate(${fmt(Math.min(x0, x1) - 40)},${fmt((y0 + y1) / 2)}) rotate(-90)` },
                 text(0, 0, o.yLabel, { "text-anchor": "middle" })));
  if (o.title) {
    parts.push(text(xc, Math.min(y0, y1) - 8, o.title,
                    { "text-anchor": "middle", "font-size": 13 }));
  }
  return parts.join("\n");
}

export function legend(x: number, y: number,
                       entries: { label: string; color: string }[]): string {
  const parts: string[] = [];
  entries.forEach((e, i) => {
    const yy = y + 16 * i;
    parts.push(el("line", {
      x1: fmt(x), y1: fmt(yy - 4), x2: fmt(x + 18), y2: fmt(yy - 4),
      stroke: e.color, "stroke-width": 2,
    }));
    parts.push(text(x + 24, yy, e.label));
  });
  return parts.join("\n");
}

export function document(width: number, height: number, body: string): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">\n` +
    el("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }) + "\n" +
    body + "\n</svg>\n";
}
