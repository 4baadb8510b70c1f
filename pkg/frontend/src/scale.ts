/** Linear and log axis scales with tick generation. */

export interface Scale {
  (v: number): number;
  ticks(): number[];
  domain: [number, number];
  range: [number, number];
  kind: "linear" | "log";
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}

export function linearScale(domain: [number, number], range: [number, number],
                            tickCount = 6): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  fn.kind = "linear";
  fn.ticks = () => {
    const step = niceStep(Math.abs(span), tickCount);
    const start = Math.ceil(d0 / step) * step;
    const out: number[] = [];
    for (let v = start; v <= d1 + 1e-9 * Math.abs(span); v += step) {
      out.push(Math.abs(v) < 1e-12 * Math.abs(span) ? 0 : v);
    }
    return out;
  };
  return fn;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new Error(`log scale needs a positive domain, got [${d0}, ${d1}]`);
  }
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const [r0, r1] = range;
  const span = l1 - l0 || 1;
  const fn = ((v: number) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  fn.kind = "log";
  fn.ticks = () => {
    const out: number[] = [];
    for (let e = Math.ceil(l0 - 1e-9); e <= Math.floor(l1 + 1e-9); e++) {
      out.push(Math.pow(10, e));
    }
    return out;
  };
  return fn;
}

/** Short deterministic label for a tick value. */
export function tickLabel(v: number, kind: "linear" | "log"): string {
  if (v === 0) return "0";
  if (kind === "log" || Math.abs(v) >= 1e4 || Math.abs(v) < 1e-3) {
    const e = Math.floor(Math.log10(Math.abs(v)) + 1e-9);
    const mant = v / Math.pow(10, e);
    const m = Math.abs(mant - 1) < 1e-9 ? "" : `${trimFloat(mant)}x`;
    return `${m}1e${e}`;
  }
  return trimFloat(v);
}

function trimFloat(v: number): string {
  const s = v.toPrecision(4);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) throw new Error("empty extent");
  return [lo, hi];
}

export function positiveExtent(values: number[]): [number, number] {
  const pos = values.filter((v) => v > 0);
  if (pos.length === 0) throw new Error("no positive values for log scale");
  return extent(pos);
}
