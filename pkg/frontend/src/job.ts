/**
 * Plot job description, read from a JSON file.
 *
 * {
 *   "kind": "degree_family" | "surface" | "error_decay" | "panel_grid" | "mean_trace",
 *   "inputs": [{ "path": "rho.csv", "label": "alpha = 0.1" }, ...],
 *   "output": "figure.svg",
 *   "options": {
 *     "title": "...",
 *     "logOffset": 0.001,        // panel_grid: plotted value is log10(f + offset)
 *     "referenceSlope": -1,      // degree_family: power-law guide line
 *     "xLabel": "...", "yLabel": "..."
 *   }
 * }
 *
 * Input schemas by kind:
 *   degree_family  c,rho files (one curve per input)
 *   surface        one snapshot w,c,f file
 *   error_decay    diagnostics files (t,mass,gamma,mean_opinion,l1_error)
 *   panel_grid     2+ snapshot w,c,f files, one panel each
 *   mean_trace     diagnostics files, mean_opinion column
 */

import { readFileSync } from "node:fs";

export const PLOT_KINDS = [
  "degree_family", "surface", "error_decay", "panel_grid", "mean_trace",
] as const;

export type PlotKind = (typeof PLOT_KINDS)[number];

export interface PlotInput {
  path: string;
  label?: string;
}

export interface PlotOptions {
  title?: string;
  logOffset?: number;
  referenceSlope?: number;
  xLabel?: string;
  yLabel?: string;
}

export interface PlotJob {
  kind: PlotKind;
  inputs: PlotInput[];
  output: string;
  options: PlotOptions;
}

export class JobError extends Error {}

export function parseJob(raw: unknown): PlotJob {
  if (typeof raw !== "object" || raw === null) {
    throw new JobError("job must be a JSON object");
  }
  const obj = raw as Record<string, unknown>;
  const kind = obj.kind;
  if (typeof kind !== "string" || !PLOT_KINDS.includes(kind as PlotKind)) {
    throw new JobError(`kind must be one of ${PLOT_KINDS.join(", ")}, got ${JSON.stringify(kind)}`);
  }
  if (!Array.isArray(obj.inputs) || obj.inputs.length === 0) {
    throw new JobError("inputs must be a non-empty array");
  }
  const inputs: PlotInput[] = obj.inputs.map((entry, i) => {
    if (typeof entry !== "object" || entry === null ||
        typeof (entry as Record<string, unknown>).path !== "string") {
      throw new JobError(`inputs[${i}] must be an object with a string path`);
    }
    const e = entry as Record<string, unknown>;
    if (e.label !== undefined && typeof e.label !== "string") {
      throw new JobError(`inputs[${i}].label must be a string`);
    }
    return { path: e.path as string, label: e.label as string | undefined };
  });
  if (typeof obj.output !== "string" || obj.output === "") {
    throw new JobError("output must be a non-empty string path");
  }
  const optRaw = (obj.options ?? {}) as Record<string, unknown>;
  if (typeof optRaw !== "object" || optRaw === null) {
    throw new JobError("options must be an object");
  }
  const options: PlotOptions = {};
  for (const key of ["title", "xLabel", "yLabel"] as const) {
    if (optRaw[key] !== undefined) {
      if (typeof optRaw[key] !== "string") throw new JobError(`options.${key} must be a string`);
      options[key] = optRaw[key] as string;
    }
  }
  for (const key of ["logOffset", "referenceSlope"] as const) {
    if (optRaw[key] !== undefined) {
      if (typeof optRaw[key] !== "number" || !Number.isFinite(optRaw[key] as number)) {
        throw new JobError(`options.${key} must be a finite number`);
      }
      options[key] = optRaw[key] as number;
    }
  }
  const known = new Set(["kind", "inputs", "output", "options"]);
  for (const key of Object.keys(obj)) {
    if (!known.has(key)) throw new JobError(`unknown job key ${JSON.stringify(key)}`);
  }
  const knownOpts = new Set(["title", "logOffset", "referenceSlope", "xLabel", "yLabel"]);
  for (const key of Object.keys(optRaw)) {
    if (!knownOpts.has(key)) throw new JobError(`unknown option ${JSON.stringify(key)}`);
  }
  return { kind: kind as PlotKind, inputs, output: obj.output, options };
}

export function loadJob(path: string): PlotJob {
  let parsed: unknown;
  try {
    parsed = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new JobError(`${path}: ${(err as Error).message}`);
  }
  return parseJob(parsed);
}
