import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { PlotJob } from "./job.js";
import { degreeFamily, errorDecay, meanTrace, panelGrid, surface } from "./plots/kinds.js";

const RENDERERS: Record<PlotJob["kind"], (job: PlotJob) => string> = {
  degree_family: degreeFamily,
  surface,
  error_decay: errorDecay,
  panel_grid: panelGrid,
  mean_trace: meanTrace,
};

/** Produce the SVG text for a job (pure: same job and files, same bytes). */
export function renderToString(job: PlotJob): string {
  return RENDERERS[job.kind](job);
}

/** Render and write the job's output file; returns the output path. */
export function render(job: PlotJob): string {
  const svg = renderToString(job);
  mkdirSync(dirname(job.output), { recursive: true });
  writeFileSync(job.output, svg, "utf-8");
  return job.output;
}
