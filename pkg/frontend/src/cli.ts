#!/usr/bin/env node
/**
 * Figure renderer for simulator CSV artifacts.
 *
 * Usage: netopinion-plot <job.json> [more jobs...]
 *
 * Exit code 0 on success; on failure a JSON error object goes to stderr.
 */

import { loadJob } from "./job.js";
import { render } from "./render.js";

export function main(argv: string[]): number {
  if (argv.length === 0) {
    process.stderr.write(JSON.stringify({
      error: "UsageError", message: "usage: netopinion-plot <job.json> [...]",
    }) + "\n");
    return 1;
  }
  try {
    for (const path of argv) {
      const out = render(loadJob(path));
      process.stdout.write(`wrote ${out}\n`);
    }
    return 0;
  } catch (err) {
    const e = err as Error;
    process.stderr.write(JSON.stringify({
      error: e.constructor.name, message: e.message,
    }) + "\n");
    return 1;
  }
}

import { fileURLToPath } from "node:url";

if (process.argv[1] && fileURLToPath(import.meta.url) === process.argv[1]) {
  process.exit(main(process.argv.slice(2)));
}
