#!/usr/bin/env node
/**
 * randsplit-plot <spec.json>
 *
 * Renders randsplit CSV artifacts to SVG.  The spec file holds one plot
 * object or an array of them; see README for the schema.  Exits 1 on schema
 * mismatches, missing columns, or empty data.
 */

import { readFileSync, writeFileSync } from "fs";
import { dirname, isAbsolute, join } from "path";

import { PlotError } from "./csv.js";
import { render } from "./render.js";
import { loadSpecs } from "./spec.js";

export function main(argv: string[]): number {
  if (argv.length !== 1 || argv[0] === "--help" || argv[0] === "-h") {
    console.error("usage: randsplit-plot <spec.json>");
    return argv.length === 1 ? 0 : 1;
  }
  const specPath = argv[0];
  const baseDir = dirname(specPath);
  const resolve = (p: string) => (isAbsolute(p) ? p : join(baseDir, p));
  try {
    for (const spec of loadSpecs(specPath)) {
      const svg = render(spec, (file) => readFileSync(resolve(file), "utf8"));
      writeFileSync(resolve(spec.output), svg);
      console.log(resolve(spec.output));
    }
  } catch (err) {
    if (err instanceof PlotError) {
      console.error(`randsplit-plot: ${err.message}`);
      return 1;
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`randsplit-plot: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
  return 0;
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js") || process.argv[1]?.endsWith("randsplit-plot");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
