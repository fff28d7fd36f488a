import { readFileSync } from "fs";
import { z } from "zod";

import { PlotError } from "./csv.js";

export const plotSpecSchema = z.object({
  kind: z.enum(["path", "histogram", "band1d", "heatmap2d"]),
  input: z.union([z.string().min(1), z.array(z.string().min(1)).nonempty()]),
  output: z.string().min(1),
  title: z.string().optional(),
  coordinate: z.number().int().nonnegative().default(0),
  width: z.number().positive().default(640),
  // disabled by default so identical inputs produce identical bytes
  timestamps: z.boolean().default(false),
});

export type PlotSpec = z.infer<typeof plotSpecSchema>;

export function inputFiles(spec: PlotSpec): string[] {
  return typeof spec.input === "string" ? [spec.input] : spec.input;
}

export function loadSpecs(path: string): PlotSpec[] {
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new PlotError(`cannot read spec ${path}: ${(err as Error).message}`);
  }
  const items = Array.isArray(raw) ? raw : [raw];
  return items.map((item, i) => {
    const result = plotSpecSchema.safeParse(item);
    if (!result.success) {
      const issue = result.error.issues[0];
      throw new PlotError(`spec ${path}[${i}]: ${issue.path.join(".")}: ${issue.message}`);
    }
    return result.data;
  });
}
