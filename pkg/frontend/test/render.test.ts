import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { PlotError } from "../src/csv.js";
import { render } from "../src/render.js";
import { main } from "../src/cli.js";
import { loadSpecs, plotSpecSchema } from "../src/spec.js";

const DATA = join(__dirname, "..", "testdata");

const read = (name: string) => readFileSync(join(DATA, name), "utf8");

const GOLDEN: Record<string, { kind: "path" | "histogram" | "band1d" | "heatmap2d"; file: string }> = {
  path: { kind: "path", file: "trajectory.csv" },
  histogram: { kind: "histogram", file: "table1_hist.csv" },
  band1d: { kind: "band1d", file: "class1d_lam10_eps0.01.csv" },
  heatmap2d: { kind: "heatmap2d", file: "class2d_stats.csv" },
};

function spec(kind: keyof typeof GOLDEN, overrides: Record<string, unknown> = {}) {
  return plotSpecSchema.parse({
    kind: GOLDEN[kind].kind,
    input: GOLDEN[kind].file,
    output: "out.svg",
    ...overrides,
  });
}

describe("render golden CSVs", () => {
  for (const kind of Object.keys(GOLDEN) as Array<keyof typeof GOLDEN>) {
    it(`renders ${kind} without error`, () => {
      const svg = render(spec(kind), read);
      expect(svg.startsWith("<svg ")).toBe(true);
      expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
      expect(svg).toContain("<rect");
    });

    it(`${kind} output is byte-stable`, () => {
      const first = render(spec(kind), read);
      const second = render(spec(kind), read);
      expect(second).toBe(first);
    });
  }

  it("path supports multiple inputs as stacked panels", () => {
    const multi = plotSpecSchema.parse({
      kind: "path",
      input: ["trajectory.csv", "lambda_path_2.5.csv"],
      output: "out.svg",
    });
    const svg = render(multi, read);
    expect(svg).toContain("trajectory.csv");
    expect(svg).toContain("lambda_path_2.5.csv");
  });

  it("path colors both regimes", () => {
    const svg = render(spec("path"), read);
    expect(svg).toContain("#2166ac");
    expect(svg).toContain("#d6604d");
  });

  it("histogram renders one panel per rate", () => {
    const svg = render(spec("histogram"), read);
    expect(svg).toContain("lambda = 0.25");
    expect(svg).toContain("lambda = 250");
  });

  it("band1d overlays truth and observation markers", () => {
    const svg = render(spec("band1d"), read);
    expect(svg).toContain("stroke-dasharray");
    expect(svg).toContain("<circle");
  });

  it("timestamps are off by default and opt-in", () => {
    expect(render(spec("path"), read)).not.toContain("generated");
    expect(render(spec("path", { timestamps: true }), read)).toContain("generated");
  });
});

describe("schema and data validation", () => {
  it("rejects unknown plot kinds", () => {
    expect(() => plotSpecSchema.parse({ kind: "pie", input: "x.csv", output: "o.svg" }))
      .toThrow();
  });

  it("rejects CSVs with missing columns", () => {
    const bad = (name: string) => "time,value\n0,1\n";
    expect(() => render(spec("path"), bad)).toThrow(PlotError);
    expect(() => render(spec("heatmap2d"), bad)).toThrow(PlotError);
  });

  it("rejects empty data", () => {
    expect(() => render(spec("band1d"), () => "time,index,mean,std,truth,observed\n"))
      .toThrow(PlotError);
  });

  it("rejects non-numeric cells", () => {
    expect(() =>
      render(spec("path"), () => "time,regime,x_0\n0,0,oops\n1,0,1\n"),
    ).toThrow(PlotError);
  });
});

describe("cli", () => {
  it("renders all four kinds from a spec list and is byte-stable on disk", () => {
    const dir = mkdtempSync(join(tmpdir(), "rsplot-"));
    const specs = Object.keys(GOLDEN).map((kind) => ({
      kind,
      input: join(DATA, GOLDEN[kind as keyof typeof GOLDEN].file),
      output: join(dir, `${kind}.svg`),
    }));
    const specPath = join(dir, "spec.json");
    writeFileSync(specPath, JSON.stringify(specs));
    expect(main([specPath])).toBe(0);
    const firstBytes = specs.map((s) => readFileSync(s.output));
    expect(main([specPath])).toBe(0);
    specs.forEach((s, i) => {
      expect(readFileSync(s.output).equals(firstBytes[i])).toBe(true);
      expect(firstBytes[i].length).toBeGreaterThan(500);
    });
  });

  it("exits 1 on a broken spec", () => {
    const dir = mkdtempSync(join(tmpdir(), "rsplot-"));
    const specPath = join(dir, "spec.json");
    writeFileSync(specPath, JSON.stringify({ kind: "path", output: "o.svg" }));
    expect(main([specPath])).toBe(1);
  });

  it("exits 1 on a missing input file", () => {
    const dir = mkdtempSync(join(tmpdir(), "rsplot-"));
    const specPath = join(dir, "spec.json");
    writeFileSync(
      specPath,
      JSON.stringify({ kind: "path", input: "absent.csv", output: join(dir, "o.svg") }),
    );
    expect(main([specPath])).toBe(1);
  });

  it("loadSpecs accepts a single object or an array", () => {
    const dir = mkdtempSync(join(tmpdir(), "rsplot-"));
    const single = join(dir, "one.json");
    writeFileSync(single, JSON.stringify({ kind: "path", input: "a.csv", output: "b.svg" }));
    expect(loadSpecs(single)).toHaveLength(1);
  });
});
