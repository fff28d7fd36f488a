import { basename } from "path";

import { distinct, numeric, parseCsv, PlotError, requireColumns, Table } from "./csv.js";
import { inputFiles, PlotSpec } from "./spec.js";
import { divergingColor, frame, sequentialColor, Svg, tickLabel } from "./svg.js";

const REGIME_COLORS = ["#2166ac", "#d6604d"]; // linear/data flow, thresholding flow

interface NamedTable extends Table {
  source: string;
}

function pad(values: number[], fraction = 0.08): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const margin = (hi - lo) * fraction;
  return [lo - margin, hi + margin];
}

export function render(spec: PlotSpec, readInput: (path: string) => string): string {
  const tables: NamedTable[] = inputFiles(spec).map((file) => ({
    ...parseCsv(readInput(file), basename(file)),
    source: basename(file),
  }));
  switch (spec.kind) {
    case "path":
      return renderPath(spec, tables);
    case "histogram":
      return renderHistogram(spec, tables[0]);
    case "band1d":
      return renderBand1d(spec, tables[0]);
    case "heatmap2d":
      return renderHeatmap2d(spec, tables[0]);
  }
}

function finishOptionalTimestamp(svg: Svg, spec: PlotSpec): string {
  if (spec.timestamps) {
    svg.comment(`generated ${new Date().toISOString()}`);
  }
  return svg.render();
}

/** One panel per input trajectory, line segments colored by active regime. */
function renderPath(spec: PlotSpec, tables: NamedTable[]): string {
  const column = `x_${spec.coordinate}`;
  const panelHeight = 180;
  const svg = new Svg(spec.width, panelHeight * tables.length + 8);
  tables.forEach((table, index) => {
    requireColumns(table, ["time", "regime", column], table.source);
    const time = numeric(table, "time", table.source);
    const regime = numeric(table, "regime", table.source);
    const value = numeric(table, column, table.source);
    const fr = frame(
      svg,
      { left: 0, top: index * panelHeight + 4, width: spec.width, height: panelHeight },
      [time[0], time[time.length - 1]],
      pad(value),
      {
        title: spec.title ? `${spec.title} — ${table.source}` : table.source,
        xLabel: index === tables.length - 1 ? "time" : undefined,
      },
    );
    let run: Array<[number, number]> = [[fr.x(time[0]), fr.y(value[0])]];
    let current = regime[0];
    for (let i = 1; i < time.length; i++) {
      run.push([fr.x(time[i]), fr.y(value[i])]);
      const next = i + 1 < time.length ? regime[i + 1] : current;
      if (next !== current || i === time.length - 1) {
        svg.polyline(run, `stroke="${REGIME_COLORS[current] ?? "#333"}" stroke-width="1.4"`);
        run = [[fr.x(time[i]), fr.y(value[i])]];
        current = next;
      }
    }
  });
  return finishOptionalTimestamp(svg, spec);
}

/** Panel grid of bin counts, one panel per switching rate. */
function renderHistogram(spec: PlotSpec, table: NamedTable): string {
  requireColumns(table, ["lambda", "bin_left", "bin_right", "count"], table.source);
  const lambdas = distinct(numeric(table, "lambda", table.source));
  const columns = Math.min(2, lambdas.length);
  const rows = Math.ceil(lambdas.length / columns);
  const panelWidth = spec.width / columns;
  const panelHeight = 190;
  const svg = new Svg(spec.width, rows * panelHeight + 8);
  lambdas.forEach((lam, index) => {
    const subset = table.rows.filter((r) => Number(r.lambda) === lam);
    const left = subset.map((r) => Number(r.bin_left));
    const right = subset.map((r) => Number(r.bin_right));
    const count = subset.map((r) => Number(r.count));
    if (count.some((c) => !Number.isFinite(c))) {
      throw new PlotError(`${table.source}: non-numeric count for lambda=${lam}`);
    }
    const fr = frame(
      svg,
      {
        left: (index % columns) * panelWidth,
        top: Math.floor(index / columns) * panelHeight + 4,
        width: panelWidth,
        height: panelHeight,
      },
      [Math.min(...left), Math.max(...right)],
      [0, Math.max(...count, 1) * 1.06],
      { title: `lambda = ${tickLabel(lam)}`, xLabel: "terminal state" },
    );
    subset.forEach((_, i) => {
      if (count[i] === 0) return;
      svg.rect(
        fr.x(left[i]),
        fr.y(count[i]),
        fr.x(right[i]) - fr.x(left[i]),
        fr.y(0) - fr.y(count[i]),
        'fill="#2166ac" stroke="white" stroke-width="0.4"',
      );
    });
  });
  return finishOptionalTimestamp(svg, spec);
}

/** One panel per recording time: mean (thick), mean +- std (thin), truth. */
function renderBand1d(spec: PlotSpec, table: NamedTable): string {
  requireColumns(table, ["time", "index", "mean", "std", "truth", "observed"], table.source);
  const times = distinct(numeric(table, "time", table.source));
  const panelHeight = 190;
  const svg = new Svg(spec.width, panelHeight * times.length + 8);
  times.forEach((t, panelIndex) => {
    const subset = table.rows.filter((r) => Number(r.time) === t);
    const index = subset.map((r) => Number(r.index));
    const mean = subset.map((r) => Number(r.mean));
    const std = subset.map((r) => Number(r.std));
    const truth = subset.map((r) => Number(r.truth));
    if (mean.some((v) => !Number.isFinite(v)) || std.some((v) => !Number.isFinite(v))) {
      throw new PlotError(`${table.source}: non-numeric mean/std at time ${t}`);
    }
    const upper = mean.map((m, i) => m + std[i]);
    const lower = mean.map((m, i) => m - std[i]);
    const fr = frame(
      svg,
      { left: 0, top: panelIndex * panelHeight + 4, width: spec.width, height: panelHeight },
      [Math.min(...index), Math.max(...index)],
      pad([...lower, ...upper, ...truth]),
      {
        title: `${spec.title ?? table.source} — t = ${tickLabel(t)}`,
        xLabel: panelIndex === times.length - 1 ? "coordinate" : undefined,
      },
    );
    const points = (values: number[]): Array<[number, number]> =>
      values.map((v, i) => [fr.x(index[i]), fr.y(v)]);
    svg.polyline(points(truth), 'stroke="#d6604d" stroke-width="1" stroke-dasharray="4,2"');
    svg.polyline(points(upper), 'stroke="#999" stroke-width="0.7"');
    svg.polyline(points(lower), 'stroke="#999" stroke-width="0.7"');
    svg.polyline(points(mean), 'stroke="#111" stroke-width="1.8"');
    subset.forEach((r, i) => {
      if (Number(r.observed) === 1) {
        svg.circle(fr.x(index[i]), fr.y(truth[i]), 1.6, 'fill="#d6604d"');
      }
    });
  });
  return finishOptionalTimestamp(svg, spec);
}

/** Mean/std heatmap pair per recording time, row-major grids. */
function renderHeatmap2d(spec: PlotSpec, table: NamedTable): string {
  requireColumns(table, ["time", "row", "col", "mean", "std"], table.source);
  const times = distinct(numeric(table, "time", table.source));
  const nRows = Math.max(...numeric(table, "row", table.source)) + 1;
  const nCols = Math.max(...numeric(table, "col", table.source)) + 1;
  const cell = Math.max(2, Math.floor((spec.width / 2 - 70) / nCols));
  const mapWidth = cell * nCols;
  const mapHeight = cell * nRows;
  const panelHeight = mapHeight + 42;
  const svg = new Svg(spec.width, panelHeight * times.length + 8);
  const stdLimit = Math.max(...numeric(table, "std", table.source), 1e-12);
  times.forEach((t, panelIndex) => {
    const subset = table.rows.filter((r) => Number(r.time) === t);
    if (subset.length !== nRows * nCols) {
      throw new PlotError(`${table.source}: time ${t} has ${subset.length} cells, ` +
        `expected ${nRows * nCols}`);
    }
    const top = panelIndex * panelHeight + 26;
    const origins = [40, spec.width / 2 + 30];
    svg.text(origins[0] + mapWidth / 2, top - 8, `mean, t = ${tickLabel(t)}`,
      'font-size="12" text-anchor="middle" fill="#111"');
    svg.text(origins[1] + mapWidth / 2, top - 8, `std, t = ${tickLabel(t)}`,
      'font-size="12" text-anchor="middle" fill="#111"');
    for (const r of subset) {
      const row = Number(r.row);
      const col = Number(r.col);
      const mean = Number(r.mean);
      const std = Number(r.std);
      if (!Number.isFinite(mean) || !Number.isFinite(std)) {
        throw new PlotError(`${table.source}: non-numeric cell at (${r.row}, ${r.col})`);
      }
      svg.rect(origins[0] + col * cell, top + row * cell, cell, cell,
        `fill="${divergingColor(mean, 1)}"`);
      svg.rect(origins[1] + col * cell, top + row * cell, cell, cell,
        `fill="${sequentialColor(std, stdLimit)}"`);
    }
    for (const x0 of origins) {
      svg.rect(x0, top, mapWidth, mapHeight, 'fill="none" stroke="#444" stroke-width="1"');
    }
  });
  return finishOptionalTimestamp(svg, spec);
}
