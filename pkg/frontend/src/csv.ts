import Papa from "papaparse";

export class PlotError extends Error {}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string, source: string): Table {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new PlotError(`${source}: CSV parse error: ${first.message} (row ${first.row})`);
  }
  const columns = parsed.meta.fields ?? [];
  if (columns.length === 0 || parsed.data.length === 0) {
    throw new PlotError(`${source}: no data rows`);
  }
  return { columns, rows: parsed.data };
}

export function requireColumns(table: Table, needed: string[], source: string): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new PlotError(
      `${source}: missing column(s) ${missing.join(", ")}; found ${table.columns.join(", ")}`,
    );
  }
}

export function numeric(table: Table, column: string, source: string): number[] {
  return table.rows.map((row, i) => {
    const value = Number(row[column]);
    if (!Number.isFinite(value)) {
      throw new PlotError(`${source}: non-numeric value ${JSON.stringify(row[column])} in ` +
        `column ${column}, row ${i + 2}`);
    }
    return value;
  });
}

/** Distinct values of a column in first-appearance order. */
export function distinct(values: number[]): number[] {
  const seen = new Set<number>();
  const out: number[] = [];
  for (const v of values) {
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}
