import fs from "node:fs";
import Papa from "papaparse";

export const REQUIRED_COLUMNS = [
  "model",
  "N",
  "K",
  "M",
  "rho",
  "algorithm",
  "tau",
  "trials",
  "iters_or_budget",
  "seed",
  "success_rate",
  "fnr",
  "fpr",
  "fn_count",
  "fp_count",
  "defective_total",
  "nondefective_total",
  "wall_time_s",
] as const;

export type Row = Record<string, string>;

/** Raised for unreadable, malformed, or empty input; message names the file. */
export class CsvError extends Error {}

/**
 * Load harness CSV rows with every cell kept as the exact string from the
 * file. Typing stays off on purpose: downstream tables must reprint the
 * numbers verbatim, not a float round-trip of them.
 */
export function loadRows(path: string): Row[] {
  let text: string;
  try {
    text = fs.readFileSync(path, "utf8");
  } catch {
    throw new CsvError(`cannot read ${path}`);
  }
  const parsed = Papa.parse<Row>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new CsvError(`${path}: ${e.message}`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const col of REQUIRED_COLUMNS) {
    if (!fields.includes(col)) {
      throw new CsvError(`${path}: missing column ${col}`);
    }
  }
  if (parsed.data.length === 0) {
    throw new CsvError(`${path}: no data rows`);
  }
  return parsed.data;
}

/** Parse one cell as a finite number, for plot geometry only. */
export function numeric(row: Row, col: string, path: string): number {
  const v = Number(row[col]);
  if (!Number.isFinite(v)) {
    throw new CsvError(`${path}: non-numeric ${col} value ${JSON.stringify(row[col])}`);
  }
  return v;
}

/** Group rows by a column, preserving first-appearance order of the keys. */
export function groupBy(rows: Row[], col: string): Map<string, Row[]> {
  const groups = new Map<string, Row[]>();
  for (const row of rows) {
    const key = row[col];
    const bucket = groups.get(key);
    if (bucket) {
      bucket.push(row);
    } else {
      groups.set(key, [row]);
    }
  }
  return groups;
}
