/**
 * Reader for the simulator's schema=1 CSV files: comment-prefixed
 * `# key=value` header lines, one column-name row, numeric data rows.
 */

import { readFileSync } from "node:fs";

export const SUPPORTED_SCHEMA = "1";

export class MissingFileError extends Error {}
export class SchemaMismatchError extends Error {}

export interface CsvTable {
  path: string;
  header: Record<string, string>;
  columns: string[];
  rows: number[][];
}

export function readCsv(path: string): CsvTable {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new MissingFileError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  const header: Record<string, string> = {};
  let i = 0;
  for (; i < lines.length && lines[i].startsWith("#"); i++) {
    const body = lines[i].slice(1).trim();
    const eq = body.indexOf("=");
    if (eq > 0) header[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
  }
  if (header["schema"] !== SUPPORTED_SCHEMA) {
    throw new SchemaMismatchError(
      `${path}: expected schema=${SUPPORTED_SCHEMA}, found ${header["schema"] ?? "none"}`,
    );
  }
  if (i >= lines.length) {
    throw new SchemaMismatchError(`${path}: no column row after the header`);
  }
  const columns = lines[i].split(",").map((c) => c.trim());
  const rows: number[][] = [];
  for (i += 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new SchemaMismatchError(
        `${path}: row ${rows.length + 1} has ${parts.length} fields, expected ${columns.length}`,
      );
    }
    rows.push(parts.map(Number));
  }
  return { path, header, columns, rows };
}

/** Columns as named vectors; missing names fail loudly. */
export function requireColumns(table: CsvTable, names: string[]): Record<string, number[]> {
  const out: Record<string, number[]> = {};
  for (const name of names) {
    const idx = table.columns.indexOf(name);
    if (idx < 0) {
      throw new SchemaMismatchError(
        `${table.path}: missing column '${name}' (have: ${table.columns.join(", ")})`,
      );
    }
    out[name] = table.rows.map((r) => r[idx]);
  }
  return out;
}
