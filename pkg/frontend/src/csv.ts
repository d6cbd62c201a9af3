/**
 * Reader for the simulator's frozen CSV schemas.
 *
 * Files start with a `# fingerprint: <hash>` comment line before the header;
 * comment lines are skipped. Values are plain (no quoting or embedded commas
 * in this artifact family).
 */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {}
export class EmptyInputError extends Error {}

export interface CsvTable {
  path: string;
  header: string[];
  rows: string[][];
}

export function readCsv(path: string): CsvTable {
  const text = readFileSync(path, "utf8");
  const lines = text
    .split("\n")
    .map((ln) => ln.trimEnd())
    .filter((ln) => ln.length > 0 && !ln.startsWith("#"));
  if (lines.length === 0) {
    throw new EmptyInputError(`${path}: no header row`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((ln) => ln.split(","));
  return { path, header, rows };
}

/** Column index lookup; a missing column is a schema diagnostic. */
export function col(table: CsvTable, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(
      `${table.path}: missing column "${name}" (header: ${table.header.join(", ")})`,
    );
  }
  return idx;
}

export function requireColumns(table: CsvTable, names: string[]): void {
  for (const name of names) {
    col(table, name);
  }
}

export function requireRows(table: CsvTable): void {
  if (table.rows.length === 0) {
    throw new EmptyInputError(`${table.path}: no data rows`);
  }
}

export function num(table: CsvTable, row: string[], name: string): number {
  const raw = row[col(table, name)];
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`${table.path}: column "${name}" has non-numeric value "${raw}"`);
  }
  return value;
}
