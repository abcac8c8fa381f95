/**
 * Reader for the solver's CSV reports: '#'-prefixed provenance comments,
 * a header row, ',' separators, '.' decimals. Schema checks are strict;
 * a column mismatch is an error, never a guess.
 */

import { readFileSync } from "node:fs";

export interface Report {
  comments: Record<string, string>;
  columns: string[];
  rows: number[][];
}

export class SchemaError extends Error {}

export function readReport(path: string): Report {
  const text = readFileSync(path, "utf8");
  const comments: Record<string, string> = {};
  let columns: string[] | null = null;
  const rows: number[][] = [];
  for (const rawLine of text.split("\n")) {
    const line = rawLine.trim();
    if (!line) continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq > 0) comments[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
      continue;
    }
    const cells = line.split(",");
    if (columns === null) {
      columns = cells.map((c) => c.trim());
      continue;
    }
    rows.push(
      cells.map((c) => {
        const v = c.trim();
        if (v === "true") return 1;
        if (v === "false") return 0;
        const num = Number(v);
        if (!Number.isFinite(num)) throw new SchemaError(`${path}: non-numeric cell '${v}'`);
        return num;
      }),
    );
  }
  if (columns === null) throw new SchemaError(`${path}: empty CSV (no header row)`);
  return { comments, columns, rows };
}

export function requireColumns(report: Report, expected: string[], context: string): void {
  const got = report.columns.join(",");
  const want = expected.join(",");
  if (got !== want) {
    throw new SchemaError(`${context}: expected columns [${want}], found [${got}]`);
  }
}

export function column(report: Report, name: string): number[] {
  const idx = report.columns.indexOf(name);
  if (idx < 0) throw new SchemaError(`missing column '${name}'`);
  return report.rows.map((r) => r[idx]);
}
