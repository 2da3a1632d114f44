import { readFileSync } from "node:fs";

export interface Table {
  comments: string[];
  columns: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const comments: string[] = [];
  let columns: string[] | null = null;
  const rows: string[][] = [];
  for (const raw of text.split("\n")) {
    const line = raw.replace(/\r$/, "");
    if (line.length === 0) continue;
    if (line.startsWith("#")) {
      comments.push(line.slice(1).trim());
    } else if (columns === null) {
      columns = line.split(",");
    } else {
      rows.push(line.split(","));
    }
  }
  if (columns === null) {
    throw new Error("CSV has no header row");
  }
  return { comments, columns, rows };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"));
}

/** Numeric column accessor; names the missing column on schema mismatch. */
export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new Error(
      `missing column '${name}' (have: ${table.columns.join(", ")})`,
    );
  }
  return table.rows.map((r) => Number(r[idx]));
}

export function textColumn(table: Table, name: string): string[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new Error(
      `missing column '${name}' (have: ${table.columns.join(", ")})`,
    );
  }
  return table.rows.map((r) => r[idx]);
}

export function hasColumn(table: Table, name: string): boolean {
  return table.columns.includes(name);
}
