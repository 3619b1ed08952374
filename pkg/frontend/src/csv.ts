/** Strict readers for the computational package's CSV/JSON outputs. */

export class SchemaMismatch extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaMismatch";
  }
}

export interface Table {
  header: string[];
  /** column name -> numeric values, in file order */
  columns: Map<string, number[]>;
  rows: number;
}

/** Parse a comma-separated, LF-terminated numeric CSV with a header row. */
export function parseCsv(text: string, requiredColumns: string[]): Table {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new SchemaMismatch("CSV needs a header row and at least one data row");
  }
  const header = lines[0].split(",");
  for (const col of requiredColumns) {
    if (!header.includes(col)) {
      throw new SchemaMismatch(
        `missing column '${col}' (header: ${header.join(",")})`,
      );
    }
  }
  const columns = new Map<string, number[]>(header.map((h) => [h, []]));
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new SchemaMismatch(
        `row ${i} has ${cells.length} cells, header has ${header.length}`,
      );
    }
    cells.forEach((cell, j) => {
      const v = Number(cell);
      if (Number.isNaN(v)) {
        throw new SchemaMismatch(
          `row ${i}, column '${header[j]}': not a number: '${cell}'`,
        );
      }
      columns.get(header[j])!.push(v);
    });
  }
  return { header, columns, rows: lines.length - 1 };
}

export interface FitSummary {
  kind: string;
  rate: number;
  power: number;
  expected_rate: number;
  expected_power: number;
}

export function parseFitSummary(text: string): FitSummary {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    throw new SchemaMismatch("fit summary is not valid JSON");
  }
  const o = doc as Record<string, unknown>;
  for (const key of ["kind", "rate", "power", "expected_rate", "expected_power"]) {
    if (!(key in o)) {
      throw new SchemaMismatch(`fit summary missing '${key}'`);
    }
  }
  return o as unknown as FitSummary;
}
