/**
 * CSV schemas emitted by the stbc42 simulator and analyzer.
 *
 * Two layouts exist: BER sweep rows (one per SNR point) and rotation-angle
 * sweep rows (one per angle).  Parsing is strict — a header or cell that
 * does not match the schema raises a SchemaError naming the offending
 * column, which the CLI surfaces as a nonzero exit.
 */

export const BER_COLUMNS = [
  "code", "decoder", "constellation", "snr_db", "frames", "bits",
  "bit_errors", "ber", "wall_seconds", "mean_leaf_visits", "seed",
  "snr_convention",
] as const;

export const SWEEP_COLUMNS = [
  "code", "constellation", "rho_rad", "rho_deg", "min_det",
  "candidates_scanned", "wall_seconds",
] as const;

const BER_NUMERIC = new Set([
  "constellation", "snr_db", "frames", "bits", "bit_errors", "ber",
  "wall_seconds", "mean_leaf_visits", "seed",
]);

const SWEEP_NUMERIC = new Set([
  "constellation", "rho_rad", "rho_deg", "min_det", "candidates_scanned",
  "wall_seconds",
]);

export type CsvRow = Record<string, string | number>;

export type CsvKind = "ber" | "sweep";

export class SchemaError extends Error {
  column: string;

  constructor(message: string, column: string) {
    super(message);
    this.name = "SchemaError";
    this.column = column;
  }
}

function splitLines(text: string): string[] {
  return text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
}

function checkHeader(header: string[], want: readonly string[]): void {
  const n = Math.max(header.length, want.length);
  for (let i = 0; i < n; i++) {
    if (header[i] !== want[i]) {
      const column = want[i] ?? header[i];
      throw new SchemaError(
        `header column ${i + 1} is ${JSON.stringify(header[i] ?? "<missing>")}, ` +
        `expected ${JSON.stringify(want[i] ?? "<none>")}`,
        column,
      );
    }
  }
}

/** Which known schema a header row belongs to, or null. */
export function detectKind(headerLine: string): CsvKind | null {
  const header = headerLine.split(",");
  if (header.length === BER_COLUMNS.length && header[1] === "decoder") {
    return "ber";
  }
  if (header.length === SWEEP_COLUMNS.length && header[2] === "rho_rad") {
    return "sweep";
  }
  return null;
}

function parseRows(
  text: string,
  columns: readonly string[],
  numeric: Set<string>,
  source: string,
): CsvRow[] {
  const lines = splitLines(text);
  if (lines.length === 0) {
    throw new SchemaError(`${source}: empty file`, columns[0]);
  }
  checkHeader(lines[0].split(","), columns);
  const rows: CsvRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(
        `${source}:${i + 1}: ${cells.length} cells, expected ${columns.length}`,
        columns[Math.min(cells.length, columns.length - 1)],
      );
    }
    const row: CsvRow = {};
    for (let c = 0; c < columns.length; c++) {
      const name = columns[c];
      if (numeric.has(name)) {
        const value = Number(cells[c]);
        if (!Number.isFinite(value)) {
          throw new SchemaError(
            `${source}:${i + 1}: column ${name} is not numeric: ` +
            JSON.stringify(cells[c]),
            name,
          );
        }
        row[name] = value;
      } else {
        row[name] = cells[c];
      }
    }
    rows.push(row);
  }
  return rows;
}

export function parseBerCsv(text: string, source = "<ber csv>"): CsvRow[] {
  return parseRows(text, BER_COLUMNS, BER_NUMERIC, source);
}

export function parseSweepCsv(text: string, source = "<sweep csv>"): CsvRow[] {
  return parseRows(text, SWEEP_COLUMNS, SWEEP_NUMERIC, source);
}

/** Parse a CSV of either known layout, reporting which one it was. */
export function parseAny(text: string, source: string): { kind: CsvKind; rows: CsvRow[] } {
  const lines = splitLines(text);
  const kind = lines.length ? detectKind(lines[0]) : null;
  if (kind === "ber") {
    return { kind, rows: parseBerCsv(text, source) };
  }
  if (kind === "sweep") {
    return { kind, rows: parseSweepCsv(text, source) };
  }
  // fall through to the BER checker so the error names the first bad column
  parseBerCsv(text, source);
  throw new SchemaError(`${source}: unrecognized header`, BER_COLUMNS[0]);
}
