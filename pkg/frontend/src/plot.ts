/**
 * CLI: render stbc42 CSV outputs into SVG figures.
 *
 *   node dist/plot.js --input ber_proposed.csv --input ber_djabba.csv \
 *       --output ber.svg [--x snr_db] [--y ber] [--group-by code,decoder] \
 *       [--title "..."]
 *
 * y=ber plots on a log axis grouped by (code, decoder) against snr_db;
 * y=min_det plots linearly grouped by code against rho_deg (or rho_rad).
 * Zero-BER rows become censor markers rather than being dropped.
 *
 * Exit codes: 0 rendered, 1 schema/data error (offending column named),
 * 2 usage error.
 */

import { readFile, writeFile } from "node:fs/promises";

import { buildChart, Series } from "./chart.js";
import { CsvKind, CsvRow, SchemaError, parseAny } from "./schema.js";

interface PlotSpec {
  inputs: string[];
  output: string;
  x: string;
  y: string;
  groupBy: string[];
  title: string;
}

const X_CHOICES = new Set(["snr_db", "rho_deg", "rho_rad"]);
const Y_CHOICES = new Set(["ber", "min_det"]);

class UsageError extends Error {}

export function parseArgs(argv: string[]): PlotSpec {
  const inputs: string[] = [];
  let output = "";
  let x = "";
  let y = "ber";
  let groupBy: string[] = [];
  let title = "";
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const need = (): string => {
      const v = argv[++i];
      if (v === undefined) {
        throw new UsageError(`${flag} needs a value`);
      }
      return v;
    };
    switch (flag) {
      case "--input":
        inputs.push(...need().split(",").filter((p) => p.length));
        break;
      case "--output":
        output = need();
        break;
      case "--x":
        x = need();
        break;
      case "--y":
        y = need();
        break;
      case "--group-by":
        groupBy = need().split(",").filter((c) => c.length);
        break;
      case "--title":
        title = need();
        break;
      default:
        throw new UsageError(`unknown flag ${flag}`);
    }
  }
  if (inputs.length === 0) {
    throw new UsageError("at least one --input CSV is required");
  }
  if (!output) {
    throw new UsageError("--output is required");
  }
  if (!Y_CHOICES.has(y)) {
    throw new UsageError(`--y must be one of ${[...Y_CHOICES].join("|")}`);
  }
  if (x && !X_CHOICES.has(x)) {
    throw new UsageError(`--x must be one of ${[...X_CHOICES].join("|")}`);
  }
  if (!x) {
    x = y === "ber" ? "snr_db" : "rho_deg";
  }
  if (groupBy.length === 0) {
    groupBy = y === "ber" ? ["code", "decoder"] : ["code"];
  }
  return { inputs, output, x, y, groupBy, title };
}

function groupSeries(rows: CsvRow[], spec: PlotSpec): Series[] {
  for (const col of [spec.x, spec.y, ...spec.groupBy]) {
    if (!(col in rows[0])) {
      throw new SchemaError(`column ${col} not present in the input schema`, col);
    }
  }
  const groups = new Map<string, CsvRow[]>();
  for (const row of rows) {
    const key = spec.groupBy.map((c) => String(row[c])).join(" / ");
    const bucket = groups.get(key);
    if (bucket) {
      bucket.push(row);
    } else {
      groups.set(key, [row]);
    }
  }
  const logY = spec.y === "ber";
  const series: Series[] = [];
  for (const [label, bucket] of [...groups.entries()].sort()) {
    bucket.sort((a, b) => Number(a[spec.x]) - Number(b[spec.x]));
    const points = [];
    const censored = [];
    for (const row of bucket) {
      const xv = Number(row[spec.x]);
      const yv = Number(row[spec.y]);
      if (logY && yv <= 0) {
        censored.push(xv);
      } else {
        points.push({ x: xv, y: yv });
      }
    }
    series.push({ label, points, censored });
  }
  return series;
}

export async function run(argv: string[]): Promise<number> {
  let spec: PlotSpec;
  try {
    spec = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const rows: CsvRow[] = [];
    let kind: CsvKind | null = null;
    for (const path of spec.inputs) {
      const parsed = parseAny(await readFile(path, "utf-8"), path);
      if (kind !== null && parsed.kind !== kind) {
        throw new SchemaError(
          `${path}: mixes ${parsed.kind} rows into a ${kind} plot`, spec.y);
      }
      kind = parsed.kind;
      rows.push(...parsed.rows);
    }
    if (rows.length === 0) {
      throw new SchemaError("no data rows in the inputs", spec.y);
    }
    const series = groupSeries(rows, spec);
    const title = spec.title ||
      (spec.y === "ber" ? "BER vs SNR" : "minimum determinant vs rotation");
    const svg = buildChart(series, {
      title,
      xLabel: spec.x,
      yLabel: spec.y === "ber" ? "bit error rate" : "minimum determinant",
      logY: spec.y === "ber",
    });
    await writeFile(spec.output, svg, "utf-8");
    console.log(`${spec.output}: ${series.length} series, ${rows.length} rows`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error (column ${err.column}): ${err.message}`);
      return 1;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("plot.js") || entry.endsWith("plot.ts")) {
  run(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
