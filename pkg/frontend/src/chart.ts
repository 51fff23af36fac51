/**
 * Deterministic SVG chart builder.
 *
 * One polyline per series; optional log-scaled y axis (decade ticks) for BER
 * curves.  Points whose y is zero cannot sit on a log axis: they are drawn
 * as downward "censored" arrows pinned to the bottom of the plot area
 * instead of being silently dropped.
 *
 * The exact numbers behind every curve are embedded verbatim in a
 * <metadata> block, so a figure can always be traced back to its rows
 * (rendering never alters data).
 */

export interface SeriesPoint {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  points: SeriesPoint[];
  /** x positions of zero-y rows shown as censor markers on log axes */
  censored: number[];
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  width?: number;
  height?: number;
}

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f",
];

const MARKERS = ["circle", "square", "diamond", "triangle"] as const;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => s >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function fmt(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e4 || Math.abs(v) < 1e-3)) {
    return v.toExponential(0).replace("e-", "e-").replace("e+", "e");
  }
  return Number(v.toPrecision(6)).toString();
}

function marker(kind: (typeof MARKERS)[number], x: number, y: number,
                color: string): string {
  const r = 2.6;
  switch (kind) {
    case "circle":
      return `<circle class="pt" cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="${r}" fill="${color}"/>`;
    case "square":
      return `<rect class="pt" x="${(x - r).toFixed(1)}" y="${(y - r).toFixed(1)}" width="${2 * r}" height="${2 * r}" fill="${color}"/>`;
    case "diamond":
      return `<path class="pt" d="M${x.toFixed(1)} ${(y - r - 1).toFixed(1)}l${r + 1} ${r + 1}l-${r + 1} ${r + 1}l-${r + 1} -${r + 1}z" fill="${color}"/>`;
    case "triangle":
      return `<path class="pt" d="M${x.toFixed(1)} ${(y - r - 1).toFixed(1)}l${r + 1} ${2 * (r + 1)}h-${2 * (r + 1)}z" fill="${color}"/>`;
  }
}

/** Backing data embedded in a chart, recoverable via extractBackingData. */
export function extractBackingData(svg: string): Series[] {
  const m = svg.match(/<metadata id="backing-data">(.*?)<\/metadata>/s);
  if (!m) {
    throw new Error("no backing-data metadata block in SVG");
  }
  const json = m[1].replace(/&lt;/g, "<").replace(/&gt;/g, ">")
    .replace(/&amp;/g, "&");
  return JSON.parse(json) as Series[];
}

export function buildChart(series: Series[], opts: ChartOptions): string {
  if (series.length === 0 || series.every(
      (s) => s.points.length === 0 && s.censored.length === 0)) {
    throw new Error("nothing to plot: no series data");
  }
  const W = opts.width ?? 720;
  const H = opts.height ?? 420;
  const ml = 72, mr = 18, mt = 40, mb = 52;
  const pw = W - ml - mr;
  const ph = H - mt - mb;

  const xs = series.flatMap((s) => s.points.map((p) => p.x).concat(s.censored));
  const ysRaw = series.flatMap((s) => s.points.map((p) => p.y));
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const xOf = (v: number) =>
    ml + ((v - xMin) / (xMax - xMin || 1)) * pw;

  let yOf: (v: number) => number;
  let yTicks: number[];
  let yTickLabel: (v: number) => string;
  if (opts.logY) {
    const pos = ysRaw.filter((y) => y > 0);
    // every row censored: keep a conventional BER decade range
    const lo = pos.length ? Math.floor(Math.log10(Math.min(...pos))) : -6;
    const hi = pos.length ? Math.ceil(Math.log10(Math.max(...pos)) + 1e-12) : 0;
    const span = Math.max(hi - lo, 1);
    yOf = (v) => mt + ph - ((Math.log10(v) - lo) / span) * ph;
    yTicks = [];
    for (let d = lo; d <= hi; d++) {
      yTicks.push(d);
    }
    yTickLabel = (d) => `1e${d}`;
  } else {
    const yMinRaw = Math.min(...ysRaw, 0);
    const yMaxRaw = Math.max(...ysRaw) * 1.05 || 1;
    yOf = (v) => mt + ph - ((v - yMinRaw) / (yMaxRaw - yMinRaw || 1)) * ph;
    yTicks = niceTicks(yMinRaw, yMaxRaw, 6);
    yTickLabel = fmt;
  }

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  const backing = JSON.stringify(series)
    .replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
  s += `<metadata id="backing-data">${backing}</metadata>\n`;
  s += `<rect width="${W}" height="${H}" fill="#ffffff"/>\n`;
  s += `<text x="${ml}" y="22" font-size="13" font-weight="600" fill="#222">${esc(opts.title)}</text>\n`;

  // grid + y ticks
  for (const t of yTicks) {
    const y = opts.logY ? mt + ph - ((t - yTicks[0]) /
      Math.max(yTicks[yTicks.length - 1] - yTicks[0], 1)) * ph : yOf(t);
    s += `<line x1="${ml}" y1="${y.toFixed(1)}" x2="${ml + pw}" y2="${y.toFixed(1)}" stroke="#e5e5e5" stroke-width="0.6"/>\n`;
    s += `<text x="${ml - 6}" y="${(y + 3.5).toFixed(1)}" text-anchor="end" font-size="10" fill="#555">${esc(opts.logY ? yTickLabel(t) : yTickLabel(t))}</text>\n`;
  }
  const xTicks = niceTicks(xMin, xMax, 8);
  for (const t of xTicks) {
    const x = xOf(t);
    s += `<line x1="${x.toFixed(1)}" y1="${mt + ph}" x2="${x.toFixed(1)}" y2="${mt + ph + 4}" stroke="#333" stroke-width="0.6"/>\n`;
    s += `<text x="${x.toFixed(1)}" y="${mt + ph + 16}" text-anchor="middle" font-size="10" fill="#555">${esc(fmt(t))}</text>\n`;
  }

  // axes
  s += `<line x1="${ml}" y1="${mt}" x2="${ml}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<line x1="${ml}" y1="${mt + ph}" x2="${ml + pw}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<text x="${ml + pw / 2}" y="${H - 10}" text-anchor="middle" font-size="11" fill="#333">${esc(opts.xLabel)}</text>\n`;
  s += `<text x="16" y="${mt + ph / 2}" text-anchor="middle" font-size="11" fill="#333" transform="rotate(-90,16,${mt + ph / 2})">${esc(opts.yLabel)}</text>\n`;

  // series
  series.forEach((sr, i) => {
    const color = PALETTE[i % PALETTE.length];
    const mk = MARKERS[i % MARKERS.length];
    const pts = sr.points
      .map((p) => `${xOf(p.x).toFixed(1)},${yOf(p.y).toFixed(1)}`)
      .join(" ");
    if (sr.points.length > 0) {
      s += `<polyline class="series" data-label="${esc(sr.label)}" fill="none" stroke="${color}" stroke-width="1.6" points="${pts}"/>\n`;
      for (const p of sr.points) {
        s += marker(mk, xOf(p.x), yOf(p.y), color) + "\n";
      }
    }
    for (const cx of sr.censored) {
      const x = xOf(cx);
      const yb = mt + ph;
      s += `<path class="censored" data-label="${esc(sr.label)}" d="M${(x - 4).toFixed(1)} ${(yb - 12).toFixed(1)}h8l-4 8z" fill="${color}" opacity="0.85"/>\n`;
      s += `<line class="censored-stem" x1="${x.toFixed(1)}" y1="${(yb - 22).toFixed(1)}" x2="${x.toFixed(1)}" y2="${(yb - 12).toFixed(1)}" stroke="${color}" stroke-width="1.2"/>\n`;
    }
  });

  // legend
  const legendW = Math.max(...series.map((sr) => sr.label.length)) * 6.2 + 40;
  const lx = ml + pw - legendW;
  let ly = mt + 8;
  s += `<rect x="${lx - 6}" y="${ly - 12}" width="${legendW}" height="${series.length * 16 + 10}" rx="3" fill="#ffffff" fill-opacity="0.88" stroke="#ccc" stroke-width="0.5"/>\n`;
  series.forEach((sr, i) => {
    const color = PALETTE[i % PALETTE.length];
    s += `<line x1="${lx}" y1="${ly}" x2="${lx + 18}" y2="${ly}" stroke="${color}" stroke-width="1.6"/>\n`;
    s += marker(MARKERS[i % MARKERS.length], lx + 9, ly, color) + "\n";
    const extra = sr.censored.length > 0 ? " (zero-error pts censored)" : "";
    s += `<text x="${lx + 24}" y="${ly + 3.5}" font-size="10" fill="#333">${esc(sr.label + extra)}</text>\n`;
    ly += 16;
  });

  s += "</svg>\n";
  return s;
}
