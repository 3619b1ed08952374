/** The three plot kinds: slope, branches, ratios.
 *
 * Read-only consumer: every number shown comes from the input files;
 * nothing is recomputed here beyond coordinate mapping.
 */

import { FitSummary, SchemaMismatch, Table, parseCsv, parseFitSummary } from "./csv.js";
import { Box, Scale, Svg } from "./svg.js";

const WIDTH = 640;

const SERIES_COLORS = [
  "#1f6fb2",
  "#d1495b",
  "#3a7d44",
  "#8d5a97",
  "#c77f1a",
];

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(lo < hi)) {
    hi = lo + 1;
    lo = lo - 1;
  }
  return [lo, hi];
}

function pad([lo, hi]: [number, number], f = 0.06): [number, number] {
  const s = (hi - lo) * f;
  return [lo - s, hi + s];
}

/** Data + fitted-model overlay with a residual subpanel; the slope
 * annotation repeats the fitted rate from the fit summary verbatim. */
export function renderSlope(scanCsv: string, fitJson: string): string {
  const table: Table = parseCsv(scanCsv, [
    "R",
    "log_integral",
    "predicted_log",
    "residual",
  ]);
  const fit: FitSummary = parseFitSummary(fitJson);
  const R = table.columns.get("R")!;
  const y = table.columns.get("log_integral")!;
  const model = table.columns.get("predicted_log")!;
  const resid = table.columns.get("residual")!;

  const height = 460;
  const main: Box = { x: 64, y: 20, width: WIDTH - 84, height: 280 };
  const sub: Box = { x: 64, y: 340, width: WIDTH - 84, height: 80 };
  const svg = new Svg(WIDTH, height);

  const xs = new Scale(...pad(extent(R)), main.x, main.x + main.width);
  const ys = new Scale(...pad(extent(y.concat(model))),
                       main.y + main.height, main.y);
  svg.axes(main, xs, ys, "R", "log integral");
  svg.polyline(R.map((r, i) => [xs.at(r), ys.at(model[i])]), "#d1495b");
  for (let i = 0; i < R.length; i++) {
    svg.circle(xs.at(R[i]), ys.at(y[i]), 3, "#1f6fb2");
  }
  svg.text(main.x + 10, main.y + 16,
           `slope = ${String(fit.rate)} (expected ${String(fit.expected_rate)})`,
           12);
  svg.text(main.x + 10, main.y + 32,
           `power = ${String(fit.power)} (expected ${String(fit.expected_power)})`,
           12);

  const rx = new Scale(xs.d0, xs.d1, sub.x, sub.x + sub.width);
  const [rlo, rhi] = pad(extent(resid.concat([0])));
  const ry = new Scale(rlo, rhi, sub.y + sub.height, sub.y);
  svg.axes(sub, rx, ry, "R", "residual");
  svg.line(sub.x, ry.at(0), sub.x + sub.width, ry.at(0), "#999", 1, "4 3");
  for (let i = 0; i < R.length; i++) {
    svg.circle(rx.at(R[i]), ry.at(resid[i]), 2.5, "#3a7d44");
  }
  return svg.toString();
}

/** All branch columns of the modulus table on shared log-log axes. */
export function renderBranches(fdpCsv: string): string {
  const table = parseCsv(fdpCsv, ["s"]);
  const branches = table.header.filter((h) => h !== "s");
  if (branches.length === 0) {
    throw new SchemaMismatch("branch table has no branch columns");
  }
  const s = table.columns.get("s")!;
  if (s.some((v) => v <= 0)) {
    throw new SchemaMismatch("branch table needs positive s for log axes");
  }
  const lx = s.map((v) => Math.log10(v));
  const series = branches.map((name) => ({
    name,
    values: table.columns.get(name)!.map((v) => Math.log10(v)),
  }));

  const height = 420;
  const main: Box = { x: 64, y: 20, width: WIDTH - 230, height: 330 };
  const svg = new Svg(WIDTH, height);
  const xs = new Scale(...pad(extent(lx)), main.x, main.x + main.width);
  const all = series.flatMap((sr) => sr.values);
  const ys = new Scale(...pad(extent(all)), main.y + main.height, main.y);
  svg.axes(main, xs, ys, "log10 s", "log10 F");
  series.forEach((sr, k) => {
    const color = SERIES_COLORS[k % SERIES_COLORS.length];
    svg.polyline(lx.map((v, i) => [xs.at(v), ys.at(sr.values[i])]), color);
    const ly = main.y + 14 + 18 * k;
    svg.line(main.x + main.width + 16, ly - 4, main.x + main.width + 40,
             ly - 4, color, 2);
    svg.text(main.x + main.width + 46, ly, sr.name, 11);
  });
  return svg.toString();
}

/** dist / F(Gamma) against R with the min-max bracket band. */
export function renderRatios(sweepCsv: string): string {
  const table = parseCsv(sweepCsv, ["R", "dist", "F_of_Gamma"]);
  const R = table.columns.get("R")!;
  const dist = table.columns.get("dist")!;
  const F = table.columns.get("F_of_Gamma")!;
  const ratios = dist.map((v, i) => v / F[i]);
  if (ratios.some((v) => !(v > 0) || !Number.isFinite(v))) {
    throw new SchemaMismatch("ratios must be finite and positive");
  }
  const lo = Math.min(...ratios);
  const hi = Math.max(...ratios);

  const height = 400;
  const main: Box = { x: 64, y: 20, width: WIDTH - 84, height: 310 };
  const svg = new Svg(WIDTH, height);
  const xs = new Scale(...pad(extent(R)), main.x, main.x + main.width);
  const ys = new Scale(...pad([Math.min(lo, 0), hi * 1.15] as [number, number], 0),
                       main.y + main.height, main.y);
  svg.axes(main, xs, ys, "R", "dist / F(Gamma)");
  svg.rect(
    { x: main.x, y: ys.at(hi), width: main.width, height: ys.at(lo) - ys.at(hi) },
    "#1f6fb2",
    0.12,
  );
  svg.polyline(R.map((r, i) => [xs.at(r), ys.at(ratios[i])]), "#1f6fb2");
  for (let i = 0; i < R.length; i++) {
    svg.circle(xs.at(R[i]), ys.at(ratios[i]), 3, "#1f6fb2");
  }
  svg.text(main.x + 10, main.y + 16,
           `bracket = ${String(hi / lo)}`, 12);
  return svg.toString();
}
