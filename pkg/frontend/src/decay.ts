/**
 * Log-log decay figure: sup-norm history with a -1/2 reference slope and
 * the solver's fitted slope drawn as-is. The plot layer never refits.
 */

import { writeFileSync } from "node:fs";

import { column, readReport, requireColumns, SchemaError } from "./csv.js";
import { decadeTicks, Figure, logScale } from "./svg.js";

export interface DecayFigure {
  outPath: string;
  slopeUsed: number;
  points: Array<[number, number]>;
}

export function plotDecay(csvPath: string, outPath: string): DecayFigure {
  const report = readReport(csvPath);
  requireColumns(report, ["t", "sup_norm", "sqrt_t_times_sup", "fitted_slope"], csvPath);
  if (report.rows.length === 0) throw new SchemaError(`${csvPath}: no data rows`);
  const t = column(report, "t");
  const sup = column(report, "sup_norm");
  const slopes = new Set(column(report, "fitted_slope"));
  if (slopes.size !== 1) throw new SchemaError(`${csvPath}: fitted_slope column is not constant`);
  const slopeUsed = [...slopes][0];

  const fig = new Figure(560, 400);
  const xs = logScale([Math.min(...t), Math.max(...t)], [fig.plotLeft, fig.plotRight]);
  const lo = Math.min(...sup);
  const hi = Math.max(...sup);
  const ys = logScale([lo * 0.8, hi * 1.25], [fig.plotBottom, fig.plotTop]);

  const points: Array<[number, number]> = t.map((ti, i) => [ti, sup[i]]);
  const px = points.map(([a, b]) => [xs(a), ys(b)] as [number, number]);

  // reference slope -1/2 anchored at the first sample
  const ref: Array<[number, number]> = t.map((ti) => [
    xs(ti),
    ys(sup[0] * Math.pow(ti / t[0], -0.5)),
  ]);
  fig.polyline(ref, "#888", 1.2, "6,4");

  // fitted slope from the CSV, anchored at the series midpoint
  const mid = Math.floor(t.length / 2);
  const fit: Array<[number, number]> = t.map((ti) => [
    xs(ti),
    ys(sup[mid] * Math.pow(ti / t[mid], slopeUsed)),
  ]);
  fig.polyline(fit, "#d62728", 1.2, "2,3");

  fig.polyline(px, "#1f77b4", 1.5);
  fig.circles(px, "#1f77b4");
  fig.xAxis(xs, decadeTicks(xs.domain[0], xs.domain[1]), "t");
  fig.yAxis(ys, decadeTicks(ys.domain[0], ys.domain[1]), "sup |u|");
  fig.title(`sup-norm decay (reference slope -1/2, fitted ${slopeUsed.toFixed(4)})`);
  fig.text(fig.plotRight - 4, fig.plotTop + 14, "ref -1/2", "end", 10);

  const svg = fig.render();
  writeFileSync(outPath, svg);
  return { outPath, slopeUsed, points };
}
