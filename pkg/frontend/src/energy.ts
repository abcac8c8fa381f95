/**
 * Kinetic-energy history on a log-linear scale, with the gradient
 * (dissipation) series on the same axes for balance reading.
 */

import { writeFileSync } from "node:fs";

import { column, readReport, requireColumns, SchemaError } from "./csv.js";
import { decadeTicks, Figure, linearScale, linearTicks, logScale } from "./svg.js";

export interface EnergyFigure {
  outPath: string;
  points: Array<[number, number]>;
}

export function plotEnergy(csvPath: string, outPath: string): EnergyFigure {
  const report = readReport(csvPath);
  requireColumns(report, ["t", "energy", "grad_sq", "div_sup"], csvPath);
  if (report.rows.length === 0) throw new SchemaError(`${csvPath}: no data rows`);
  const t = column(report, "t");
  const energy = column(report, "energy");
  const grad = column(report, "grad_sq");

  const fig = new Figure(560, 400);
  const xs = linearScale([Math.min(...t), Math.max(...t)], [fig.plotLeft, fig.plotRight]);
  const positive = energy.concat(grad).filter((v) => v > 0);
  const lo = positive.length ? Math.min(...positive) : 1e-16;
  const hi = positive.length ? Math.max(...positive) : 1;
  const ys = logScale([lo * 0.8, hi * 1.25], [fig.plotBottom, fig.plotTop]);

  const points: Array<[number, number]> = t.map((ti, i) => [ti, energy[i]]);
  fig.polyline(
    points.filter(([, e]) => e > 0).map(([a, b]) => [xs(a), ys(b)]),
    "#1f77b4",
  );
  fig.polyline(
    t.map((ti, i) => [ti, grad[i]] as [number, number])
      .filter(([, g]) => g > 0)
      .map(([a, b]) => [xs(a), ys(b)]),
    "#d62728",
    1.2,
    "4,3",
  );
  fig.text(fig.plotRight - 4, fig.plotTop + 14, "energy", "end", 10);
  fig.text(fig.plotRight - 4, fig.plotTop + 27, "|grad u|^2", "end", 10);
  fig.xAxis(xs, linearTicks(xs.domain[0], xs.domain[1]), "t");
  fig.yAxis(ys, decadeTicks(ys.domain[0], ys.domain[1]), "energy");
  fig.title("energy history");
  writeFileSync(outPath, fig.render());
  return { outPath, points };
}
