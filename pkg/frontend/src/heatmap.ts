/**
 * Scaling-residual heatmap over (lambda, t). Rows are ladder rungs,
 * columns the snapshot times; color is the relative residual.
 */

import { writeFileSync } from "node:fs";

import { readReport, requireColumns, SchemaError } from "./csv.js";
import { Figure, viridis } from "./svg.js";

export interface HeatmapCell {
  lambda: number;
  t: number;
  residual: number;
  color: string;
}

export interface HeatmapFigure {
  outPath: string;
  cells: HeatmapCell[];
  vmin: number;
  vmax: number;
}

export function plotScalingHeatmap(csvPath: string, outPath: string): HeatmapFigure {
  const report = readReport(csvPath);
  requireColumns(report, ["lambda", "t", "residual"], csvPath);
  if (report.rows.length === 0) throw new SchemaError(`${csvPath}: no data rows`);
  const lambdas = [...new Set(report.rows.map((r) => r[0]))].sort((a, b) => b - a);
  const times = [...new Set(report.rows.map((r) => r[1]))].sort((a, b) => a - b);
  const vmin = Math.min(...report.rows.map((r) => r[2]));
  const vmax = Math.max(...report.rows.map((r) => r[2]));
  const span = vmax - vmin;

  const fig = new Figure(640, 120 + 40 * lambdas.length, {
    left: 80,
    right: 96,
    top: 28,
    bottom: 44,
  });
  const cellW = (fig.plotRight - fig.plotLeft) / times.length;
  const cellH = (fig.plotBottom - fig.plotTop) / lambdas.length;

  const cells: HeatmapCell[] = [];
  for (const [lam, t, s] of report.rows) {
    const i = lambdas.indexOf(lam);
    const j = times.indexOf(t);
    const frac = span > 0 ? (s - vmin) / span : 0;
    const color = viridis(frac);
    cells.push({ lambda: lam, t, residual: s, color });
    fig.rect(fig.plotLeft + j * cellW, fig.plotTop + i * cellH, cellW, cellH, color);
  }
  for (let i = 0; i < lambdas.length; i++) {
    fig.text(fig.plotLeft - 8, fig.plotTop + (i + 0.5) * cellH + 4, String(lambdas[i]), "end");
  }
  const step = Math.max(1, Math.floor(times.length / 8));
  for (let j = 0; j < times.length; j += step) {
    fig.text(
      fig.plotLeft + (j + 0.5) * cellW,
      fig.plotBottom + 16,
      times[j].toPrecision(3),
      "middle",
      9,
    );
  }
  // color bar
  const barX = fig.plotRight + 24;
  const steps = 32;
  for (let k = 0; k < steps; k++) {
    const y = fig.plotBottom - ((k + 1) / steps) * (fig.plotBottom - fig.plotTop);
    fig.rect(barX, y, 14, (fig.plotBottom - fig.plotTop) / steps + 0.5, viridis(k / (steps - 1)));
  }
  fig.text(barX + 18, fig.plotBottom + 4, vmin.toExponential(2), "start", 9);
  fig.text(barX + 18, fig.plotTop + 8, vmax.toExponential(2), "start", 9);
  fig.text(fig.plotLeft - 8, fig.plotTop - 8, "lambda", "end");
  fig.text((fig.plotLeft + fig.plotRight) / 2, fig.plotBottom + 34, "t", "middle");
  fig.title("scaling residual S(lambda, t)");

  writeFileSync(outPath, fig.render());
  return { outPath, cells, vmin, vmax };
}
