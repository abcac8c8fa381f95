/**
 * Similarity-profile overlays. Profiles are 3D lattices; curves are
 * radial shell averages of the magnitude |U(y)|, one shell per lattice
 * spacing, so collapse (or its failure) is visible as curve overlap.
 */

import { writeFileSync } from "node:fs";

import { column, readReport, requireColumns, SchemaError } from "./csv.js";
import { Figure, linearScale, linearTicks } from "./svg.js";

export interface ProfileCurve {
  label: string;
  shells: number[];
  mean: number[];
}

export interface ProfileFigure {
  outPath: string;
  curves: ProfileCurve[];
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function radialAverage(csvPath: string): ProfileCurve {
  const report = readReport(csvPath);
  requireColumns(report, ["y1", "y2", "y3", "u1", "u2", "u3"], csvPath);
  if (report.rows.length === 0) throw new SchemaError(`${csvPath}: no data rows`);
  const spacing = Number(report.comments["spacing"]);
  if (!Number.isFinite(spacing) || spacing <= 0) {
    throw new SchemaError(`${csvPath}: missing or invalid 'spacing' provenance comment`);
  }
  const y1 = column(report, "y1");
  const y2 = column(report, "y2");
  const y3 = column(report, "y3");
  const mags = report.rows.map((r) => Math.hypot(r[3], r[4], r[5]));
  // shells beyond the inscribed ball touch only cube corners and are
  // sparsely sampled; cut them so every plotted shell is complete
  const yMax = Math.max(...y1.map(Math.abs));
  const sums: number[] = [];
  const counts: number[] = [];
  for (let i = 0; i < mags.length; i++) {
    const r = Math.hypot(y1[i], y2[i], y3[i]);
    if (r > yMax * (1 + 1e-12)) continue;
    const bin = Math.round(r / spacing);
    sums[bin] = (sums[bin] ?? 0) + mags[i];
    counts[bin] = (counts[bin] ?? 0) + 1;
  }
  const shells: number[] = [];
  const mean: number[] = [];
  for (let bin = 0; bin < sums.length; bin++) {
    if (!counts[bin]) continue;
    shells.push(bin * spacing);
    mean.push(sums[bin] / counts[bin]);
  }
  const t = report.comments["t"];
  return { label: t !== undefined ? `t=${Number(t).toPrecision(3)}` : csvPath, shells, mean };
}

export function plotProfiles(csvPaths: string[], outPath: string): ProfileFigure {
  if (csvPaths.length === 0) throw new SchemaError("no profile CSVs given");
  const curves = csvPaths.map(radialAverage);
  const fig = new Figure(560, 400);
  const rmax = Math.max(...curves.map((c) => c.shells[c.shells.length - 1]));
  const vmax = Math.max(...curves.map((c) => Math.max(...c.mean)));
  const xs = linearScale([0, rmax], [fig.plotLeft, fig.plotRight]);
  const ys = linearScale([0, vmax * 1.1 || 1], [fig.plotBottom, fig.plotTop]);
  curves.forEach((c, i) => {
    const pts = c.shells.map((r, k) => [xs(r), ys(c.mean[k])] as [number, number]);
    fig.polyline(pts, PALETTE[i % PALETTE.length]);
    fig.text(fig.plotRight - 4, fig.plotTop + 14 + 13 * i, c.label, "end", 10);
    fig.add(
      `<line x1="${fig.plotRight - 64}" y1="${fig.plotTop + 10 + 13 * i}" x2="${fig.plotRight - 48}" ` +
        `y2="${fig.plotTop + 10 + 13 * i}" stroke="${PALETTE[i % PALETTE.length]}" stroke-width="2"/>`,
    );
  });
  fig.xAxis(xs, linearTicks(0, rmax), "|y|");
  fig.yAxis(ys, linearTicks(0, vmax * 1.1 || 1), "shell-averaged |U|");
  fig.title("similarity profiles");
  writeFileSync(outPath, fig.render());
  return { outPath, curves };
}
