import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { column, readReport } from "../src/csv.js";
import { plotDecay } from "../src/decay.js";

const FIXTURES = join(__dirname, "fixtures");

function outDir(): string {
  return mkdtempSync(join(tmpdir(), "ssns-plots-"));
}

describe("decay figure", () => {
  it("consumes the fixture and produces a file", () => {
    const out = join(outDir(), "decay.svg");
    const fig = plotDecay(join(FIXTURES, "decay.csv"), out);
    expect(existsSync(out)).toBe(true);
    expect(readFileSync(out, "utf8")).toContain("<svg");
    expect(fig.points.length).toBeGreaterThan(2);
  });

  it("uses the CSV's fitted slope without refitting", () => {
    const out = join(outDir(), "decay.svg");
    const fig = plotDecay(join(FIXTURES, "decay.csv"), out);
    const slope = column(readReport(join(FIXTURES, "decay.csv")), "fitted_slope")[0];
    expect(Math.abs(fig.slopeUsed - slope)).toBeLessThanOrEqual(1e-12);
  });

  it("is deterministic: identical input gives identical bytes", () => {
    const a = join(outDir(), "a.svg");
    const b = join(outDir(), "b.svg");
    plotDecay(join(FIXTURES, "decay.csv"), a);
    plotDecay(join(FIXTURES, "decay.csv"), b);
    expect(readFileSync(a, "utf8")).toBe(readFileSync(b, "utf8"));
  });

  it("rejects an empty report", () => {
    const dir = outDir();
    const bad = join(dir, "empty.csv");
    writeFileSync(bad, "t,sup_norm,sqrt_t_times_sup,fitted_slope\n");
    expect(() => plotDecay(bad, join(dir, "never.svg"))).toThrow();
  });

  it("a synthetic c/sqrt(t) series lies on the reference line", () => {
    const dir = outDir();
    const path = join(dir, "exact.csv");
    const rows = [1, 2, 4, 8].map((k) => {
      const t = 0.01 * k;
      return `${t},${2.0 / Math.sqrt(t)},2.0,-0.5`;
    });
    writeFileSync(path, "t,sup_norm,sqrt_t_times_sup,fitted_slope\n" + rows.join("\n") + "\n");
    const fig = plotDecay(path, join(dir, "exact.svg"));
    expect(fig.slopeUsed).toBe(-0.5);
    // reference and data coincide: check collinearity in log-log space
    const logs = fig.points.map(([t, s]) => [Math.log(t), Math.log(s)]);
    for (let i = 1; i < logs.length; i++) {
      const slope = (logs[i][1] - logs[0][1]) / (logs[i][0] - logs[0][0]);
      expect(slope).toBeCloseTo(-0.5, 12);
    }
  });
});

describe("negative control", () => {
  it("an exponentially decaying series sits visibly off the -1/2 line", () => {
    // Taylor-Green sup norm decays like exp(-2t): in log-log space the
    // local slope steepens with t instead of staying at -1/2
    const dir = mkdtempSync(join(tmpdir(), "ssns-plots-"));
    const path = join(dir, "tg.csv");
    const ts = [0.5, 0.7, 0.9, 1.1];
    const rows = ts.map((t) => {
      const s = Math.exp(-2 * t);
      return `${t},${s},${Math.sqrt(t) * s},-1.57`;
    });
    writeFileSync(path, "t,sup_norm,sqrt_t_times_sup,fitted_slope\n" + rows.join("\n") + "\n");
    const fig = plotDecay(path, join(dir, "tg.svg"));
    const logs = fig.points.map(([t, s]) => [Math.log(t), Math.log(s)]);
    const slope =
      (logs[logs.length - 1][1] - logs[0][1]) / (logs[logs.length - 1][0] - logs[0][0]);
    expect(Math.abs(slope + 0.5)).toBeGreaterThan(0.2);
  });
});
