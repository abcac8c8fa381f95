import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { plotProfiles, radialAverage } from "../src/profiles.js";

const FIXTURES = join(__dirname, "fixtures");

function outDir(): string {
  return mkdtempSync(join(tmpdir(), "ssns-plots-"));
}

describe("profile overlays", () => {
  it("consumes the two fixture profiles and produces a file", () => {
    const out = join(outDir(), "profiles.svg");
    const fig = plotProfiles(
      [join(FIXTURES, "profile_00.csv"), join(FIXTURES, "profile_01.csv")],
      out,
    );
    expect(existsSync(out)).toBe(true);
    expect(fig.curves).toHaveLength(2);
    for (const curve of fig.curves) {
      expect(curve.shells.length).toBeGreaterThan(3);
      expect(Math.min(...curve.mean)).toBeGreaterThanOrEqual(0);
    }
  });

  it("near-collapsed fixtures give closely overlapping curves", () => {
    const a = radialAverage(join(FIXTURES, "profile_00.csv"));
    const b = radialAverage(join(FIXTURES, "profile_01.csv"));
    expect(a.shells).toEqual(b.shells);
    const scale = Math.max(...a.mean);
    const diffs = a.mean.map((v, i) => Math.abs(v - b.mean[i]) / scale);
    // the fixture run is a heat flow in its collapse band
    expect(Math.max(...diffs)).toBeLessThan(0.2);
  });

  it("identical profiles overlay exactly", () => {
    const a = radialAverage(join(FIXTURES, "profile_00.csv"));
    const b = radialAverage(join(FIXTURES, "profile_00.csv"));
    expect(a.mean).toEqual(b.mean);
  });

  it("missing column is a schema error", () => {
    const dir = outDir();
    const path = join(dir, "bad.csv");
    writeFileSync(path, "# spacing=0.1\ny1,y2,y3,u1,u2\n0,0,0,1,1\n");
    expect(() => radialAverage(path)).toThrow();
  });

  it("missing spacing provenance is an error", () => {
    const dir = outDir();
    const path = join(dir, "nospacing.csv");
    writeFileSync(path, "y1,y2,y3,u1,u2,u3\n0,0,0,1,1,1\n");
    expect(() => radialAverage(path)).toThrow();
  });

  it("is deterministic", () => {
    const a = join(outDir(), "a.svg");
    const b = join(outDir(), "b.svg");
    plotProfiles([join(FIXTURES, "profile_00.csv")], a);
    plotProfiles([join(FIXTURES, "profile_00.csv")], b);
    expect(readFileSync(a, "utf8")).toBe(readFileSync(b, "utf8"));
  });
});
