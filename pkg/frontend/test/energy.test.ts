import { existsSync, mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { plotEnergy } from "../src/energy.js";
import { generateAll } from "../src/main.js";

const FIXTURES = join(__dirname, "fixtures");

describe("energy figure and batch driver", () => {
  it("renders the energy history", () => {
    const out = join(mkdtempSync(join(tmpdir(), "ssns-plots-")), "energy.svg");
    const fig = plotEnergy(join(FIXTURES, "energy.csv"), out);
    expect(existsSync(out)).toBe(true);
    // energy series is nonincreasing for the dissipative run
    const e = fig.points.map(([, v]) => v);
    for (let i = 1; i < e.length; i++) expect(e[i]).toBeLessThanOrEqual(e[i - 1] * (1 + 1e-12));
  });

  it("batch driver renders every figure the fixtures support", () => {
    const out = mkdtempSync(join(tmpdir(), "ssns-plots-"));
    const written = generateAll(FIXTURES, out);
    const names = written.map((p) => p.split("/").pop());
    expect(names).toContain("decay.svg");
    expect(names).toContain("scaling_heatmap.svg");
    expect(names).toContain("energy.svg");
    expect(names).toContain("profiles.svg");
  });
});
