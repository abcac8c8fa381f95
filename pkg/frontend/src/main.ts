/**
 * Batch figure generator: point it at a report directory (the output of
 * `ssns run` plus the diagnose commands) and it renders every figure
 * whose CSV is present.
 *
 *   node dist/main.js <report-dir> [out-dir]
 */

import { existsSync, mkdirSync, readdirSync } from "node:fs";
import { join } from "node:path";

import { SchemaError } from "./csv.js";
import { plotDecay } from "./decay.js";
import { plotEnergy } from "./energy.js";
import { plotScalingHeatmap } from "./heatmap.js";
import { plotProfiles } from "./profiles.js";

export function generateAll(reportDir: string, outDir: string): string[] {
  mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  const maybe = (csv: string, make: (path: string) => { outPath: string }) => {
    const path = join(reportDir, csv);
    if (existsSync(path)) written.push(make(path).outPath);
  };
  maybe("decay.csv", (p) => plotDecay(p, join(outDir, "decay.svg")));
  maybe("scaling.csv", (p) => plotScalingHeatmap(p, join(outDir, "scaling_heatmap.svg")));
  maybe("energy.csv", (p) => plotEnergy(p, join(outDir, "energy.svg")));
  const profileCsvs = readdirSync(reportDir)
    .filter((f) => /^profile_\d+\.csv$/.test(f))
    .sort()
    .map((f) => join(reportDir, f));
  if (profileCsvs.length > 0) {
    written.push(plotProfiles(profileCsvs, join(outDir, "profiles.svg")).outPath);
  }
  return written;
}

const isMain = process.argv[1]?.endsWith("main.js");
if (isMain) {
  const [reportDir, outDir] = process.argv.slice(2);
  if (!reportDir) {
    console.error("usage: node dist/main.js <report-dir> [out-dir]");
    process.exit(1);
  }
  try {
    const files = generateAll(reportDir, outDir ?? reportDir);
    if (files.length === 0) {
      console.error(`no known report CSVs found in ${reportDir}`);
      process.exit(1);
    }
    for (const f of files) console.log(`wrote ${f}`);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      process.exit(1);
    }
    throw err;
  }
}
