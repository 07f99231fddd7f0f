#!/usr/bin/env node
/**
 * Render benchmark CSVs to SVG figures.
 *
 * Usage:
 *   cbqs-figures --kind trajectory --input runs.csv [more.csv ...] --output fig.svg
 *   cbqs-figures --kind curves --input curves.csv --output fig.svg [--no-logx]
 *   cbqs-figures --kind sweep --input summary.csv --output fig.svg
 *
 * Exit codes: 0 success, 1 validation/schema error, 2 unexpected failure.
 * The output file is only written after every input validated.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import {
  renderCurvesFigure,
  renderSweepFigure,
  renderTrajectoryFigure,
  TrajectoryXField,
} from "./render.js";
import {
  SchemaError,
  parseCurvesCsv,
  parseSummaryCsv,
  parseTrajectoryCsv,
} from "./schema.js";

const KINDS = ["trajectory", "curves", "sweep"] as const;

export function run(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        input: { type: "string", multiple: true },
        output: { type: "string" },
        x: { type: "string", default: "auto" },
        logx: { type: "boolean", default: false },
        "no-logx": { type: "boolean", default: false },
      },
      allowPositionals: false,
    });
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  const { kind, input, output, x } = parsed.values;
  if (!kind || !KINDS.includes(kind as (typeof KINDS)[number])) {
    console.error(`error: --kind must be one of ${KINDS.join(", ")}`);
    return 1;
  }
  if (!input || input.length === 0 || !output) {
    console.error("error: --input and --output are required");
    return 1;
  }

  try {
    const texts = input.map((path) => ({ path, text: readFileSync(path, "utf-8") }));
    let svg: string;
    if (kind === "trajectory") {
      const rows = texts.flatMap(({ path, text }) => parseTrajectoryCsv(text, path));
      svg = renderTrajectoryFigure(rows, {
        xField: x as TrajectoryXField,
        logx: parsed.values.logx,
      });
    } else if (kind === "curves") {
      const rows = texts.flatMap(({ path, text }) => parseCurvesCsv(text, path));
      svg = renderCurvesFigure(rows, { logx: !parsed.values["no-logx"] });
    } else {
      const rows = texts.flatMap(({ path, text }) => parseSummaryCsv(text, path));
      svg = renderSweepFigure(rows);
    }
    writeFileSync(output, svg);
    console.log(`wrote ${output}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    console.error(`runtime error: ${(err as Error).message}`);
    return 2;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
