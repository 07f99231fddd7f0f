import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  renderCurvesFigure,
  renderSweepFigure,
  renderTrajectoryFigure,
} from "../src/render.js";
import {
  parseCurvesCsv,
  parseSummaryCsv,
  parseTrajectoryCsv,
} from "../src/schema.js";

const fixture = (name: string) =>
  readFileSync(join(__dirname, "fixtures", name), "utf-8");

describe("trajectory figure", () => {
  const rows = parseTrajectoryCsv(fixture("trajectory.csv"));

  it("renders one step series per run", () => {
    const svg = renderTrajectoryFigure(rows);
    expect(svg.startsWith("<svg")).toBe(true);
    const runs = new Set(rows.map((r) => `${r.instanceId}/${r.algorithm}/${r.seed}`));
    const paths = svg.match(/<path /g) ?? [];
    expect(paths.length).toBe(runs.size);
    expect(svg).toContain("incumbent value");
  });

  it("is deterministic", () => {
    expect(renderTrajectoryFigure(rows)).toBe(renderTrajectoryFigure(rows));
  });

  it("honors the x-field override", () => {
    const svg = renderTrajectoryFigure(rows, { xField: "oracle_calls" });
    expect(svg).toContain("oracle_calls");
  });

  it("refuses to render nothing", () => {
    expect(() => renderTrajectoryFigure([])).toThrow(/no trajectory rows/);
  });
});

describe("curves figure", () => {
  const rows = parseCurvesCsv(fixture("curves.csv"));

  it("renders three series per p value", () => {
    const svg = renderCurvesFigure(rows);
    const ps = new Set(rows.map((r) => r.p));
    const paths = svg.match(/<path /g) ?? [];
    expect(paths.length).toBe(3 * ps.size);
    expect(svg).toContain("success probability");
  });

  it("is deterministic", () => {
    expect(renderCurvesFigure(rows)).toBe(renderCurvesFigure(rows));
  });

  it("refuses to render nothing", () => {
    expect(() => renderCurvesFigure([])).toThrow(/no curve rows/);
  });
});

describe("sweep figure", () => {
  const rows = parseSummaryCsv(fixture("summary.csv"));

  it("renders a line over look-ahead depth", () => {
    const svg = renderSweepFigure(rows);
    expect(svg).toContain("look-ahead depth");
    expect(svg).toContain("cycles to best incumbent");
  });

  it("is deterministic", () => {
    expect(renderSweepFigure(rows)).toBe(renderSweepFigure(rows));
  });
});
