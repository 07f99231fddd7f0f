import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { run } from "../src/cli.js";

const fixtures = join(__dirname, "fixtures");
const scratch = () => mkdtempSync(join(tmpdir(), "cbqs-figures-"));

describe("cli", () => {
  it("renders the trajectory fixture", () => {
    const out = join(scratch(), "t.svg");
    const code = run([
      "--kind", "trajectory",
      "--input", join(fixtures, "trajectory.csv"),
      "--output", out,
    ]);
    expect(code).toBe(0);
    expect(readFileSync(out, "utf-8")).toContain("<svg");
  });

  it("produces identical bytes across runs", () => {
    const dir = scratch();
    const a = join(dir, "a.svg");
    const b = join(dir, "b.svg");
    for (const out of [a, b]) {
      expect(
        run(["--kind", "curves", "--input", join(fixtures, "curves.csv"), "--output", out]),
      ).toBe(0);
    }
    expect(readFileSync(a, "utf-8")).toBe(readFileSync(b, "utf-8"));
  });

  it("renders the sweep fixture", () => {
    const out = join(scratch(), "s.svg");
    expect(
      run(["--kind", "sweep", "--input", join(fixtures, "summary.csv"), "--output", out]),
    ).toBe(0);
    expect(existsSync(out)).toBe(true);
  });

  it("fails loudly on schema drift and writes nothing", () => {
    const dir = scratch();
    const drifted = join(dir, "drift.csv");
    writeFileSync(
      drifted,
      readFileSync(join(fixtures, "trajectory.csv"), "utf-8").replace("cycles", "cyc"),
    );
    const out = join(dir, "never.svg");
    expect(run(["--kind", "trajectory", "--input", drifted, "--output", out])).toBe(1);
    expect(existsSync(out)).toBe(false);
  });

  it("fails on an empty csv without writing", () => {
    const dir = scratch();
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "");
    const out = join(dir, "never.svg");
    expect(run(["--kind", "curves", "--input", empty, "--output", out])).toBe(1);
    expect(existsSync(out)).toBe(false);
  });

  it("rejects unknown kinds", () => {
    expect(run(["--kind", "pie", "--input", "x.csv", "--output", "y.svg"])).toBe(1);
  });

  it("requires input and output", () => {
    expect(run(["--kind", "curves"])).toBe(1);
  });

  it("reports missing files as validation errors", () => {
    const out = join(scratch(), "never.svg");
    expect(run(["--kind", "curves", "--input", "/nonexistent.csv", "--output", out])).toBe(1);
  });
});
