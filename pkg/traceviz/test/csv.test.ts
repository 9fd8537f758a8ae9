import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  flagColumns,
  numericColumn,
  parseCsv,
  parseSweepCurves,
  parseSweepSummary,
  ternaryColumn,
  windowIndexes,
} from "../src/csv.js";

const waveformText = readFileSync(new URL("../fixtures/waveform.csv", import.meta.url), "utf-8");
const sweepText = readFileSync(new URL("../fixtures/sweep.csv", import.meta.url), "utf-8");
const curvesText = readFileSync(new URL("../fixtures/sweep_curves.csv", import.meta.url), "utf-8");

describe("trace CSV parsing", () => {
  it("reads the documented column layout", () => {
    const table = parseCsv(waveformText);
    expect(table.columns.slice(0, 7)).toEqual([
      "time_ps", "clk_snd", "clk_rcv", "c_s_cycles", "c_r_cycles", "md_snd", "md_rcv",
    ]);
    expect(flagColumns(table)).toEqual(["F_0", "F_1"]);
    expect(table.columns[table.columns.length - 2]).toBe("fill");
    expect(table.columns[table.columns.length - 1]).toBe("p_offset");
    expect(table.rows).toBeGreaterThan(100);
  });

  it("parses numeric and ternary columns", () => {
    const table = parseCsv(waveformText);
    const t = numericColumn(table, "time_ps");
    expect(t[0]).toBe(0);
    expect(t[1]).toBeGreaterThan(0);
    const md = ternaryColumn(table, "md_rcv");
    expect(new Set(md).size).toBeGreaterThan(1);
    for (const v of md) {
      expect(["0", "1", "x"]).toContain(v);
    }
  });

  it("rejects missing columns", () => {
    const table = parseCsv(waveformText);
    expect(() => numericColumn(table, "nope")).toThrow(/missing column/);
    expect(() => ternaryColumn(table, "nope")).toThrow(/missing column/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1,2\n3\n")).toThrow(/malformed/);
    expect(() => parseCsv("")).toThrow(/empty/);
  });

  it("window selection needs at least two samples", () => {
    const table = parseCsv(waveformText);
    const t = numericColumn(table, "time_ps");
    expect(windowIndexes(t, [0, 100]).length).toBeGreaterThan(2);
    expect(() => windowIndexes(t, [1e12, 2e12])).toThrow(/fewer than two/);
  });
});

describe("sweep CSV parsing", () => {
  it("reads the summary rows", () => {
    const rows = parseSweepSummary(sweepText);
    expect(rows.length).toBe(5);
    expect(rows.map((r) => r.offsetPs)).toEqual([-120, -60, 0, 60, 120]);
    for (const r of rows) {
      expect(r.stabilized).toBe(true);
      expect(r.violationsPostStab).toBe(0);
    }
  });

  it("groups curves by offset", () => {
    const curves = parseSweepCurves(curvesText);
    expect(curves.length).toBe(5);
    for (const c of curves) {
      expect(c.timePs.length).toBe(c.pointerGap.length);
      expect(c.timePs.length).toBeGreaterThan(100);
    }
    // resolution direction flips across the equilibrium
    const first = curves[0];
    const last = curves[curves.length - 1];
    expect(first.pointerGap[first.pointerGap.length - 1]).toBeLessThan(0);
    expect(last.pointerGap[last.pointerGap.length - 1]).toBeGreaterThan(0);
  });

  it("rejects a summary without the documented columns", () => {
    expect(() => parseSweepSummary("a,b\n1,2\n")).toThrow(/missing column/);
  });
});
