import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { renderSweep } from "../src/sweep.js";

const sweepText = readFileSync(new URL("../fixtures/sweep.csv", import.meta.url), "utf-8");
const curvesText = readFileSync(new URL("../fixtures/sweep_curves.csv", import.meta.url), "utf-8");

describe("sweep rendering", () => {
  it("renders overlaid curves plus the stabilization bar chart", () => {
    const svg = renderSweep(sweepText, curvesText);
    expect(svg.startsWith("<svg")).toBe(true);
    const curves = svg.match(/sweep-curve/g) ?? [];
    expect(curves.length).toBe(5);
    const bars = svg.match(/stab-bar/g) ?? [];
    expect(bars.length).toBe(5);
    expect(svg).toContain("pointer separation");
    expect(svg).toContain("time to stabilization");
  });

  it("renders the bar chart alone without a curves file", () => {
    const svg = renderSweep(sweepText);
    expect((svg.match(/stab-bar/g) ?? []).length).toBe(5);
    expect(svg).not.toContain("sweep-curve");
  });

  it("handles a single-offset sweep", () => {
    const lines = sweepText.trim().split("\n");
    const one = lines.slice(0, 2).join("\n") + "\n";
    const svg = renderSweep(one);
    expect((svg.match(/stab-bar/g) ?? []).length).toBe(1);
  });

  it("handles flat curves", () => {
    const flat =
      "offset_ps,time_ps,pointer_gap\n" +
      [0, 100, 200, 300].map((t) => `0.000,${t}.000,1.000000000`).join("\n") + "\n";
    const svg = renderSweep(sweepText, flat);
    expect((svg.match(/sweep-curve/g) ?? []).length).toBe(1);
  });

  it("is deterministic", () => {
    expect(renderSweep(sweepText, curvesText)).toBe(renderSweep(sweepText, curvesText));
  });

  it("handles very long curves without exhausting the stack", () => {
    const lines = ["offset_ps,time_ps,pointer_gap"];
    for (const off of [0, 50]) {
      for (let i = 0; i < 300_000; i++) {
        lines.push(`${off}.000,${i * 8}.000,${(Math.sin(i / 5000) * 1.1).toFixed(6)}`);
      }
    }
    const svg = renderSweep(sweepText, lines.join("\n") + "\n");
    expect((svg.match(/sweep-curve/g) ?? []).length).toBe(2);
    // curves are decimated for rendering: bounded output size
    expect(svg.length).toBeLessThan(1_000_000);
  });

  it("rejects malformed inputs", () => {
    expect(() => renderSweep("offset_ps\n1\n")).toThrow();
    expect(() => renderSweep(sweepText, "a,b\n1\n")).toThrow();
    expect(() => renderSweep("offset_ps,stabilization_time_ns,final_gap_cycles,violations,violations_post_stab,stabilized\n"))
      .toThrow(/no rows/);
  });
});
