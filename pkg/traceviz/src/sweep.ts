/**
 * Initialization-sweep figure: overlaid pointer-separation curves per
 * starting offset (when the curves file is supplied) above a bar chart of
 * the time each run took to stabilize.
 */

import { SweepCurve, SweepRow, parseSweepCurves, parseSweepSummary } from "./csv.js";
import {
  LinearScale,
  decimateIndexes,
  document as svgDoc,
  el,
  extent,
  polylinePath,
  text,
} from "./svg.js";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                 "#17becf", "#8c564b", "#e377c2", "#7f7f7f"];

const W = 1000;
const MARGIN_L = 70;
const MARGIN_R = 130;
const CURVES_H = 260;
const BARS_H = 180;
const GAP = 46;

const MAX_CURVE_POINTS = 4000;

function curvesPanel(curves: SweepCurve[], yTop: number): string {
  const allT = curves.flatMap((c) => [c.timePs[0], c.timePs[c.timePs.length - 1]]);
  const [t0, t1] = extent(allT);
  const x = new LinearScale(t0, t1, MARGIN_L, W - MARGIN_R);
  let lo = -1.2;
  let hi = 1.2;
  for (const c of curves) {
    const [gLo, gHi] = extent(c.pointerGap);
    lo = Math.min(lo, gLo);
    hi = Math.max(hi, gHi);
  }
  const y = new LinearScale(lo, hi, yTop + CURVES_H, yTop);

  const parts: string[] = [
    text(MARGIN_L, yTop - 8, "pointer separation p_s - p_r over time", {
      "font-size": 13, "font-weight": "bold",
    }),
  ];
  for (const ref of [-1, 0, 1]) {
    const py = y.map(ref);
    parts.push(
      el("line", { x1: x.r0, y1: py, x2: x.r1, y2: py, stroke: "#dddddd" }),
      text(MARGIN_L - 8, py + 3, ref.toFixed(0), { "text-anchor": "end", "font-size": 10 }),
    );
  }
  curves.forEach((c, i) => {
    const color = PALETTE[i % PALETTE.length];
    const keep = decimateIndexes(c.timePs.length, MAX_CURVE_POINTS);
    parts.push(
      el("path", {
        d: polylinePath(
          keep.map((k) => x.map(c.timePs[k])),
          keep.map((k) => y.map(c.pointerGap[k])),
        ),
        fill: "none",
        stroke: color,
        "stroke-width": 1.4,
        class: "sweep-curve",
      }),
      text(W - MARGIN_R + 10, yTop + 14 + i * 16, `${c.offsetPs >= 0 ? "+" : ""}${c.offsetPs} ps`, {
        fill: color, "font-size": 11,
      }),
    );
  });
  const axisY = yTop + CURVES_H + 6;
  parts.push(el("line", { x1: x.r0, y1: axisY, x2: x.r1, y2: axisY, stroke: "#333333" }));
  for (const tick of x.ticks(6)) {
    const px = x.map(tick);
    parts.push(
      el("line", { x1: px, y1: axisY, x2: px, y2: axisY + 4, stroke: "#333333" }),
      text(px, axisY + 16, (tick / 1000).toFixed(1), { "text-anchor": "middle", "font-size": 10 }),
    );
  }
  parts.push(text((x.r0 + x.r1) / 2, axisY + 30, "time [ns]", {
    "text-anchor": "middle", "font-size": 11,
  }));
  return parts.join("");
}

function barsPanel(rows: SweepRow[], yTop: number): string {
  const stabs = rows.map((r) => r.stabilizationNs ?? 0);
  const hi = Math.max(extent(stabs)[1], 1e-9);
  const y = new LinearScale(0, hi * 1.15, yTop + BARS_H, yTop);
  const x = new LinearScale(-0.6, rows.length - 0.4, MARGIN_L, W - MARGIN_R);
  const parts: string[] = [
    text(MARGIN_L, yTop - 8, "time to stabilization per initial offset", {
      "font-size": 13, "font-weight": "bold",
    }),
  ];
  const base = y.map(0);
  rows.forEach((r, i) => {
    const cx = x.map(i);
    const bw = (x.map(1) - x.map(0)) * 0.7;
    const top = y.map(r.stabilizationNs ?? 0);
    parts.push(
      el("rect", {
        x: cx - bw / 2,
        y: top,
        width: bw,
        height: Math.max(base - top, 0.5),
        fill: r.stabilized ? PALETTE[i % PALETTE.length] : "#bbbbbb",
        class: "stab-bar",
      }),
      text(cx, base + 14, `${r.offsetPs >= 0 ? "+" : ""}${r.offsetPs}`, {
        "text-anchor": "middle", "font-size": 10,
      }),
    );
    if (r.stabilizationNs !== null) {
      parts.push(text(cx, top - 4, r.stabilizationNs.toFixed(1), {
        "text-anchor": "middle", "font-size": 9,
      }));
    }
  });
  parts.push(
    el("line", { x1: x.r0, y1: base, x2: x.r1, y2: base, stroke: "#333333" }),
    text((x.r0 + x.r1) / 2, base + 30, "initial offset [ps]", {
      "text-anchor": "middle", "font-size": 11,
    }),
    text(MARGIN_L - 8, y.map(hi) + 3, hi.toFixed(1), { "text-anchor": "end", "font-size": 10 }),
    text(MARGIN_L - 8, base + 3, "0", { "text-anchor": "end", "font-size": 10 }),
  );
  return parts.join("");
}

export function renderSweep(summaryText: string, curvesText?: string): string {
  const rows = parseSweepSummary(summaryText);
  if (rows.length === 0) {
    throw new Error("sweep summary has no rows");
  }
  const children: string[] = [];
  let y = 26;
  if (curvesText !== undefined) {
    const curves = parseSweepCurves(curvesText);
    if (curves.length === 0) {
      throw new Error("curves file has no rows");
    }
    children.push(curvesPanel(curves, y));
    y += CURVES_H + GAP + 30;
  }
  children.push(barsPanel(rows, y));
  return svgDoc(W, y + BARS_H + 50, children);
}
