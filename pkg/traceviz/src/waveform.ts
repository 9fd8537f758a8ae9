/**
 * Stacked waveform panels from a trace CSV.
 *
 * Digital lanes draw 0/1 levels as a step trace; stretches at the
 * metastable level are drawn as a red shaded band across the lane, the
 * same convention the circuit figures use for potential in-/metastability.
 * The fill and pointer-offset panels are plain line plots.
 */

import {
  TraceTable,
  Ternary,
  flagColumns,
  numericColumn,
  parseCsv,
  ternaryColumn,
  windowIndexes,
} from "./csv.js";
import {
  LinearScale,
  decimateIndexes,
  document as svgDoc,
  el,
  extent,
  fmt,
  polylinePath,
  text,
} from "./svg.js";

export type Panel = "flags" | "clocks" | "modes" | "fill" | "pointer_offset";

export const ALL_PANELS: Panel[] = ["flags", "clocks", "modes", "fill", "pointer_offset"];
export const DEFAULT_PANELS: Panel[] = ["flags", "clocks", "modes"];

export interface WaveformSpec {
  panels: Panel[];
  /** time window in ps, inclusive */
  window?: [number, number];
  width?: number;
}

const COLORS = {
  metastable: "#d62728",
  sender: "#d62728",
  receiver: "#1f77b4",
  cell0: "#9467bd",
  cell1: "#2ca02c",
  line: "#333333",
  grid: "#dddddd",
};

const LANE_H = 26;
const LANE_GAP = 10;
const PANEL_TITLE_H = 22;
const PANEL_GAP = 14;
const MARGIN_L = 86;
const MARGIN_R = 16;
const MARGIN_T = 10;
const AXIS_H = 34;
const LINE_PANEL_H = 110;

interface Lane {
  label: string;
  color: string;
  values: Ternary[];
}

function digitalLane(
  lane: Lane,
  time: number[],
  x: LinearScale,
  yTop: number,
): string {
  const yLo = yTop + LANE_H - 4;
  const yHi = yTop + 4;
  const parts: string[] = [
    text(MARGIN_L - 8, yTop + LANE_H / 2 + 4, lane.label, {
      "text-anchor": "end",
      "font-size": 11,
    }),
  ];
  // red bands for metastable stretches
  let i = 0;
  while (i < lane.values.length) {
    if (lane.values[i] === "x") {
      let j = i;
      while (j + 1 < lane.values.length && lane.values[j + 1] === "x") {
        j++;
      }
      const x0 = x.map(time[i]);
      const x1 = x.map(time[Math.min(j + 1, time.length - 1)]);
      parts.push(
        el("rect", {
          x: x0,
          y: yHi,
          width: Math.max(x1 - x0, 0.5),
          height: yLo - yHi,
          fill: COLORS.metastable,
          "fill-opacity": 0.35,
          class: "metastable-band",
        }),
      );
      i = j + 1;
    } else {
      i++;
    }
  }
  // step trace over stable stretches
  let d = "";
  let pen = false;
  for (let k = 0; k < lane.values.length; k++) {
    const v = lane.values[k];
    if (v === "x") {
      pen = false;
      continue;
    }
    const y = v === "1" ? yHi : yLo;
    const px = x.map(time[k]);
    if (!pen) {
      d += `M${fmt(px)},${fmt(y)}`;
      pen = true;
    } else {
      const prev = lane.values[k - 1];
      if (prev !== "x" && prev !== v) {
        d += `L${fmt(px)},${fmt(prev === "1" ? yHi : yLo)}`;
      }
      d += `L${fmt(px)},${fmt(y)}`;
    }
  }
  if (d) {
    parts.push(el("path", { d, fill: "none", stroke: lane.color, "stroke-width": 1.3 }));
  }
  return parts.join("");
}

const MAX_LINE_POINTS = 8000;

function linePanel(
  label: string,
  time: number[],
  values: number[],
  x: LinearScale,
  yTop: number,
  color: string,
): string {
  let [lo, hi] = extent(values);
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.08 * (hi - lo);
  const y = new LinearScale(lo - pad, hi + pad, yTop + LINE_PANEL_H, yTop);
  const parts: string[] = [];
  for (const tick of [lo, (lo + hi) / 2, hi]) {
    const py = y.map(tick);
    parts.push(
      el("line", { x1: x.r0, y1: py, x2: x.r1, y2: py, stroke: COLORS.grid }),
      text(MARGIN_L - 8, py + 3, tick.toFixed(2), { "text-anchor": "end", "font-size": 10 }),
    );
  }
  const keep = decimateIndexes(time.length, MAX_LINE_POINTS);
  parts.push(
    el("path", {
      d: polylinePath(keep.map((k) => x.map(time[k])), keep.map((k) => y.map(values[k]))),
      fill: "none",
      stroke: color,
      "stroke-width": 1.3,
    }),
    text(MARGIN_L - 8, yTop - 6, label, { "text-anchor": "end", "font-size": 11 }),
  );
  return parts.join("");
}

function panelLanes(table: TraceTable, panel: Panel, idx: number[]): Lane[] {
  const pick = (name: string) => {
    const col = ternaryColumn(table, name);
    return idx.map((i) => col[i]);
  };
  if (panel === "flags") {
    const flags = flagColumns(table);
    if (flags.length === 0) {
      throw new Error("missing column F_0");
    }
    const palette = [COLORS.cell0, COLORS.cell1, "#ff7f0e", "#17becf"];
    return flags.map((name, i) => ({
      label: name,
      color: palette[i % palette.length],
      values: pick(name),
    }));
  }
  if (panel === "clocks") {
    return [
      { label: "clk_snd", color: COLORS.sender, values: pick("clk_snd") },
      { label: "clk_rcv", color: COLORS.receiver, values: pick("clk_rcv") },
    ];
  }
  // modes
  return [
    { label: "md_snd", color: COLORS.sender, values: pick("md_snd") },
    { label: "md_rcv", color: COLORS.receiver, values: pick("md_rcv") },
  ];
}

const PANEL_TITLES: Record<Panel, string> = {
  flags: "full/empty flags",
  clocks: "clock signals",
  modes: "mode signals",
  fill: "fill level [cells]",
  pointer_offset: "pointer offset [cells]",
};

export function renderWaveforms(csvText: string, spec: WaveformSpec): string {
  if (spec.panels.length === 0) {
    throw new Error("no panels requested");
  }
  for (const p of spec.panels) {
    if (!ALL_PANELS.includes(p)) {
      throw new Error(`unknown panel ${p}`);
    }
  }
  const table = parseCsv(csvText);
  const timeAll = numericColumn(table, "time_ps");
  const idx = windowIndexes(timeAll, spec.window);
  const time = idx.map((i) => timeAll[i]);

  const width = spec.width ?? 1000;
  const x = new LinearScale(time[0], time[time.length - 1], MARGIN_L, width - MARGIN_R);

  const children: string[] = [];
  let y = MARGIN_T;
  for (const panel of spec.panels) {
    children.push(text(MARGIN_L, y + 14, PANEL_TITLES[panel], {
      "font-size": 13,
      "font-weight": "bold",
    }));
    y += PANEL_TITLE_H;
    if (panel === "fill" || panel === "pointer_offset") {
      const name = panel === "fill" ? "fill" : "p_offset";
      const col = numericColumn(table, name);
      children.push(linePanel(PANEL_TITLES[panel], time, idx.map((i) => col[i]), x, y,
                              COLORS.line));
      y += LINE_PANEL_H + PANEL_GAP;
    } else {
      for (const lane of panelLanes(table, panel, idx)) {
        children.push(digitalLane(lane, time, x, y));
        y += LANE_H + LANE_GAP;
      }
      y += PANEL_GAP;
    }
  }
  // time axis
  const axisY = y + 4;
  children.push(el("line", { x1: x.r0, y1: axisY, x2: x.r1, y2: axisY, stroke: COLORS.line }));
  for (const tick of x.ticks(8)) {
    const px = x.map(tick);
    children.push(
      el("line", { x1: px, y1: axisY, x2: px, y2: axisY + 4, stroke: COLORS.line }),
      text(px, axisY + 16, `${(tick / 1000).toFixed(1)}`, { "text-anchor": "middle", "font-size": 10 }),
    );
  }
  children.push(text((x.r0 + x.r1) / 2, axisY + 30, "time [ns]", {
    "text-anchor": "middle",
    "font-size": 11,
  }));
  return svgDoc(width, axisY + AXIS_H, children);
}
