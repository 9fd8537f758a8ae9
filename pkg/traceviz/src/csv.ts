/**
 * Parsers for the simulator's exported CSV formats.
 *
 * The trace CSV contract: columns time_ps, clk_snd, clk_rcv, c_s_cycles,
 * c_r_cycles, md_snd, md_rcv, F_0..F_{N-1}, fill, p_offset; ternary values
 * encoded as the characters 0/1/x.  The sweep summary has one row per
 * initial offset; the optional curves file is long-format
 * (offset_ps, time_ps, pointer_gap).
 */

export type Ternary = "0" | "1" | "x";

export interface TraceTable {
  columns: string[];
  /** column name -> raw string values */
  raw: Map<string, string[]>;
  rows: number;
}

export function parseCsv(text: string): TraceTable {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  const columns = lines[0].split(",");
  if (columns.length < 2) {
    throw new Error("malformed CSV: single-column header");
  }
  const raw = new Map<string, string[]>(columns.map((c) => [c, []]));
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new Error(`malformed CSV: row ${i} has ${parts.length} fields, expected ${columns.length}`);
    }
    for (let j = 0; j < columns.length; j++) {
      raw.get(columns[j])!.push(parts[j]);
    }
  }
  return { columns, raw, rows: lines.length - 1 };
}

export function numericColumn(table: TraceTable, name: string): number[] {
  const col = table.raw.get(name);
  if (!col) {
    throw new Error(`missing column ${name}`);
  }
  return col.map((v, i) => {
    const x = Number(v);
    if (Number.isNaN(x)) {
      throw new Error(`non-numeric value ${v} in column ${name} row ${i}`);
    }
    return x;
  });
}

export function ternaryColumn(table: TraceTable, name: string): Ternary[] {
  const col = table.raw.get(name);
  if (!col) {
    throw new Error(`missing column ${name}`);
  }
  return col.map((v, i) => {
    if (v !== "0" && v !== "1" && v !== "x") {
      throw new Error(`invalid ternary value ${v} in column ${name} row ${i}`);
    }
    return v;
  });
}

export function flagColumns(table: TraceTable): string[] {
  return table.columns.filter((c) => /^F_\d+$/.test(c));
}

/** Row indexes whose time lies inside [t0, t1] (ps). */
export function windowIndexes(timePs: number[], window?: [number, number]): number[] {
  const idx: number[] = [];
  for (let i = 0; i < timePs.length; i++) {
    if (!window || (timePs[i] >= window[0] && timePs[i] <= window[1])) {
      idx.push(i);
    }
  }
  if (idx.length < 2) {
    throw new Error("time window selects fewer than two samples");
  }
  return idx;
}

export interface SweepRow {
  offsetPs: number;
  stabilizationNs: number | null;
  finalGap: number | null;
  violations: number;
  violationsPostStab: number;
  stabilized: boolean;
}

export function parseSweepSummary(text: string): SweepRow[] {
  const table = parseCsv(text);
  const need = [
    "offset_ps", "stabilization_time_ns", "final_gap_cycles",
    "violations", "violations_post_stab", "stabilized",
  ];
  for (const c of need) {
    if (!table.raw.has(c)) {
      throw new Error(`sweep summary missing column ${c}`);
    }
  }
  const rows: SweepRow[] = [];
  for (let i = 0; i < table.rows; i++) {
    const get = (c: string) => table.raw.get(c)![i];
    rows.push({
      offsetPs: Number(get("offset_ps")),
      stabilizationNs: get("stabilization_time_ns") === "" ? null : Number(get("stabilization_time_ns")),
      finalGap: get("final_gap_cycles") === "" ? null : Number(get("final_gap_cycles")),
      violations: Number(get("violations")),
      violationsPostStab: Number(get("violations_post_stab")),
      stabilized: get("stabilized") === "1",
    });
  }
  return rows;
}

export interface SweepCurve {
  offsetPs: number;
  timePs: number[];
  pointerGap: number[];
}

export function parseSweepCurves(text: string): SweepCurve[] {
  const table = parseCsv(text);
  const offs = numericColumn(table, "offset_ps");
  const times = numericColumn(table, "time_ps");
  const gaps = numericColumn(table, "pointer_gap");
  const byOffset = new Map<number, SweepCurve>();
  for (let i = 0; i < offs.length; i++) {
    let curve = byOffset.get(offs[i]);
    if (!curve) {
      curve = { offsetPs: offs[i], timePs: [], pointerGap: [] };
      byOffset.set(offs[i], curve);
    }
    curve.timePs.push(times[i]);
    curve.pointerGap.push(gaps[i]);
  }
  return [...byOffset.values()].sort((a, b) => a.offsetPs - b.offsetPs);
}
