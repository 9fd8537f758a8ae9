export {
  parseCsv,
  numericColumn,
  ternaryColumn,
  flagColumns,
  windowIndexes,
  parseSweepSummary,
  parseSweepCurves,
} from "./csv.js";
export type { TraceTable, Ternary, SweepRow, SweepCurve } from "./csv.js";
export { renderWaveforms, ALL_PANELS, DEFAULT_PANELS } from "./waveform.js";
export type { Panel, WaveformSpec } from "./waveform.js";
export { renderSweep } from "./sweep.js";
