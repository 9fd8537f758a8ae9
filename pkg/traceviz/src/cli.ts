#!/usr/bin/env node
/**
 * traceviz: render figures from simulator trace exports.
 *
 *   traceviz waveform --csv trace.csv --out fig.svg
 *            [--panels flags,clocks,modes,fill,pointer_offset]
 *            [--window t0:t1]        time window in ps
 *   traceviz sweep --csv sweep.csv [--curves curves.csv] --out fig.svg
 *
 * Exit codes: 0 success, 1 usage/parse error, 4 I/O failure.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { DEFAULT_PANELS, Panel, renderWaveforms } from "./waveform.js";
import { renderSweep } from "./sweep.js";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) {
      throw new Error(`unexpected argument ${arg}`);
    }
    const eq = arg.indexOf("=");
    if (eq >= 0) {
      flags.set(arg.slice(2, eq), arg.slice(eq + 1));
    } else {
      const val = argv[i + 1];
      if (val === undefined) {
        throw new Error(`flag ${arg} needs a value`);
      }
      flags.set(arg.slice(2), val);
      i++;
    }
  }
  return flags;
}

function need(flags: Map<string, string>, name: string): string {
  const v = flags.get(name);
  if (v === undefined) {
    throw new Error(`missing required flag --${name}`);
  }
  return v;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== "waveform" && command !== "sweep") {
    process.stderr.write(
      "usage: traceviz waveform --csv trace.csv --out fig.svg [--panels ...] [--window t0:t1]\n" +
      "       traceviz sweep --csv sweep.csv [--curves curves.csv] --out fig.svg\n",
    );
    return 1;
  }
  let flags: Map<string, string>;
  let svg: string;
  let outPath: string;
  try {
    flags = parseFlags(rest);
    outPath = need(flags, "out");
  } catch (e) {
    process.stderr.write(`error: ${(e as Error).message}\n`);
    return 1;
  }

  let csvText: string;
  let curvesText: string | undefined;
  try {
    csvText = readFileSync(need(flags, "csv"), "utf-8");
    const curvesPath = flags.get("curves");
    curvesText = curvesPath === undefined ? undefined : readFileSync(curvesPath, "utf-8");
  } catch (e) {
    process.stderr.write(`error: ${(e as Error).message}\n`);
    return (e as NodeJS.ErrnoException).code ? 4 : 1;
  }

  try {
    if (command === "waveform") {
      const panels = (flags.get("panels")?.split(",") as Panel[]) ?? DEFAULT_PANELS;
      let window: [number, number] | undefined;
      const w = flags.get("window");
      if (w !== undefined) {
        const [a, b] = w.split(":").map(Number);
        if (Number.isNaN(a) || Number.isNaN(b)) {
          throw new Error(`bad --window ${w}, expected t0:t1 in ps`);
        }
        window = [a, b];
      }
      svg = renderWaveforms(csvText, { panels, window });
    } else {
      svg = renderSweep(csvText, curvesText);
    }
  } catch (e) {
    process.stderr.write(`error: ${(e as Error).message}\n`);
    return 1;
  }

  try {
    writeFileSync(outPath, svg, "utf-8");
  } catch (e) {
    process.stderr.write(`error: ${(e as Error).message}\n`);
    return 4;
  }
  return 0;
}

const isDirect = process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (isDirect) {
  process.exit(main(process.argv.slice(2)));
}
