/** Minimal deterministic SVG string building. */

export type Attrs = Record<string, string | number>;

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function el(tag: string, attrs: Attrs, children?: string[] | string): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : esc(v)}"`)
    .join(" ");
  if (children === undefined) {
    return `<${tag} ${a}/>`;
  }
  const body = Array.isArray(children) ? children.join("") : children;
  return `<${tag} ${a}>${body}</${tag}>`;
}

export function fmt(x: number): string {
  // fixed short form keeps output byte-stable across runs
  return Number.isInteger(x) ? String(x) : x.toFixed(3);
}

export function text(x: number, y: number, s: string, attrs: Attrs = {}): string {
  return el("text", { x, y, "font-family": "sans-serif", ...attrs }, esc(s));
}

export function polylinePath(xs: number[], ys: number[]): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    parts.push(`${i ? "L" : "M"}${fmt(xs[i])},${fmt(ys[i])}`);
  }
  return parts.join("");
}

export function document(width: number, height: number, children: string[]): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">` +
    el("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }) +
    children.join("") +
    "</svg>"
  );
}

/** Loop-based min/max: spread arguments overflow the stack on big traces. */
export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

/** Even index subsampling that always keeps the final point. */
export function decimateIndexes(length: number, maxPoints: number): number[] {
  const idx: number[] = [];
  if (length <= maxPoints) {
    for (let i = 0; i < length; i++) {
      idx.push(i);
    }
    return idx;
  }
  const step = Math.ceil(length / maxPoints);
  for (let i = 0; i < length; i += step) {
    idx.push(i);
  }
  if (idx[idx.length - 1] !== length - 1) {
    idx.push(length - 1);
  }
  return idx;
}

export class LinearScale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly r0: number,
    readonly r1: number,
  ) {}

  map(x: number): number {
    if (this.d1 === this.d0) {
      return (this.r0 + this.r1) / 2;
    }
    return this.r0 + ((x - this.d0) / (this.d1 - this.d0)) * (this.r1 - this.r0);
  }

  ticks(n: number): number[] {
    const out: number[] = [];
    for (let i = 0; i <= n; i++) {
      out.push(this.d0 + ((this.d1 - this.d0) * i) / n);
    }
    return out;
  }
}
