/**
 * Small deterministic SVG scene builder: linear scales, framed axes with
 * ticks, polylines, markers, error bars.  No DOM, no randomness -- the same
 * input always yields the identical document string.
 */

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const k = (r1 - r0) / (d1 - d0);
  const f = ((v: number) => r0 + (v - d0) * k) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

export function extent(values: number[], pad = 0.05): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!Number.isFinite(lo)) return [0, 1];
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const span = hi - lo;
  return [lo - pad * span, hi + pad * span];
}

const fmt = (v: number): string => {
  const s = v.toFixed(6);
  return s.replace(/\.?0+$/, "") || "0";
};

export function ticks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo;
  const step0 = span / Math.max(count - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const step = [1, 2, 2.5, 5, 10].map((m) => m * mag).find((s) => span / s <= count) ?? mag * 10;
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += step) out.push(Math.abs(v) < 1e-12 ? 0 : v);
  return out;
}

export interface Frame {
  x: Scale;
  y: Scale;
  width: number;
  height: number;
  body: string[];
}

export interface FrameOptions {
  width?: number;
  height?: number;
  xLabel?: string;
  yLabel?: string;
  title?: string;
  square?: boolean;
}

const MARGIN = { left: 58, right: 16, top: 30, bottom: 44 };

/** Axes, ticks and labels; callers append marks to `body`. */
export function frame(xDomain: [number, number], yDomain: [number, number], opts: FrameOptions = {}): Frame {
  const width = opts.width ?? 560;
  const height = opts.height ?? (opts.square ? 560 : 400);
  const x = linearScale(xDomain, [MARGIN.left, width - MARGIN.right]);
  const y = linearScale(yDomain, [height - MARGIN.bottom, MARGIN.top]);
  const body: string[] = [];
  const x0 = MARGIN.left;
  const x1 = width - MARGIN.right;
  const y0 = height - MARGIN.bottom;
  const y1 = MARGIN.top;
  body.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#444"/>`);
  for (const t of ticks(xDomain[0], xDomain[1])) {
    const px = x(t);
    body.push(`<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" stroke="#444"/>`);
    body.push(`<text x="${fmt(px)}" y="${y0 + 18}" text-anchor="middle" font-size="11">${fmt(t)}</text>`);
  }
  for (const t of ticks(yDomain[0], yDomain[1])) {
    const py = y(t);
    body.push(`<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="#444"/>`);
    body.push(`<text x="${x0 - 8}" y="${fmt(py + 3.5)}" text-anchor="end" font-size="11">${fmt(t)}</text>`);
  }
  if (opts.xLabel) {
    body.push(`<text x="${fmt((x0 + x1) / 2)}" y="${height - 8}" text-anchor="middle" font-size="13">${opts.xLabel}</text>`);
  }
  if (opts.yLabel) {
    const cy = (y0 + y1) / 2;
    body.push(`<text x="16" y="${fmt(cy)}" text-anchor="middle" font-size="13" transform="rotate(-90 16 ${fmt(cy)})">${opts.yLabel}</text>`);
  }
  if (opts.title) {
    body.push(`<text x="${fmt((x0 + x1) / 2)}" y="18" text-anchor="middle" font-size="14">${opts.title}</text>`);
  }
  return { x, y, width, height, body };
}

export function polyline(f: Frame, xs: number[], ys: number[], attrs: string): string {
  const pts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) {
      pts.push(`${fmt(f.x(xs[i]))},${fmt(f.y(ys[i]))}`);
    }
  }
  return `<polyline points="${pts.join(" ")}" fill="none" ${attrs}/>`;
}

export function dots(f: Frame, xs: number[], ys: number[], r: number, attrs: string): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    parts.push(`<circle cx="${fmt(f.x(xs[i]))}" cy="${fmt(f.y(ys[i]))}" r="${r}" ${attrs}/>`);
  }
  return parts.join("");
}

export function errorBars(f: Frame, xs: number[], ys: number[], errs: number[], attrs: string): string {
  const parts: string[] = [];
  const cap = 4;
  for (let i = 0; i < xs.length; i++) {
    const px = fmt(f.x(xs[i]));
    const lo = fmt(f.y(ys[i] - errs[i]));
    const hi = fmt(f.y(ys[i] + errs[i]));
    parts.push(
      `<g class="errorbar" ${attrs}>` +
        `<line x1="${px}" y1="${lo}" x2="${px}" y2="${hi}"/>` +
        `<line x1="${Number(px) - cap}" y1="${lo}" x2="${Number(px) + cap}" y2="${lo}"/>` +
        `<line x1="${Number(px) - cap}" y1="${hi}" x2="${Number(px) + cap}" y2="${hi}"/>` +
        `</g>`,
    );
  }
  return parts.join("");
}

export function star(f: Frame, x: number, y: number, size: number, attrs: string): string {
  const cx = f.x(x);
  const cy = f.y(y);
  const pts: string[] = [];
  for (let k = 0; k < 10; k++) {
    const rr = k % 2 === 0 ? size : 0.45 * size;
    const a = (Math.PI / 5) * k - Math.PI / 2;
    pts.push(`${fmt(cx + rr * Math.cos(a))},${fmt(cy + rr * Math.sin(a))}`);
  }
  return `<polygon class="star" points="${pts.join(" ")}" ${attrs}/>`;
}

export function document(f: Frame): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${f.width}" height="${f.height}" ` +
    `viewBox="0 0 ${f.width} ${f.height}" font-family="sans-serif">\n` +
    f.body.join("\n") +
    "\n</svg>\n"
  );
}
