/**
 * Figure renderers.  Each figure consumes CSV files produced by the
 * simulator CLI (never recomputing any dynamics) and returns a standalone
 * SVG document string.
 *
 *   fig2  one locus CSV      Bloch-plane locus with reference curves
 *   fig3  1..n trajectory CSVs  angle vs time traces
 *   fig4  one trajectory CSV    path on the Bloch circle plus averaged-state star
 *   fig5  three locus CSVs      nested loci for increasing delay
 *   fig6  one trajectory CSV    angle vs time as dots (equatorial hopping)
 *   fig7  one scan CSV          purity vs delay, simulation against the linear law
 */

import { CsvTable, SchemaMismatchError, readCsv, requireColumns } from "./csv.js";
import { document, dots, errorBars, extent, frame, polyline, star, Frame } from "./svg.js";

export type FigureId = "fig2" | "fig3" | "fig4" | "fig5" | "fig6" | "fig7";

export interface FigureSpec {
  figure: FigureId;
  csvPaths: string[];
}

const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

function expectCount(spec: FigureSpec, n: number | [number, number]): void {
  const [lo, hi] = Array.isArray(n) ? n : [n, n];
  if (spec.csvPaths.length < lo || spec.csvPaths.length > hi) {
    throw new SchemaMismatchError(
      `${spec.figure} needs ${lo === hi ? lo : `${lo}..${hi}`} CSV file(s), got ${spec.csvPaths.length}`,
    );
  }
}

/** Unit circle of pure states in the x-z plane. */
function unitCircle(f: Frame): string {
  const xs: number[] = [];
  const zs: number[] = [];
  for (let k = 0; k <= 256; k++) {
    const a = (2 * Math.PI * k) / 256;
    xs.push(Math.cos(a));
    zs.push(Math.sin(a));
  }
  return polyline(f, xs, zs, 'class="unit-circle" stroke="#888" stroke-dasharray="4 3"');
}

/**
 * Stationary locus of the driven atom without feedback: the ellipse
 * x^2 + 2 (z + 1/2)^2 = 1/2 in the lower half plane (a fixed reference
 * curve; the simulator owns its derivation).
 */
function noFeedbackEllipse(f: Frame): string {
  const xs: number[] = [];
  const zs: number[] = [];
  for (let k = 0; k <= 256; k++) {
    const a = (2 * Math.PI * k) / 256;
    xs.push(Math.SQRT1_2 * Math.cos(a));
    zs.push(-0.5 + 0.5 * Math.sin(a));
  }
  return polyline(f, xs, zs, 'class="no-feedback-ellipse" stroke="#bbb" stroke-dasharray="2 3"');
}

function blochPlaneFrame(title: string): Frame {
  return frame([-1.25, 1.25], [-1.25, 1.25], {
    square: true,
    xLabel: "x",
    yLabel: "z",
    title,
  });
}

function renderLoci(tables: CsvTable[], title: string): string {
  const f = blochPlaneFrame(title);
  f.body.push(unitCircle(f));
  f.body.push(noFeedbackEllipse(f));
  tables.forEach((table, i) => {
    const cols = requireColumns(table, ["theta0", "x_avg", "z_avg", "purity", "purity_err"]);
    const color = SERIES_COLORS[i % SERIES_COLORS.length];
    const tau = table.header["tau"] ?? "?";
    f.body.push(
      `<g class="series" data-tau="${tau}">` +
        dots(f, cols.x_avg, cols.z_avg, 3.5, `fill="${color}"`) +
        "</g>",
    );
    f.body.push(
      `<text x="${f.width - 150}" y="${40 + 16 * i}" font-size="12" fill="${color}">tau=${tau}</text>`,
    );
  });
  return document(f);
}

function renderFig2(spec: FigureSpec): string {
  expectCount(spec, 1);
  return renderLoci([readCsv(spec.csvPaths[0])], "Time-averaged locus, instantaneous feedback");
}

function renderFig5(spec: FigureSpec): string {
  expectCount(spec, 3);
  return renderLoci(spec.csvPaths.map(readCsv), "Time-averaged loci for increasing delay");
}

function renderFig3(spec: FigureSpec): string {
  expectCount(spec, [1, 4]);
  const tables = spec.csvPaths.map(readCsv);
  const series = tables.map((t) => requireColumns(t, ["t", "theta"]));
  const allT = series.flatMap((s) => s.t);
  const allTheta = series.flatMap((s) => s.theta);
  const f = frame(extent(allT, 0), extent(allTheta), {
    xLabel: "t (units of 1/gamma)",
    yLabel: "theta",
    title: "Conditioned angle trajectories",
  });
  series.forEach((s, i) => {
    const tau = tables[i].header["tau"] ?? "?";
    f.body.push(
      `<g class="series" data-tau="${tau}">` +
        polyline(f, s.t, s.theta, `stroke="${SERIES_COLORS[i % SERIES_COLORS.length]}" stroke-width="1"`) +
        "</g>",
    );
    f.body.push(
      `<text x="${f.width - 150}" y="${40 + 16 * i}" font-size="12" fill="${SERIES_COLORS[i % SERIES_COLORS.length]}">tau=${tau}</text>`,
    );
  });
  return document(f);
}

function renderFig4(spec: FigureSpec): string {
  expectCount(spec, 1);
  const table = readCsv(spec.csvPaths[0]);
  const cols = requireColumns(table, ["t", "x", "z"]);
  const f = blochPlaneFrame("Trajectory on the Bloch circle with averaged state");
  f.body.push(unitCircle(f));
  f.body.push(
    `<g class="series">` +
      polyline(f, cols.x, cols.z, 'stroke="#1f77b4" stroke-width="0.8" opacity="0.7"') +
      "</g>",
  );
  // time-averaged state over the final 80% of the record (transient dropped)
  const start = Math.floor(cols.t.length * 0.2);
  let mx = 0;
  let mz = 0;
  for (let i = start; i < cols.t.length; i++) {
    mx += cols.x[i];
    mz += cols.z[i];
  }
  const n = cols.t.length - start;
  f.body.push(star(f, mx / n, mz / n, 9, 'fill="#d62728" stroke="#7f0000"'));
  return document(f);
}

function renderFig6(spec: FigureSpec): string {
  expectCount(spec, 1);
  const table = readCsv(spec.csvPaths[0]);
  const cols = requireColumns(table, ["t", "theta"]);
  const f = frame(extent(cols.t, 0), extent(cols.theta), {
    xLabel: "t (units of 1/gamma)",
    yLabel: "theta",
    title: "Equatorial target: hopping between fixed points",
  });
  f.body.push(`<g class="series">` + dots(f, cols.t, cols.theta, 1.2, 'fill="#1f77b4"') + "</g>");
  return document(f);
}

function renderFig7(spec: FigureSpec): string {
  expectCount(spec, 1);
  const table = readCsv(spec.csvPaths[0]);
  const cols = requireColumns(table, ["tau", "purity_sim", "purity_err", "purity_analytic"]);
  const f = frame(extent([0, ...cols.tau], 0.02), extent([0, 1, ...cols.purity_sim], 0.02), {
    xLabel: "delay tau (units of 1/gamma)",
    yLabel: "purity of the averaged state",
    title: "Purity against feedback delay",
  });
  const ana = cols.tau
    .map((t, i) => [t, cols.purity_analytic[i]] as const)
    .filter(([, p]) => Number.isFinite(p));
  f.body.push(
    polyline(f, ana.map(([t]) => t), ana.map(([, p]) => p), 'class="analytic" stroke="#444" stroke-width="1.5"'),
  );
  f.body.push(errorBars(f, cols.tau, cols.purity_sim, cols.purity_err, 'stroke="#d62728"'));
  f.body.push(`<g class="series">` + dots(f, cols.tau, cols.purity_sim, 3, 'fill="#d62728"') + "</g>");
  f.body.push(`<text x="${f.width - 190}" y="40" font-size="12" fill="#444">analytic 1 - 4*gamma*tau</text>`);
  f.body.push(`<text x="${f.width - 190}" y="56" font-size="12" fill="#d62728">simulation</text>`);
  return document(f);
}

const RENDERERS: Record<FigureId, (spec: FigureSpec) => string> = {
  fig2: renderFig2,
  fig3: renderFig3,
  fig4: renderFig4,
  fig5: renderFig5,
  fig6: renderFig6,
  fig7: renderFig7,
};

export function render(spec: FigureSpec): string {
  const renderer = RENDERERS[spec.figure];
  if (!renderer) {
    throw new SchemaMismatchError(`unknown figure id: ${spec.figure}`);
  }
  return renderer(spec);
}
