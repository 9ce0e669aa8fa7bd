/**
 * Command line: render one figure from simulator CSV output.
 *
 *   node dist/cli.js --spec fig7 --csv scan.csv --out fig7.svg
 *   node dist/cli.js --spec fig5 --csv a.csv --csv b.csv --csv c.csv --out fig5.svg
 */

import { writeFileSync } from "node:fs";
import { MissingFileError, SchemaMismatchError } from "./csv.js";
import { FigureId, render } from "./figures.js";

const FIGURES: FigureId[] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

interface Args {
  spec: FigureId;
  csv: string[];
  out: string;
}

function parseArgs(argv: string[]): Args {
  let spec: string | undefined;
  let out: string | undefined;
  const csv: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`${a} needs a value`);
      return argv[i];
    };
    if (a === "--spec") spec = next();
    else if (a === "--csv") csv.push(next());
    else if (a === "--out") out = next();
    else throw new Error(`unknown argument: ${a}`);
  }
  if (!spec || !FIGURES.includes(spec as FigureId)) {
    throw new Error(`--spec must be one of ${FIGURES.join(", ")}`);
  }
  if (csv.length === 0) throw new Error("at least one --csv is required");
  if (!out) throw new Error("--out is required");
  return { spec: spec as FigureId, csv, out };
}

function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 1;
  }
  try {
    const svg = render({ figure: args.spec, csvPaths: args.csv });
    writeFileSync(args.out, svg);
    console.error(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof MissingFileError || err instanceof SchemaMismatchError) {
      console.error(`error: ${(err as Error).message}`);
      return 2;
    }
    throw err;
  }
}

process.exit(main(process.argv.slice(2)));
