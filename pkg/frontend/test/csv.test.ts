import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { MissingFileError, SchemaMismatchError, readCsv, requireColumns } from "../src/csv.js";

const FIXTURES = join(__dirname, "fixtures");

describe("readCsv", () => {
  it("parses a scan file with header, columns and numeric rows", () => {
    const t = readCsv(join(FIXTURES, "scan.csv"));
    expect(t.header["schema"]).toBe("1");
    expect(t.header["command"]).toBe("purity-scan");
    expect(t.header["seed"]).toBe("1");
    expect(t.columns).toEqual(["tau", "purity_sim", "purity_err", "purity_analytic"]);
    expect(t.rows.length).toBe(8);
    expect(t.rows[0][0]).toBeCloseTo(0.02, 12);
    expect(t.rows[0][3]).toBeCloseTo(0.92, 12);
  });

  it("raises MissingFileError for absent files", () => {
    expect(() => readCsv(join(FIXTURES, "nope.csv"))).toThrow(MissingFileError);
  });

  it("raises SchemaMismatchError for wrong schema versions", () => {
    const dir = mkdtempSync(join(tmpdir(), "csv-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "# schema=2\n# command=x\na,b\n1,2\n");
    expect(() => readCsv(bad)).toThrow(SchemaMismatchError);
    const none = join(dir, "none.csv");
    writeFileSync(none, "a,b\n1,2\n");
    expect(() => readCsv(none)).toThrow(SchemaMismatchError);
  });

  it("raises SchemaMismatchError for ragged rows", () => {
    const dir = mkdtempSync(join(tmpdir(), "csv-"));
    const bad = join(dir, "ragged.csv");
    writeFileSync(bad, "# schema=1\na,b\n1,2\n3\n");
    expect(() => readCsv(bad)).toThrow(SchemaMismatchError);
  });
});

describe("requireColumns", () => {
  it("returns named vectors", () => {
    const t = readCsv(join(FIXTURES, "scan.csv"));
    const cols = requireColumns(t, ["tau", "purity_sim"]);
    expect(cols.tau.length).toBe(8);
    expect(Math.min(...cols.purity_sim)).toBeGreaterThan(0);
  });

  it("fails loudly on a missing column", () => {
    const t = readCsv(join(FIXTURES, "scan.csv"));
    expect(() => requireColumns(t, ["tau", "no_such_column"])).toThrow(SchemaMismatchError);
  });
});
