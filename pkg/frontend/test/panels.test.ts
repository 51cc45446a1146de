import fs from "node:fs";
import os from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { CsvError, REQUIRED_COLUMNS } from "../src/csv.js";
import { PANEL_FILES, renderTauPanels } from "../src/panels.js";

const SWEEP_CSV = fileURLToPath(new URL("./fixtures/sweep.csv", import.meta.url));
const HEADER = REQUIRED_COLUMNS.join(",");

function tmpDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "figpan-"));
}

function tmpCsv(text: string): string {
  const file = path.join(tmpDir(), "in.csv");
  fs.writeFileSync(file, text, "utf8");
  return file;
}

function xticks(svg: string): string[] {
  return svg
    .split('class="xtick"')
    .slice(1)
    .map((s) => s.split(">")[1].split("<")[0]);
}

describe("renderTauPanels", () => {
  it("writes the four panels with one curve per algorithm", () => {
    const out = tmpDir();
    const written = renderTauPanels(SWEEP_CSV, out);
    expect(written.map((p) => path.basename(p))).toEqual([...PANEL_FILES]);
    for (const file of written) {
      const svg = fs.readFileSync(file, "utf8");
      // 3 algorithms in the sweep fixture, 41 grid points each
      expect(svg.match(/class="curve"/g)).toHaveLength(3);
      expect(svg.match(/class="marker"/g)).toHaveLength(123);
      for (const algo of ["bp", "rsbp", "nwrbp"]) {
        expect(svg).toContain(`class="legend" x`);
        expect(svg).toContain(`>${algo}</text>`);
      }
    }
  });

  it("fixes the threshold axis to [-2, 2] unless overridden", () => {
    const out = tmpDir();
    renderTauPanels(SWEEP_CSV, out);
    const svg = fs.readFileSync(path.join(out, "success-vs-tau.svg"), "utf8");
    expect(xticks(svg)).toEqual(["-2", "-1", "0", "1", "2"]);

    const out2 = tmpDir();
    renderTauPanels(SWEEP_CSV, out2, { tauMin: -1, tauMax: 3 });
    const svg2 = fs.readFileSync(path.join(out2, "fnr-vs-tau.svg"), "utf8");
    expect(xticks(svg2)).toEqual(["-1", "0", "1", "2", "3"]);
  });

  it("scales the parametric panel from the data instead", () => {
    const out = tmpDir();
    renderTauPanels(SWEEP_CSV, out);
    const svg = fs.readFileSync(path.join(out, "fnr-vs-fpr.svg"), "utf8");
    const labels = xticks(svg).map(Number);
    // rates live in [0, 1]; a tau axis would start at -2
    expect(Math.min(...labels)).toBeGreaterThan(-0.2);
    expect(Math.max(...labels)).toBeLessThan(1.2);
  });

  it("renders a single-tau file as marker-only plots without crashing", () => {
    const base = [
      "probabilistic", "100", "2", "40", "0.05", "ALGO", "0", "10", "10", "1",
      "0.9", "0.05", "0.002", "1", "1", "20", "480", "0.1",
    ];
    const lines = ["bp", "nwrbp"].map((algo) => base.map((v) => (v === "ALGO" ? algo : v)).join(","));
    const out = tmpDir();
    const written = renderTauPanels(tmpCsv(`${HEADER}\n${lines.join("\n")}\n`), out);
    expect(written).toHaveLength(4);
    const svg = fs.readFileSync(written[0], "utf8");
    expect(svg.match(/class="curve"/g)).toHaveLength(2);
    expect(svg.match(/class="marker"/g)).toHaveLength(2);
  });

  it("rejects a header-only file, naming it", () => {
    const file = tmpCsv(HEADER + "\n");
    let caught: unknown;
    try {
      renderTauPanels(file, tmpDir());
    } catch (err) {
      caught = err;
    }
    expect(caught).toBeInstanceOf(CsvError);
    expect(String(caught)).toContain(file);
  });

  it("creates the output directory if needed", () => {
    const out = path.join(tmpDir(), "deep", "er");
    renderTauPanels(SWEEP_CSV, out);
    expect(fs.readdirSync(out).sort()).toEqual([...PANEL_FILES].sort());
  });
});
