import fs from "node:fs";
import path from "node:path";

import { groupBy, loadRows, numeric, type Row } from "./csv.js";
import { renderChart, type Series } from "./svg.js";

export interface PanelOptions {
  /** Threshold axis range; defaults to [-2, 2]. */
  tauMin?: number;
  tauMax?: number;
}

export const PANEL_FILES = [
  "success-vs-tau.svg",
  "fnr-vs-fpr.svg",
  "fnr-vs-tau.svg",
  "fpr-vs-tau.svg",
] as const;

function seriesOf(
  byAlgo: Map<string, Row[]>,
  csvPath: string,
  xCol: string,
  yCol: string,
): Series[] {
  const out: Series[] = [];
  for (const [algo, rows] of byAlgo) {
    const points = rows.map(
      (r) => [numeric(r, xCol, csvPath), numeric(r, yCol, csvPath)] as [number, number],
    );
    out.push({ label: algo, points });
  }
  return out;
}

/**
 * Render the four threshold-sweep panels from a sweep CSV, one curve per
 * algorithm: success vs tau, FNR vs FPR (parametric in tau, each point is
 * one tau value), FNR vs tau, and FPR vs tau. Returns the written paths.
 */
export function renderTauPanels(
  csvPath: string,
  outDir: string,
  opts: PanelOptions = {},
): string[] {
  const rows = loadRows(csvPath);
  const byAlgo = groupBy(rows, "algorithm");
  // plot order must not depend on row order within an algorithm
  for (const algoRows of byAlgo.values()) {
    algoRows.sort((a, b) => numeric(a, "tau", csvPath) - numeric(b, "tau", csvPath));
  }
  const tauRange: [number, number] = [opts.tauMin ?? -2, opts.tauMax ?? 2];

  const panels: Array<[string, Series[], Parameters<typeof renderChart>[1]]> = [
    [
      PANEL_FILES[0],
      seriesOf(byAlgo, csvPath, "tau", "success_rate"),
      { title: "Success probability vs threshold", xLabel: "tau", yLabel: "success probability", xRange: tauRange },
    ],
    [
      PANEL_FILES[1],
      seriesOf(byAlgo, csvPath, "fpr", "fnr"),
      { title: "False-negative rate vs false-positive rate", xLabel: "false-positive rate", yLabel: "false-negative rate" },
    ],
    [
      PANEL_FILES[2],
      seriesOf(byAlgo, csvPath, "tau", "fnr"),
      { title: "False-negative rate vs threshold", xLabel: "tau", yLabel: "false-negative rate", xRange: tauRange },
    ],
    [
      PANEL_FILES[3],
      seriesOf(byAlgo, csvPath, "tau", "fpr"),
      { title: "False-positive rate vs threshold", xLabel: "tau", yLabel: "false-positive rate", xRange: tauRange },
    ],
  ];

  fs.mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const [name, series, chartOpts] of panels) {
    const file = path.join(outDir, name);
    fs.writeFileSync(file, renderChart(series, chartOpts), "utf8");
    written.push(file);
  }
  return written;
}
