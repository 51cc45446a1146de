import fs from "node:fs";

import { groupBy, loadRows, type Row } from "./csv.js";

function markdownTable(header: string[], body: string[][]): string {
  const lines = [
    `| ${header.join(" | ")} |`,
    `|${header.map(() => " --- ").join("|")}|`,
    ...body.map((row) => `| ${row.join(" | ")} |`),
  ];
  return lines.join("\n") + "\n";
}

/**
 * Pivot harness rows into one markdown grid per N: a (K, rho, M) row for
 * each operating point, one column per algorithm, and a success / FNR /
 * FPR triplet in each cell. Cells are the CSV strings untouched; nothing
 * is reparsed or reformatted, so the table round-trips the file exactly.
 * Rows and columns appear in first-appearance order; a rerun of the same
 * operating point overwrites its cell.
 */
export function renderTables(csvPath: string): string {
  const rows = loadRows(csvPath);
  let out = "Each cell: success probability / FNR / FPR.\n";
  for (const [n, group] of groupBy(rows, "N")) {
    const algos: string[] = [];
    const keys: string[] = [];
    const cells = new Map<string, Map<string, string>>();
    for (const row of group) {
      const key = `${row.K}|${row.rho}|${row.M}`;
      if (!cells.has(key)) {
        keys.push(key);
        cells.set(key, new Map());
      }
      if (!algos.includes(row.algorithm)) {
        algos.push(row.algorithm);
      }
      cells.get(key)!.set(row.algorithm, `${row.success_rate} / ${row.fnr} / ${row.fpr}`);
    }
    const body = keys.map((key) => {
      const [k, rho, m] = key.split("|");
      const byAlgo = cells.get(key)!;
      return [k, rho, m, ...algos.map((a) => byAlgo.get(a) ?? "-")];
    });
    out += `\n## N = ${n}\n\n`;
    out += markdownTable(["K", "rho", "M", ...algos], body);
  }
  return out;
}

/** Render and either print to stdout or write to a file. */
export function renderTableCommand(csvPath: string, outPath?: string): void {
  const text = renderTables(csvPath);
  if (outPath === undefined) {
    process.stdout.write(text);
  } else {
    fs.writeFileSync(outPath, text, "utf8");
  }
}
