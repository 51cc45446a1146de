import fs from "node:fs";
import os from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { afterEach, describe, expect, it, vi } from "vitest";

import { run } from "../src/cli.js";
import { REQUIRED_COLUMNS } from "../src/csv.js";
import { renderTables } from "../src/table.js";

const SWEEP_CSV = fileURLToPath(new URL("./fixtures/sweep.csv", import.meta.url));
const RUNS_CSV = fileURLToPath(new URL("./fixtures/runs.csv", import.meta.url));

function tmpDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "figcli-"));
}

afterEach(() => {
  vi.restoreAllMocks();
});

describe("tau-panels command", () => {
  it("writes four SVGs into --out-dir", () => {
    const out = tmpDir();
    expect(run(["tau-panels", SWEEP_CSV, "--out-dir", out])).toBe(0);
    expect(fs.readdirSync(out).sort()).toEqual([
      "fnr-vs-fpr.svg",
      "fnr-vs-tau.svg",
      "fpr-vs-tau.svg",
      "success-vs-tau.svg",
    ]);
  });

  it("passes the axis override through", () => {
    const out = tmpDir();
    expect(run(["tau-panels", SWEEP_CSV, "--out-dir", out, "--tau-min", "-1", "--tau-max", "1"])).toBe(0);
    const svg = fs.readFileSync(path.join(out, "success-vs-tau.svg"), "utf8");
    expect(svg).toContain(">-1</text>");
    expect(svg).not.toContain(">-2</text>");
  });

  it("rejects a non-numeric axis value", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(run(["tau-panels", SWEEP_CSV, "--tau-min", "wide"])).toBe(2);
    expect(String(err.mock.calls[0][0])).toContain("--tau-min");
  });
});

describe("table command", () => {
  it("writes markdown to --out", () => {
    const out = path.join(tmpDir(), "table.md");
    expect(run(["table", RUNS_CSV, "--out", out])).toBe(0);
    expect(fs.readFileSync(out, "utf8")).toBe(renderTables(RUNS_CSV));
  });

  it("prints to stdout without --out", () => {
    const chunks: string[] = [];
    vi.spyOn(process.stdout, "write").mockImplementation((chunk) => {
      chunks.push(String(chunk));
      return true;
    });
    expect(run(["table", RUNS_CSV])).toBe(0);
    expect(chunks.join("")).toBe(renderTables(RUNS_CSV));
  });
});

describe("error handling", () => {
  it("exits 2 on usage mistakes", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(run([])).toBe(2);
    expect(run(["resize", "x.csv"])).toBe(2);
    expect(run(["table"])).toBe(2);
    expect(run(["table", RUNS_CSV, "--volume", "11"])).toBe(2);
    expect(run(["table", RUNS_CSV, "--out"])).toBe(2);
    expect(run(["table", RUNS_CSV, "extra.csv"])).toBe(2);
    expect(err).toHaveBeenCalled();
  });

  it("exits 3 when the file cannot be read, naming it", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(run(["table", "/no/such.csv"])).toBe(3);
    expect(String(err.mock.calls[0][0])).toContain("/no/such.csv");
  });

  it("exits 3 on a missing column, naming the column", () => {
    const cols = REQUIRED_COLUMNS.filter((c) => c !== "success_rate");
    const file = path.join(tmpDir(), "bad.csv");
    fs.writeFileSync(file, cols.join(",") + "\n" + cols.map(() => "1").join(",") + "\n", "utf8");
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(run(["tau-panels", file, "--out-dir", tmpDir()])).toBe(3);
    expect(String(err.mock.calls[0][0])).toContain("missing column success_rate");
  });
});
