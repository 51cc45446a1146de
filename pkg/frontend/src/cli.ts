#!/usr/bin/env node
import { pathToFileURL } from "node:url";

import { CsvError } from "./csv.js";
import { renderTauPanels, type PanelOptions } from "./panels.js";
import { renderTableCommand } from "./table.js";

const USAGE = `usage: figures <command> ...

commands:
  tau-panels <csv> [--out-dir DIR] [--tau-min X] [--tau-max X]
      write the four threshold-sweep panels as SVG (default DIR: figs)
  table <csv> [--out FILE]
      write pivoted markdown tables (default: stdout)`;

class UsageError extends Error {}

function parseFlags(argv: string[], spec: Record<string, boolean>): Map<string, string> {
  // spec maps flag name to whether it takes a value (all of ours do)
  const flags = new Map<string, string>();
  const positional: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg.startsWith("--")) {
      const name = arg.slice(2);
      if (!(name in spec)) {
        throw new UsageError(`unknown option --${name}`);
      }
      i += 1;
      if (i >= argv.length) {
        throw new UsageError(`--${name} needs a value`);
      }
      flags.set(name, argv[i]);
    } else {
      positional.push(arg);
    }
  }
  if (positional.length !== 1) {
    throw new UsageError("expected exactly one CSV path");
  }
  flags.set("csv", positional[0]);
  return flags;
}

function numericFlag(flags: Map<string, string>, name: string): number | undefined {
  const raw = flags.get(name);
  if (raw === undefined) {
    return undefined;
  }
  const v = Number(raw);
  if (!Number.isFinite(v)) {
    throw new UsageError(`--${name}: not a number: ${raw}`);
  }
  return v;
}

export function run(argv: string[]): number {
  try {
    const [command, ...rest] = argv;
    if (command === "tau-panels") {
      const flags = parseFlags(rest, { "out-dir": true, "tau-min": true, "tau-max": true });
      const opts: PanelOptions = {
        tauMin: numericFlag(flags, "tau-min"),
        tauMax: numericFlag(flags, "tau-max"),
      };
      renderTauPanels(flags.get("csv")!, flags.get("out-dir") ?? "figs", opts);
      return 0;
    }
    if (command === "table") {
      const flags = parseFlags(rest, { out: true });
      renderTableCommand(flags.get("csv")!, flags.get("out"));
      return 0;
    }
    throw new UsageError(command === undefined ? USAGE : `unknown command ${command}`);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    if (err instanceof CsvError) {
      console.error(`error: ${err.message}`);
      return 3;
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(run(process.argv.slice(2)));
}
