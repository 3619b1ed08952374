/** Batch renderer: --kind slope|branches|ratios --input ... --out ... */

import { readFileSync, writeFileSync } from "node:fs";
import { renderBranches, renderRatios, renderSlope } from "./plots.js";
import { SchemaMismatch } from "./csv.js";

interface Args {
  kind: string;
  input: string;
  fit?: string;
  out: string;
}

function parseArgs(argv: string[]): Args {
  const out: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const val = argv[i + 1];
    if (!key.startsWith("--") || val === undefined) {
      throw new Error(`usage: --kind K --input FILE [--fit FILE] --out FILE`);
    }
    out[key.slice(2)] = val;
  }
  for (const req of ["kind", "input", "out"]) {
    if (!(req in out)) {
      throw new Error(`missing --${req}`);
    }
  }
  return out as unknown as Args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error((e as Error).message);
    return 2;
  }
  try {
    let svg: string;
    if (args.kind === "slope") {
      if (!args.fit) {
        console.error("slope plots need --fit summary.json");
        return 2;
      }
      svg = renderSlope(
        readFileSync(args.input, "utf8"),
        readFileSync(args.fit, "utf8"),
      );
    } else if (args.kind === "branches") {
      svg = renderBranches(readFileSync(args.input, "utf8"));
    } else if (args.kind === "ratios") {
      svg = renderRatios(readFileSync(args.input, "utf8"));
    } else {
      console.error(`unknown kind '${args.kind}'`);
      return 2;
    }
    writeFileSync(args.out, svg);
    return 0;
  } catch (e) {
    if (e instanceof SchemaMismatch) {
      console.error(`schema mismatch: ${e.message}`);
      return 2;
    }
    console.error(String(e));
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
