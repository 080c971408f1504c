#!/usr/bin/env node
/** plot --kind <ledger|supnorm|symbol_compare|heatmap> --in <paths...> --out <file> */

import { FIGURE_KINDS, FigureKind, FigureSpec, makeFigure } from "./figures.js";

function usage(): never {
  console.error(
    "usage: gmhd2d-plot --kind <" + FIGURE_KINDS.join("|") +
      "> --in <paths...> --out <file> [--field omega|j]",
  );
  process.exit(2);
}

export function parseArgs(argv: string[]): FigureSpec {
  let kind: string | undefined;
  const inputs: string[] = [];
  let output: string | undefined;
  let field: "omega" | "j" | undefined;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--kind") kind = argv[++i];
    else if (a === "--in") {
      while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) inputs.push(argv[++i]);
    } else if (a === "--out") output = argv[++i];
    else if (a === "--field") {
      const f = argv[++i];
      if (f !== "omega" && f !== "j") throw new Error(`bad --field ${f}`);
      field = f;
    } else throw new Error(`unknown argument ${a}`);
  }
  if (!kind || !output || inputs.length === 0) throw new Error("missing required arguments");
  if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new Error(`unknown figure kind '${kind}'`);
  }
  return { kind: kind as FigureKind, inputs, output, field };
}

function main(): void {
  let spec: FigureSpec;
  try {
    spec = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    usage();
  }
  try {
    makeFigure(spec);
  } catch (err) {
    console.error(err instanceof Error ? `${err.name}: ${err.message}` : String(err));
    process.exit(2);
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) main();
