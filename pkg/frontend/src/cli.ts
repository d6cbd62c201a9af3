/**
 * Render the figure set from a simulator artifact directory.
 *
 * Usage: node dist/cli.js --artifacts DIR --out DIR
 */

import { renderAll } from "./figures.js";

function parseArgs(argv: string[]): { artifacts: string; out: string } {
  let artifacts = "";
  let out = "";
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--artifacts") {
      artifacts = argv[++i] ?? "";
    } else if (argv[i] === "--out") {
      out = argv[++i] ?? "";
    } else {
      console.error(`unknown argument: ${argv[i]}`);
      process.exit(2);
    }
  }
  if (!artifacts || !out) {
    console.error("usage: cli --artifacts DIR --out DIR");
    process.exit(2);
  }
  return { artifacts, out };
}

const { artifacts, out } = parseArgs(process.argv.slice(2));
const result = renderAll(artifacts, out);
for (const path of result.written) {
  console.log(path);
}
if (result.missing.length > 0) {
  console.error(`missing artifacts, figures omitted: ${result.missing.join(", ")}`);
}
process.exit(result.written.length > 0 ? 0 : 1);
