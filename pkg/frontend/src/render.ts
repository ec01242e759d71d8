#!/usr/bin/env node
/**
 * CLI: render rectification curves from sweep CSVs to an SVG or PNG file.
 *
 *   spinrect-render --inputs a.csv b.csv --labels config1 config2 --out fig.png
 */

import { writeFileSync } from "node:fs";
import { createRequire } from "node:module";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { CsvFormatError, loadSweepSeries } from "./csv.js";
import { buildSvg } from "./figure.js";

export interface RenderArgs {
  inputs: string[];
  labels: string[];
  out: string;
  yRange?: [number, number];
  title?: string;
}

interface ResvgModule {
  Resvg: new (
    svg: string,
    opts?: unknown,
  ) => { render(): { asPng(): Buffer } };
}

function loadResvg(): ResvgModule {
  try {
    const require = createRequire(import.meta.url);
    return require("@resvg/resvg-js") as ResvgModule;
  } catch {
    throw new Error(
      "PNG output needs @resvg/resvg-js; install it or use an .svg output path",
    );
  }
}

export function renderToFile(args: RenderArgs): void {
  if (args.labels.length !== args.inputs.length) {
    throw new Error(
      `got ${args.inputs.length} inputs but ${args.labels.length} labels`,
    );
  }
  const series = args.inputs.map((path, i) => loadSweepSeries(path, args.labels[i]));
  const gaps = series.reduce(
    (count, s) => count + s.points.filter((p) => p.r === null).length,
    0,
  );
  if (gaps > 0) {
    console.warn(`warning: ${gaps} degenerate or failed rows drawn as gaps`);
  }
  const svg = buildSvg({ series, yRange: args.yRange, title: args.title });
  if (args.out.toLowerCase().endsWith(".png")) {
    const { Resvg } = loadResvg();
    const png = new Resvg(svg, { fitTo: { mode: "width", value: 1440 } })
      .render()
      .asPng();
    writeFileSync(args.out, png);
    return;
  }
  writeFileSync(args.out, svg);
}

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .option("inputs", { type: "string", array: true, demandOption: true,
                        describe: "sweep CSV files, one per curve" })
    .option("labels", { type: "string", array: true, demandOption: true,
                        describe: "legend labels, one per input" })
    .option("out", { type: "string", demandOption: true,
                     describe: "output image path (.svg or .png)" })
    .option("y-range", { type: "number", array: true, nargs: 2,
                         describe: "fixed y axis range: LO HI" })
    .option("title", { type: "string" })
    .strict()
    .parse();
  try {
    renderToFile({
      inputs: args.inputs as string[],
      labels: args.labels as string[],
      out: args.out as string,
      yRange: args["y-range"] as [number, number] | undefined,
      title: args.title as string | undefined,
    });
  } catch (error) {
    if (error instanceof CsvFormatError || error instanceof Error) {
      console.error(`error: ${error.message}`);
      return 1;
    }
    throw error;
  }
  console.log(`wrote ${args.out}`);
  return 0;
}

const invokedDirectly = process.argv[1]?.endsWith("render.js");
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
