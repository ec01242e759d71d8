export { parseSweepCsv, loadSweepSeries, assertSharedGrid, CsvFormatError } from "./csv.js";
export type { SweepPoint, SweepSeries } from "./csv.js";
export { buildSvg, segments } from "./figure.js";
export type { FigureSpec } from "./figure.js";
export { renderToFile } from "./render.js";
export type { RenderArgs } from "./render.js";
