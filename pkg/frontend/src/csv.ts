/**
 * Reading of rectification-sweep CSV tables.
 *
 * The expected layout is the one the simulation CLI writes: one row per
 * anisotropy value with columns
 *   delta,j_forward,j_reverse,R,degenerate,homogeneity_residual,
 *   stationarity_fwd,stationarity_rev,wall_time_s
 * Rows whose R cell is empty (failed rows) or whose degenerate flag is set
 * carry no coefficient and are represented as gaps (r = null).
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export interface SweepPoint {
  delta: number;
  r: number | null;
  jForward: number;
  jReverse: number;
  degenerate: boolean;
}

export interface SweepSeries {
  label: string;
  source: string;
  points: SweepPoint[];
}

export const REQUIRED_COLUMNS = [
  "delta",
  "j_forward",
  "j_reverse",
  "R",
  "degenerate",
] as const;

export class CsvFormatError extends Error {}

export function parseSweepCsv(text: string, source = "<string>"): SweepPoint[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new CsvFormatError(`${source}: malformed CSV (${first.message})`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const column of REQUIRED_COLUMNS) {
    if (!fields.includes(column)) {
      throw new CsvFormatError(`${source}: missing column '${column}'`);
    }
  }
  return parsed.data.map((row, index) => {
    const delta = Number(row.delta);
    if (!Number.isFinite(delta)) {
      throw new CsvFormatError(`${source}: row ${index + 1} has bad delta '${row.delta}'`);
    }
    const degenerate = row.degenerate.trim() === "true";
    const rText = row.R.trim();
    const empty = rText === "";
    const r = degenerate || empty ? null : Number(rText);
    if (r !== null && !Number.isFinite(r)) {
      throw new CsvFormatError(`${source}: row ${index + 1} has bad R '${row.R}'`);
    }
    return {
      delta,
      r,
      jForward: Number(row.j_forward),
      jReverse: Number(row.j_reverse),
      degenerate,
    };
  });
}

export function loadSweepSeries(path: string, label: string): SweepSeries {
  const text = readFileSync(path, "utf8");
  return { label, source: path, points: parseSweepCsv(text, path) };
}

/** All series must share the same delta grid to be drawn together. */
export function assertSharedGrid(series: SweepSeries[]): void {
  if (series.length === 0) return;
  const reference = series[0].points.map((p) => p.delta);
  for (const s of series.slice(1)) {
    const grid = s.points.map((p) => p.delta);
    const same =
      grid.length === reference.length &&
      grid.every((d, i) => Math.abs(d - reference[i]) < 1e-12);
    if (!same) {
      throw new CsvFormatError(
        `${s.source}: delta grid differs from ${series[0].source}`,
      );
    }
  }
}
