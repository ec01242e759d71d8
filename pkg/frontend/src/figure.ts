/**
 * SVG figure assembly for rectification-coefficient curves.
 *
 * Produces a self-contained SVG string: one polyline per series over a
 * shared anisotropy grid, with degenerate or failed rows drawn as gaps,
 * a zero reference line, axes with ticks, and a legend.  Rendering is a
 * pure function of the inputs.
 */

import { scaleLinear } from "d3-scale";
import { SweepSeries, assertSharedGrid } from "./csv.js";

export interface FigureSpec {
  series: SweepSeries[];
  yRange?: [number, number];
  width?: number;
  height?: number;
  title?: string;
}

const COLORS = ["#c0392b", "#2471a3", "#1e8449", "#7d3c98"];
const MARGIN = { top: 36, right: 24, bottom: 52, left: 64 };

function fmt(x: number): string {
  return Number(x.toFixed(3)).toString();
}

/** Split a series into contiguous runs of defined points. */
export function segments(points: { delta: number; r: number | null }[]) {
  const runs: { delta: number; r: number }[][] = [];
  let current: { delta: number; r: number }[] = [];
  for (const p of points) {
    if (p.r === null) {
      if (current.length > 0) runs.push(current);
      current = [];
    } else {
      current.push({ delta: p.delta, r: p.r });
    }
  }
  if (current.length > 0) runs.push(current);
  return runs;
}

export function buildSvg(spec: FigureSpec): string {
  const { series } = spec;
  if (series.length === 0) {
    throw new Error("figure needs at least one series");
  }
  assertSharedGrid(series);

  const width = spec.width ?? 720;
  const height = spec.height ?? 480;
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;

  const deltas = series[0].points.map((p) => p.delta);
  const values = series.flatMap((s) => s.points.map((p) => p.r)).filter(
    (r): r is number => r !== null,
  );
  let [yLo, yHi] = spec.yRange ?? [
    Math.min(0, ...values),
    Math.max(0, ...values),
  ];
  if (yLo === yHi) {
    yLo -= 1e-3;
    yHi += 1e-3;
  }
  const pad = 0.05 * (yHi - yLo);

  const x = scaleLinear()
    .domain([Math.min(...deltas), Math.max(...deltas)])
    .range([MARGIN.left, MARGIN.left + innerW]);
  const y = scaleLinear()
    .domain([yLo - pad, yHi + pad])
    .range([MARGIN.top + innerH, MARGIN.top]);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="13">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (spec.title) {
    parts.push(
      `<text x="${width / 2}" y="20" text-anchor="middle" font-size="15">${spec.title}</text>`,
    );
  }

  for (const tick of x.ticks(9)) {
    const px = x(tick);
    parts.push(
      `<line x1="${px}" y1="${MARGIN.top + innerH}" x2="${px}" y2="${MARGIN.top + innerH + 5}" stroke="black"/>`,
      `<text x="${px}" y="${MARGIN.top + innerH + 20}" text-anchor="middle">${fmt(tick)}</text>`,
    );
  }
  for (const tick of y.ticks(8)) {
    const py = y(tick);
    parts.push(
      `<line x1="${MARGIN.left - 5}" y1="${py}" x2="${MARGIN.left}" y2="${py}" stroke="black"/>`,
      `<text x="${MARGIN.left - 9}" y="${py + 4}" text-anchor="end">${fmt(tick)}</text>`,
    );
  }

  // frame and zero line
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${innerW}" height="${innerH}" fill="none" stroke="black"/>`,
  );
  if (y.domain()[0] < 0 && y.domain()[1] > 0) {
    const zero = y(0);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${zero}" x2="${MARGIN.left + innerW}" y2="${zero}" stroke="#999" stroke-dasharray="4 3"/>`,
    );
  }

  series.forEach((s, index) => {
    const color = COLORS[index % COLORS.length];
    for (const run of segments(s.points)) {
      if (run.length === 1) {
        parts.push(
          `<circle cx="${x(run[0].delta)}" cy="${y(run[0].r)}" r="2.5" fill="${color}"/>`,
        );
        continue;
      }
      const d = run
        .map((p, i) => `${i === 0 ? "M" : "L"}${x(p.delta).toFixed(2)},${y(p.r).toFixed(2)}`)
        .join(" ");
      parts.push(
        `<path d="${d}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
      );
    }
    const ly = MARGIN.top + 16 + 18 * index;
    const lx = MARGIN.left + 12;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" stroke="${color}" stroke-width="1.8"/>`,
      `<text x="${lx + 32}" y="${ly}">${s.label}</text>`,
    );
  });

  parts.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${height - 14}" text-anchor="middle">anisotropy</text>`,
    `<text x="18" y="${MARGIN.top + innerH / 2}" text-anchor="middle" transform="rotate(-90 18 ${MARGIN.top + innerH / 2})">rectification coefficient</text>`,
  );
  parts.push("</svg>");
  return parts.join("\n");
}
