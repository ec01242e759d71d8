import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { renderToFile } from "../src/render.js";

const HEADER =
  "delta,j_forward,j_reverse,R,degenerate,homogeneity_residual," +
  "stationarity_fwd,stationarity_rev,wall_time_s";

function writeCsv(dir: string, name: string, rs: (number | null)[]): string {
  const rows = rs.map((r, i) => {
    const delta = -1 + 0.5 * i;
    const rCell = r === null ? "" : String(r);
    return `${delta},0.5,-0.4,${rCell},${r === null ? "true" : "false"},1e-9,1e-10,1e-10,1.0`;
  });
  const path = join(dir, name);
  writeFileSync(path, [HEADER, ...rows].join("\n") + "\n");
  return path;
}

describe("renderToFile", () => {
  it("writes an SVG with both curves", () => {
    const dir = mkdtempSync(join(tmpdir(), "render-"));
    const a = writeCsv(dir, "a.csv", [0.1, 0.2, 0.3, 0.2]);
    const b = writeCsv(dir, "b.csv", [-0.1, -0.2, -0.3, -0.2]);
    const out = join(dir, "fig.svg");
    renderToFile({ inputs: [a, b], labels: ["config1", "config2"], out });
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain("<svg");
    expect(svg).toContain("config1");
    expect((svg.match(/<path d=/g) ?? []).length).toBe(2);
  });

  it("writes a PNG when asked", () => {
    const dir = mkdtempSync(join(tmpdir(), "render-"));
    const a = writeCsv(dir, "a.csv", [0.1, 0.2, null, 0.2]);
    const out = join(dir, "fig.png");
    renderToFile({ inputs: [a], labels: ["one"], out });
    const bytes = readFileSync(out);
    expect([...bytes.subarray(0, 4)]).toEqual([0x89, 0x50, 0x4e, 0x47]);
  });

  it("checks label counts", () => {
    const dir = mkdtempSync(join(tmpdir(), "render-"));
    const a = writeCsv(dir, "a.csv", [0.1]);
    expect(() =>
      renderToFile({ inputs: [a], labels: ["x", "y"], out: join(dir, "f.svg") }),
    ).toThrow(/labels/);
  });

  it("propagates grid mismatches", () => {
    const dir = mkdtempSync(join(tmpdir(), "render-"));
    const a = writeCsv(dir, "a.csv", [0.1, 0.2]);
    const b = writeCsv(dir, "b.csv", [0.1, 0.2, 0.3]);
    expect(() =>
      renderToFile({ inputs: [a, b], labels: ["x", "y"], out: join(dir, "f.svg") }),
    ).toThrow(/grid differs/);
  });
});
