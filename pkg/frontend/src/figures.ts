/**
 * Comparison figures from a simulator artifact directory.
 *
 * Reads only the frozen CSV schemas (never recomputes simulation
 * quantities) and writes deterministic SVGs: per-model score bars,
 * per-model delay bars, utility-vs-slot lines, score CDFs, and the
 * trade-off-weight sweep panels.
 */

import { existsSync, mkdirSync, readdirSync, writeFileSync } from "node:fs";
import { basename, dirname, join } from "node:path";

import { col, CsvTable, EmptyInputError, num, readCsv, requireColumns, requireRows } from "./csv.js";
import {
  Frame,
  legend,
  line,
  linearScale,
  PALETTE,
  plotArea,
  polyline,
  px,
  rect,
  svgDocument,
  text,
  ticks,
  xAxis,
  yAxis,
} from "./svg.js";

export type FigureKind = "bar_per_model" | "line_per_slot" | "cdf" | "sweep";

export interface FigureSpec {
  kind: FigureKind;
  inputCsv: string;
  outputPath: string;
  /** keep only these strategies (bar/line kinds); order-preserving */
  strategyFilter?: string[];
  /** bar_per_model: which compare.csv metric family to plot */
  metric?: string;
  /** cdf: series label (defaults to the parent directory name) */
  label?: string;
}

const FRAME: Frame = { width: 640, height: 360, left: 56, right: 150, top: 28, bottom: 46 };

function uniqueInOrder(values: string[]): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const v of values) {
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}

function writeFigure(path: string, content: string): string {
  mkdirSync(dirname(path), { recursive: true });
  writeFileSync(path, content, "utf8");
  return path;
}

// ---------------------------------------------------------------------------
// Per-model grouped bars from compare.csv
// ---------------------------------------------------------------------------

interface BarDatum {
  strategy: string;
  model: string;
  value: number;
}

function parseCompareMetric(table: CsvTable, metric: string, filter?: string[]): BarDatum[] {
  requireColumns(table, ["strategy", "metric", "value"]);
  requireRows(table);
  const data: BarDatum[] = [];
  const iStrat = col(table, "strategy");
  const iMetric = col(table, "metric");
  for (const row of table.rows) {
    const m = row[iMetric];
    if (!m.startsWith(`${metric}[`) || !m.endsWith("]")) {
      continue;
    }
    const strategy = row[iStrat];
    if (filter && !filter.includes(strategy)) {
      continue;
    }
    data.push({
      strategy,
      model: m.slice(metric.length + 1, -1),
      value: num(table, row, "value"),
    });
  }
  if (data.length === 0) {
    throw new EmptyInputError(
      `${table.path}: no "${metric}[<model>]" rows` + (filter ? ` for strategies ${filter.join(", ")}` : ""),
    );
  }
  return data;
}

export function renderBarPerModel(spec: FigureSpec): string {
  const metric = spec.metric ?? "mean_score";
  const table = readCsv(spec.inputCsv);
  const data = parseCompareMetric(table, metric, spec.strategyFilter);
  const models = uniqueInOrder(data.map((d) => d.model));
  const strategies = uniqueInOrder(data.map((d) => d.strategy));

  const { x0, x1, y0, y1 } = plotArea(FRAME);
  const vMax = Math.max(...data.map((d) => d.value));
  const yTicks = ticks(0, vMax * 1.08, 5);
  const sy = linearScale(0, Math.max(vMax * 1.08, yTicks[yTicks.length - 1]), y0, y1);

  const groupWidth = (x1 - x0) / models.length;
  const barWidth = (groupWidth * 0.72) / strategies.length;

  const body: string[] = [];
  body.push(...yAxis(FRAME, sy, yTicks, metric));
  body.push(line(x0, y0, x1, y0));
  models.forEach((model, gi) => {
    const gx = x0 + gi * groupWidth;
    body.push(text(gx + groupWidth / 2, y0 + 16, model, { size: 10, anchor: "middle" }));
    strategies.forEach((strategy, si) => {
      const d = data.find((e) => e.model === model && e.strategy === strategy);
      if (!d) {
        return;
      }
      const h = y0 - sy(d.value);
      const bx = gx + groupWidth * 0.14 + si * barWidth;
      body.push(
        rect(bx, y0 - h, barWidth * 0.92, h, PALETTE[si % PALETTE.length], {
          series: strategy,
          group: model,
          value: String(d.value),
        }),
      );
    });
  });
  body.push(...legend(FRAME, strategies, PALETTE));
  body.push(text(FRAME.width / 2, 16, `${metric} per model`, { size: 13, anchor: "middle", bold: true }));
  return writeFigure(spec.outputPath, svgDocument(FRAME.width, FRAME.height, body));
}

// ---------------------------------------------------------------------------
// Utility vs slot lines from slots.csv
// ---------------------------------------------------------------------------

export function renderLinePerSlot(spec: FigureSpec): string {
  const table = readCsv(spec.inputCsv);
  requireColumns(table, ["slot", "strategy", "utility"]);
  requireRows(table);
  const iSlot = col(table, "slot");
  const iStrat = col(table, "strategy");
  const rows = table.rows
    .map((row) => ({
      slot: num(table, row, "slot"),
      strategy: row[iStrat],
      utility: num(table, row, "utility"),
    }))
    .filter((r) => !spec.strategyFilter || spec.strategyFilter.includes(r.strategy));
  if (rows.length === 0) {
    throw new EmptyInputError(`${table.path}: no rows after strategy filter`);
  }
  void iSlot;
  const strategies = uniqueInOrder(rows.map((r) => r.strategy));
  const slots = [...new Set(rows.map((r) => r.slot))].sort((a, b) => a - b);
  const uMin = Math.min(...rows.map((r) => r.utility));
  const uMax = Math.max(...rows.map((r) => r.utility));
  const pad = (uMax - uMin || 1) * 0.1;

  const { x0, x1, y0, y1 } = plotArea(FRAME);
  const sx = linearScale(slots[0], slots[slots.length - 1] || 1, x0 + 8, x1 - 8);
  const sy = linearScale(uMin - pad, uMax + pad, y0, y1);

  const body: string[] = [];
  body.push(...xAxis(FRAME, sx, ticks(slots[0], slots[slots.length - 1], Math.min(slots.length, 10)), "time slot"));
  body.push(...yAxis(FRAME, sy, ticks(uMin - pad, uMax + pad, 5), "mean utility"));
  strategies.forEach((strategy, si) => {
    const pts = rows
      .filter((r) => r.strategy === strategy)
      .sort((a, b) => a.slot - b.slot)
      .map((r): [number, number] => [sx(r.slot), sy(r.utility)]);
    body.push(polyline(pts, PALETTE[si % PALETTE.length]));
    for (const [x, y] of pts) {
      body.push(rect(x - 2, y - 2, 4, 4, PALETTE[si % PALETTE.length], { series: strategy }));
    }
  });
  body.push(...legend(FRAME, strategies, PALETTE));
  body.push(text(FRAME.width / 2, 16, "utility per time slot", { size: 13, anchor: "middle", bold: true }));
  return writeFigure(spec.outputPath, svgDocument(FRAME.width, FRAME.height, body));
}

// ---------------------------------------------------------------------------
// Score CDFs from tasks.csv files
// ---------------------------------------------------------------------------

interface CdfSeries {
  label: string;
  scores: number[];
}

function readScores(path: string): number[] {
  const table = readCsv(path);
  requireColumns(table, ["task_id", "score"]);
  requireRows(table);
  return table.rows.map((row) => num(table, row, "score")).sort((a, b) => a - b);
}

function renderCdfSeries(seriesList: CdfSeries[], outputPath: string): string {
  const all = seriesList.flatMap((s) => s.scores);
  const xMin = Math.min(...all);
  const xMax = Math.max(...all);
  const pad = (xMax - xMin || 1) * 0.04;

  const { x0, x1, y0, y1 } = plotArea(FRAME);
  const sx = linearScale(xMin - pad, xMax + pad, x0, x1);
  const sy = linearScale(0, 1, y0, y1);

  const body: string[] = [];
  body.push(...xAxis(FRAME, sx, ticks(xMin, xMax, 7), "realized score"));
  body.push(...yAxis(FRAME, sy, [0, 0.25, 0.5, 0.75, 1], "fraction of tasks"));
  seriesList.forEach((series, si) => {
    const n = series.scores.length;
    const pts: Array<[number, number]> = [[sx(series.scores[0]), sy(0)]];
    series.scores.forEach((score, i) => {
      pts.push([sx(score), sy((i + 1) / n)]);
    });
    body.push(polyline(pts, PALETTE[si % PALETTE.length]));
  });
  body.push(...legend(FRAME, seriesList.map((s) => s.label), PALETTE));
  body.push(text(FRAME.width / 2, 16, "score CDF", { size: 13, anchor: "middle", bold: true }));
  return writeFigure(outputPath, svgDocument(FRAME.width, FRAME.height, body));
}

export function renderCdf(spec: FigureSpec): string {
  const label = spec.label ?? basename(dirname(spec.inputCsv));
  return renderCdfSeries([{ label, scores: readScores(spec.inputCsv) }], spec.outputPath);
}

// ---------------------------------------------------------------------------
// Trade-off weight sweep panels from sweep.csv
// ---------------------------------------------------------------------------

export function renderSweep(spec: FigureSpec): string {
  const table = readCsv(spec.inputCsv);
  requireColumns(table, ["omega", "mean_score", "mean_delay_s", "utility"]);
  requireRows(table);
  const rows = table.rows
    .map((row) => ({
      omega: num(table, row, "omega"),
      score: num(table, row, "mean_score"),
      delay: num(table, row, "mean_delay_s"),
      utility: num(table, row, "utility"),
    }))
    .sort((a, b) => a.omega - b.omega);

  const width = 720;
  const height = 280;
  const panels: Array<{ title: string; values: number[]; color: string }> = [
    { title: "mean expected score", values: rows.map((r) => r.score), color: PALETTE[0] },
    { title: "mean delay (s)", values: rows.map((r) => r.delay), color: PALETTE[1] },
    { title: "utility", values: rows.map((r) => r.utility), color: PALETTE[2] },
  ];
  const panelWidth = width / panels.length;
  const body: string[] = [];
  panels.forEach((panel, pi) => {
    const frame: Frame = {
      width: panelWidth,
      height,
      left: 52,
      right: 12,
      top: 34,
      bottom: 44,
    };
    const { x0, x1, y0, y1 } = plotArea(frame);
    const offset = pi * panelWidth;
    const vMin = Math.min(...panel.values);
    const vMax = Math.max(...panel.values);
    const pad = (vMax - vMin || 1) * 0.1;
    const sx = linearScale(rows[0].omega, rows[rows.length - 1].omega || 1, x0, x1);
    const sy = linearScale(vMin - pad, vMax + pad, y0, y1);

    const local: string[] = [];
    local.push(...xAxis(frame, sx, rows.map((r) => r.omega), "omega"));
    local.push(...yAxis(frame, sy, ticks(vMin - pad, vMax + pad, 4), ""));
    const pts = rows.map((r, i): [number, number] => [sx(r.omega), sy(panel.values[i])]);
    local.push(polyline(pts, panel.color));
    for (const [x, y] of pts) {
      local.push(rect(x - 2.5, y - 2.5, 5, 5, panel.color, { series: panel.title }));
    }
    local.push(text((x0 + x1) / 2, 18, panel.title, { size: 12, anchor: "middle", bold: true }));
    body.push(`<g transform="translate(${px(offset)} 0)">`, ...local, "</g>");
  });
  return writeFigure(spec.outputPath, svgDocument(width, height, body));
}

// ---------------------------------------------------------------------------
// Dispatch and the full panel set
// ---------------------------------------------------------------------------

export function render(spec: FigureSpec): string {
  switch (spec.kind) {
    case "bar_per_model":
      return renderBarPerModel(spec);
    case "line_per_slot":
      return renderLinePerSlot(spec);
    case "cdf":
      return renderCdf(spec);
    case "sweep":
      return renderSweep(spec);
    default:
      throw new Error(`unknown figure kind: ${(spec as FigureSpec).kind}`);
  }
}

export interface RenderAllResult {
  written: string[];
  missing: string[];
}

/** Render the full figure set from one artifact directory. */
export function renderAll(artifactDir: string, outDir: string): RenderAllResult {
  const written: string[] = [];
  const missing: string[] = [];

  const comparePath = join(artifactDir, "compare.csv");
  if (existsSync(comparePath)) {
    written.push(
      renderBarPerModel({
        kind: "bar_per_model",
        inputCsv: comparePath,
        outputPath: join(outDir, "fig_score_per_model.svg"),
        metric: "mean_score",
      }),
      renderBarPerModel({
        kind: "bar_per_model",
        inputCsv: comparePath,
        outputPath: join(outDir, "fig_delay_per_model.svg"),
        metric: "mean_delay_s",
      }),
    );
  } else {
    missing.push("compare.csv");
  }

  const slotsPath = join(artifactDir, "slots.csv");
  if (existsSync(slotsPath)) {
    written.push(
      renderLinePerSlot({
        kind: "line_per_slot",
        inputCsv: slotsPath,
        outputPath: join(outDir, "fig_utility_per_slot.svg"),
      }),
    );
  } else {
    missing.push("slots.csv");
  }

  const cdfSeries: CdfSeries[] = [];
  const strategyDirs = existsSync(artifactDir)
    ? readdirSync(artifactDir, { withFileTypes: true })
        .filter((e) => e.isDirectory() && e.name.startsWith("strategy_"))
        .map((e) => e.name)
        .sort()
    : [];
  for (const dir of strategyDirs) {
    const tasksPath = join(artifactDir, dir, "tasks.csv");
    if (existsSync(tasksPath)) {
      cdfSeries.push({ label: dir.slice("strategy_".length), scores: readScores(tasksPath) });
    }
  }
  if (cdfSeries.length === 0 && existsSync(join(artifactDir, "tasks.csv"))) {
    cdfSeries.push({ label: "run", scores: readScores(join(artifactDir, "tasks.csv")) });
  }
  if (cdfSeries.length > 0) {
    written.push(renderCdfSeries(cdfSeries, join(outDir, "fig_score_cdf.svg")));
  } else {
    missing.push("tasks.csv");
  }

  const sweepPath = join(artifactDir, "sweep.csv");
  if (existsSync(sweepPath)) {
    written.push(
      renderSweep({
        kind: "sweep",
        inputCsv: sweepPath,
        outputPath: join(outDir, "fig_omega_sweep.svg"),
      }),
    );
  } else {
    missing.push("sweep.csv");
  }

  return { written, missing };
}
