import { mkdtempSync, mkdirSync, readFileSync, writeFileSync, existsSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { EmptyInputError, SchemaError, readCsv } from "../src/csv.js";
import { render, renderAll } from "../src/figures.js";

let root: string;

function write(path: string, lines: string[]): string {
  mkdirSync(join(path, ".."), { recursive: true });
  writeFileSync(path, lines.join("\n") + "\n", "utf8");
  return path;
}

function makeArtifactDir(name: string, opts: { sweep?: boolean } = { sweep: true }): string {
  const dir = join(root, name);
  mkdirSync(dir, { recursive: true });
  write(join(dir, "compare.csv"), [
    "# fingerprint: f00",
    "strategy,metric,value",
    "alpha,mean_score,30.1",
    "alpha,mean_delay_s,7.2",
    "alpha,mean_utility,28.66",
    "alpha,mean_score[small],28.8",
    "alpha,mean_delay_s[small],2.9",
    "alpha,n_tasks[small],30",
    "alpha,mean_score[medium],30.2",
    "alpha,mean_delay_s[medium],6.4",
    "alpha,n_tasks[medium],55",
    "alpha,mean_score[large],33.0",
    "alpha,mean_delay_s[large],24.1",
    "alpha,n_tasks[large],15",
    "beta,mean_score,29.9",
    "beta,mean_delay_s,8.1",
    "beta,mean_utility,28.28",
    "beta,mean_score[small],28.5",
    "beta,mean_delay_s[small],3.4",
    "beta,n_tasks[small],40",
    "beta,mean_score[medium],29.9",
    "beta,mean_delay_s[medium],7.7",
    "beta,n_tasks[medium],40",
    "beta,mean_score[large],32.1",
    "beta,mean_delay_s[large],30.0",
    "beta,n_tasks[large],20",
  ]);
  write(join(dir, "slots.csv"), [
    "# fingerprint: f00",
    "slot,strategy,mean_score,mean_delay_s,utility,n_tasks",
    "0,alpha,30.1,7.2,28.66,100",
    "1,alpha,30.0,7.1,28.58,100",
    "2,alpha,30.2,7.3,28.74,100",
    "0,beta,29.9,8.0,28.3,100",
    "1,beta,29.8,8.1,28.18,100",
    "2,beta,29.95,8.2,28.31,100",
  ]);
  for (const [label, base] of [["alpha", 30.0], ["beta", 29.5]] as const) {
    const lines = ["# fingerprint: f00",
                   "task_id,slot,category,latent_quality,model_id,steps,score,delay_s"];
    for (let i = 0; i < 40; i++) {
      const score = base + (i % 17) * 0.31 - (i % 5) * 0.12;
      lines.push(`${i},0,Basic,31.0,2,14,${score.toFixed(4)},6.5`);
    }
    write(join(dir, `strategy_${label}`, "tasks.csv"), lines);
  }
  if (opts.sweep !== false) {
    write(join(dir, "sweep.csv"), [
      "# fingerprint: f00",
      "omega,mean_score,mean_delay_s,utility",
      "0.05,30.1,10.6,29.57",
      "0.2,29.73,7.17,28.3",
      "0.5,29.62,6.66,26.29",
      "1,29.62,6.66,22.96",
    ]);
  }
  return dir;
}

interface Bar {
  height: number;
  series: string;
  group: string;
  value: number;
}

function parseBars(svg: string): Bar[] {
  const out: Bar[] = [];
  const re = /<rect [^>]*height="([0-9.]+)"[^>]*data-series="([^"]*)" data-group="([^"]*)" data-value="([^"]*)"/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(svg)) !== null) {
    out.push({ height: Number(m[1]), series: m[2], group: m[3], value: Number(m[4]) });
  }
  return out;
}

beforeAll(() => {
  root = mkdtempSync(join(tmpdir(), "report-test-"));
});

afterAll(() => {
  rmSync(root, { recursive: true, force: true });
});

describe("renderAll", () => {
  it("renders the full five-figure set", () => {
    const dir = makeArtifactDir("full");
    const result = renderAll(dir, join(root, "full-out"));
    expect(result.missing).toEqual([]);
    expect(result.written.map((p) => p.split("/").pop()).sort()).toEqual([
      "fig_delay_per_model.svg",
      "fig_omega_sweep.svg",
      "fig_score_cdf.svg",
      "fig_score_per_model.svg",
      "fig_utility_per_slot.svg",
    ]);
  });

  it("is byte-identical across reruns", () => {
    const dir = makeArtifactDir("determinism");
    const out1 = join(root, "det-1");
    const out2 = join(root, "det-2");
    const r1 = renderAll(dir, out1);
    const r2 = renderAll(dir, out2);
    expect(r1.written.length).toBe(5);
    for (let i = 0; i < r1.written.length; i++) {
      const a = readFileSync(r1.written[i], "utf8");
      const b = readFileSync(r2.written[i], "utf8");
      expect(a).toBe(b);
    }
    // and rerunning into the same directory leaves identical bytes
    const before = r1.written.map((p) => readFileSync(p, "utf8"));
    renderAll(dir, out1);
    r1.written.forEach((p, i) => expect(readFileSync(p, "utf8")).toBe(before[i]));
  });

  it("omits missing artifacts by name and still renders the rest", () => {
    const dir = makeArtifactDir("partial", { sweep: false });
    const result = renderAll(dir, join(root, "partial-out"));
    expect(result.missing).toEqual(["sweep.csv"]);
    expect(result.written.length).toBe(4);
    expect(existsSync(join(root, "partial-out", "fig_omega_sweep.svg"))).toBe(false);
  });

  it("falls back to a top-level tasks.csv when no strategy dirs exist", () => {
    const dir = join(root, "flat");
    mkdirSync(dir, { recursive: true });
    write(join(dir, "tasks.csv"), [
      "task_id,slot,category,latent_quality,model_id,steps,score,delay_s",
      "0,0,Basic,31.0,2,14,30.5,6.5",
      "1,0,Basic,30.2,2,14,29.8,6.5",
    ]);
    const result = renderAll(dir, join(dir, "out"));
    expect(result.written.some((p) => p.endsWith("fig_score_cdf.svg"))).toBe(true);
    expect(result.missing).toContain("compare.csv");
  });
});

describe("bar figure", () => {
  it("renders the hand-forged maximum as the tallest bar in every group", () => {
    const dir = join(root, "forged");
    mkdirSync(dir, { recursive: true });
    const input = write(join(dir, "compare.csv"), [
      "strategy,metric,value",
      "winner,mean_score[small],29.9",
      "winner,mean_score[medium],31.4",
      "winner,mean_score[large],33.9",
      "loser,mean_score[small],28.1",
      "loser,mean_score[medium],30.0",
      "loser,mean_score[large],32.4",
      "middle,mean_score[small],28.8",
      "middle,mean_score[medium],30.6",
      "middle,mean_score[large],33.0",
    ]);
    const out = render({
      kind: "bar_per_model",
      inputCsv: input,
      outputPath: join(dir, "bars.svg"),
    });
    const bars = parseBars(readFileSync(out, "utf8"));
    expect(bars.length).toBe(9);
    for (const group of ["small", "medium", "large"]) {
      const inGroup = bars.filter((b) => b.group === group);
      const tallest = inGroup.reduce((a, b) => (b.height > a.height ? b : a));
      expect(tallest.series).toBe("winner");
    }
  });

  it("bar heights order exactly as the values", () => {
    const dir = makeArtifactDir("heights");
    const out = render({
      kind: "bar_per_model",
      inputCsv: join(dir, "compare.csv"),
      outputPath: join(root, "heights.svg"),
      metric: "mean_delay_s",
    });
    const bars = parseBars(readFileSync(out, "utf8"));
    for (const group of ["small", "medium", "large"]) {
      const inGroup = bars.filter((b) => b.group === group);
      const byHeight = [...inGroup].sort((a, b) => a.height - b.height).map((b) => b.series);
      const byValue = [...inGroup].sort((a, b) => a.value - b.value).map((b) => b.series);
      expect(byHeight).toEqual(byValue);
    }
  });

  it("single strategy yields a single-series chart", () => {
    const dir = makeArtifactDir("single");
    const out = render({
      kind: "bar_per_model",
      inputCsv: join(dir, "compare.csv"),
      outputPath: join(root, "single.svg"),
      strategyFilter: ["alpha"],
    });
    const bars = parseBars(readFileSync(out, "utf8"));
    expect(new Set(bars.map((b) => b.series))).toEqual(new Set(["alpha"]));
    expect(bars.length).toBe(3);
  });
});

describe("input diagnostics", () => {
  it("schema mismatch names the offending column", () => {
    const bad = write(join(root, "bad-slots.csv"), [
      "slot,strategy,mean_score,mean_delay_s,n_tasks",
      "0,alpha,30.1,7.2,100",
    ]);
    expect(() =>
      render({ kind: "line_per_slot", inputCsv: bad, outputPath: join(root, "x.svg") }),
    ).toThrowError(/missing column "utility"/);
    expect(existsSync(join(root, "x.svg"))).toBe(false);
  });

  it("empty data rows raise an explicit empty-input error, no blank figure", () => {
    const empty = write(join(root, "empty-sweep.csv"), [
      "omega,mean_score,mean_delay_s,utility",
    ]);
    expect(() =>
      render({ kind: "sweep", inputCsv: empty, outputPath: join(root, "y.svg") }),
    ).toThrowError(EmptyInputError);
    expect(existsSync(join(root, "y.svg"))).toBe(false);
  });

  it("non-numeric cell is a schema diagnostic", () => {
    const bad = write(join(root, "bad-sweep.csv"), [
      "omega,mean_score,mean_delay_s,utility",
      "0.2,oops,7.0,28.0",
    ]);
    expect(() =>
      render({ kind: "sweep", inputCsv: bad, outputPath: join(root, "z.svg") }),
    ).toThrowError(SchemaError);
  });

  it("fingerprint comment lines are skipped by the reader", () => {
    const path = write(join(root, "commented.csv"), [
      "# fingerprint: deadbeef",
      "a,b",
      "1,2",
    ]);
    const table = readCsv(path);
    expect(table.header).toEqual(["a", "b"]);
    expect(table.rows).toEqual([["1", "2"]]);
  });
});

describe("cdf figure", () => {
  it("renders a monotone step curve per strategy", () => {
    const dir = makeArtifactDir("cdf");
    const result = renderAll(dir, join(root, "cdf-out"));
    const svg = readFileSync(
      result.written.find((p) => p.endsWith("fig_score_cdf.svg"))!,
      "utf8",
    );
    const polylines = [...svg.matchAll(/<polyline points="([^"]+)"/g)].map((m) => m[1]);
    // two strategy series plus axis-free gridlines are <line>, not polyline
    expect(polylines.length).toBe(2);
    for (const pts of polylines) {
      const ys = pts.split(" ").map((p) => Number(p.split(",")[1]));
      for (let i = 1; i < ys.length; i++) {
        expect(ys[i]).toBeLessThanOrEqual(ys[i - 1] + 1e-9); // svg y axis points down
      }
    }
    expect(svg).toContain("alpha");
    expect(svg).toContain("beta");
  });
});

describe("sweep figure", () => {
  it("renders three panels over the omega axis", () => {
    const dir = makeArtifactDir("sweep");
    const out = render({
      kind: "sweep",
      inputCsv: join(dir, "sweep.csv"),
      outputPath: join(root, "sweep.svg"),
    });
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain("mean expected score");
    expect(svg).toContain("mean delay (s)");
    expect(svg).toContain("utility");
    expect((svg.match(/<g transform/g) ?? []).length).toBe(3);
  });
});
