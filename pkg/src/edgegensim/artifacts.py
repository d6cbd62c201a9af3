"""Bit-stable artifact serialization.

Floats are always written with 17 significant digits, rows in fixed order,
newlines fixed to \\n, no timestamps — identical inputs produce identical
bytes. Every artifact embeds the config fingerprint: JSON as a key, CSV as
a leading `# fingerprint:` comment line before the header.
"""

import math
import os

FLOAT_FMT = "{:.17g}"

SLOTS_HEADER = ["slot", "strategy", "mean_score", "mean_delay_s", "utility", "n_tasks"]
TASKS_HEADER = [
    "task_id", "slot", "category", "latent_quality",
    "model_id", "steps", "score", "delay_s",
]
PLANS_HEADER = ["slot", "strategy", "model_id", "steps", "gamma_tflops", "n_m"]
COMPARE_HEADER = ["strategy", "metric", "value"]
SWEEP_HEADER = ["omega", "mean_score", "mean_delay_s", "utility"]


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return FLOAT_FMT.format(value)
    return str(value)


def json_text(obj, indent: int = 0) -> str:
    """Deterministic JSON with fixed float formatting.

    The stdlib encoder does not let us pin float formatting, so this walks
    the structure itself. Dict insertion order is preserved (construction
    order is deterministic everywhere in this package).
    """
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float)):
        return fmt(obj)
    if isinstance(obj, str):
        import json as _json

        return _json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(inner + json_text(v, indent + 1) for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        import json as _json

        items = ",\n".join(
            inner + _json.dumps(str(k)) + ": " + json_text(v, indent + 1)
            for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_text(path: str, text: str):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def csv_text(header: list, rows: list, fingerprint: str) -> str:
    lines = [f"# fingerprint: {fingerprint}", ",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def read_csv(path: str) -> list:
    """Read one of our CSVs back: list of dicts, comment lines skipped."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    rows = [ln for ln in lines if not ln.startswith("#")]
    header = rows[0].split(",")
    return [dict(zip(header, ln.split(","))) for ln in rows[1:]]


def read_fingerprint(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().strip()
    if first.startswith("# fingerprint:"):
        return first.split(":", 1)[1].strip()
    return ""


# ---------------------------------------------------------------------------
# Report -> artifact rows
# ---------------------------------------------------------------------------

def slots_rows(report) -> list:
    return [
        [s.slot, report.strategy, s.mean_score, s.mean_delay, s.utility, len(s.records)]
        for s in report.slots
    ]


def tasks_rows(report, categories) -> list:
    label_of = {c.category_id: c.label for c in categories}
    rows = []
    for s in report.slots:
        for r in sorted(s.records, key=lambda r: r.task_id):
            rows.append(
                [
                    r.task_id, s.slot, label_of[r.category_id], r.latent_quality,
                    r.model_id, r.steps, r.score, r.delay_s,
                ]
            )
    return rows


def plans_rows(report) -> list:
    rows = []
    for s in report.slots:
        for m in sorted(s.plan.steps):
            rows.append(
                [
                    s.slot, report.strategy, m, s.plan.steps[m],
                    s.plan.resource[m], s.model_counts.get(m, 0),
                ]
            )
    return rows


def compare_rows(reports: dict, profiles: dict) -> list:
    """Long-format (strategy, metric, value) rows, fixed metric order."""
    rows = []
    names = {m: profiles[m].name for m in sorted(profiles)}
    for label, rep in reports.items():
        rows.append([label, "mean_score", rep.mean_score])
        rows.append([label, "mean_delay_s", rep.mean_delay])
        rows.append([label, "mean_utility", rep.mean_utility])
        for m, name in names.items():
            if m in rep.model_counts:
                rows.append([label, f"mean_score[{name}]", rep.model_mean_score[m]])
                rows.append([label, f"mean_delay_s[{name}]", rep.model_mean_delay[m]])
                rows.append([label, f"n_tasks[{name}]", rep.model_counts[m]])
    return rows


def run_report_dict(report) -> dict:
    """Full JSON form of a run report."""
    return {
        "fingerprint": report.fingerprint,
        "strategy": report.strategy,
        "seed": report.seed,
        "aggregates": {
            "mean_score": report.mean_score,
            "mean_delay_s": report.mean_delay,
            "mean_utility": report.mean_utility,
            "mean_expected_score": report.mean_expected_score,
            "mean_expected_utility": report.mean_expected_utility,
            "per_model": {
                str(m): {
                    "mean_score": report.model_mean_score[m],
                    "mean_delay_s": report.model_mean_delay[m],
                    "n_tasks": report.model_counts[m],
                }
                for m in sorted(report.model_counts)
            },
        },
        "slots": [
            {
                "slot": s.slot,
                "mean_score": s.mean_score,
                "mean_delay_s": s.mean_delay,
                "utility": s.utility,
                "mean_expected_score": s.mean_expected_score,
                "expected_utility": s.expected_utility,
                "plan": {
                    str(m): {
                        "steps": s.plan.steps[m],
                        "gamma_tflops": s.plan.resource[m],
                        "n_m": s.model_counts.get(m, 0),
                    }
                    for m in sorted(s.plan.steps)
                },
                "tasks": [
                    {
                        "task_id": r.task_id,
                        "category_id": r.category_id,
                        "latent_quality": r.latent_quality,
                        "model_id": r.model_id,
                        "steps": r.steps,
                        "score": r.score,
                        "delay_s": r.delay_s,
                        "expected_score": r.expected_score,
                    }
                    for r in sorted(s.records, key=lambda r: r.task_id)
                ],
            }
            for s in report.slots
        ],
    }


def write_run_artifacts(out_dir: str, report, categories, fingerprint: str,
                        formats=("csv", "json")) -> list:
    """Write run.json + slots/tasks/plans CSVs for one report; returns paths."""
    written = []
    if "json" in formats:
        path = os.path.join(out_dir, "run.json")
        write_text(path, json_text(run_report_dict(report)) + "\n")
        written.append(path)
    if "csv" in formats:
        for name, header, rows in (
            ("slots.csv", SLOTS_HEADER, slots_rows(report)),
            ("tasks.csv", TASKS_HEADER, tasks_rows(report, categories)),
            ("plans.csv", PLANS_HEADER, plans_rows(report)),
        ):
            path = os.path.join(out_dir, name)
            write_text(path, csv_text(header, rows, fingerprint))
            written.append(path)
    return written
