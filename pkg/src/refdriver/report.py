"""Result/metric tables, the per-model summary, histogram files and SVG charts.

Every CSV starts with a ``# schema: <name>/<version>`` line followed by a
header whose column names carry their units. Floats are written with
``repr`` so a rerun produces byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Iterable, Sequence

from .engine import Exclusion, SimulationResult
from .kinematics import Trajectory
from .metrics import (AllZero, EventMetrics, Histogram, compute_event_metrics, histogram,
                      median, wilcoxon_signed_rank)
from .scenario import Scenario

RESULTS_SCHEMA = "results/1"
EXCLUDED_SCHEMA = "excluded/1"
METRICS_SCHEMA = "metrics/1"
HIST_SCHEMA = "histogram/1"
SUMMARY_SCHEMA = "summary/1"

RESULT_COLUMNS = ("scenario_id", "model", "human_onset_time_s", "brake_onset_time_s",
                  "detection_time_s", "collided", "collision_time_s", "min_gap_m", "end_reason")
EXCLUDED_COLUMNS = ("scenario_id", "model", "reason", "detail")
METRIC_COLUMNS = ("scenario_id", "model", "human_onset_s", "model_onset_s", "t_diff_s",
                  "crashed", "worst_case_crashed", "ldbo_human_m", "ldbo_model_m",
                  "ldbo_diff_m")
NEVER_BRAKED = "NeverBraked-timing-only"


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _opt_float(s: str) -> float | None:
    return None if s == "" else float(s)


def _write_csv(path: Path, schema: str, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    buf.write(f"# schema: {schema}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue(), encoding="utf-8")


def _read_csv(path: Path, schema: str) -> list[dict]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != f"# schema: {schema}":
        raise ValueError(f"{path}: expected '# schema: {schema}' header")
    return list(csv.DictReader(lines[1:]))


# -- results ---------------------------------------------------------------

def write_results(path, results: Iterable[SimulationResult]) -> None:
    _write_csv(Path(path), RESULTS_SCHEMA, RESULT_COLUMNS, (
        (r.scenario_id, r.model_name, r.human_onset_time, r.brake_onset_time,
         r.detection_time, r.collided, r.collision_time, r.min_gap, r.end_reason)
        for r in results))


def read_results(path) -> list[SimulationResult]:
    out = []
    for row in _read_csv(Path(path), RESULTS_SCHEMA):
        out.append(SimulationResult(
            scenario_id=row["scenario_id"], model_name=row["model"],
            brake_onset_time=_opt_float(row["brake_onset_time_s"]),
            collided=row["collided"] == "1",
            collision_time=_opt_float(row["collision_time_s"]),
            min_gap=float(row["min_gap_m"]), ego_trace=Trajectory([]),
            human_onset_time=_opt_float(row["human_onset_time_s"]),
            detection_time=_opt_float(row["detection_time_s"]),
            end_reason=row["end_reason"]))
    return out


def write_exclusions(path, excluded: Iterable[tuple[str, str, str, str]]) -> None:
    _write_csv(Path(path), EXCLUDED_SCHEMA, EXCLUDED_COLUMNS, excluded)


def read_exclusions(path) -> list[dict]:
    return _read_csv(Path(path), EXCLUDED_SCHEMA)


def scenario_exclusion_rows(excluded: Iterable[Exclusion]):
    return [(e.scenario_id, "*", e.reason, e.detail) for e in excluded]


# -- metrics -----------------------------------------------------------------

def event_metrics_table(results: Sequence[SimulationResult],
                        scenarios: dict[str, Scenario]) -> list[EventMetrics]:
    """One row per (scenario, braking model); needs the "none" run of each scenario."""
    by_key = {(r.scenario_id, r.model_name): r for r in results}
    rows = []
    for r in results:
        if r.model_name == "none":
            continue
        worst = by_key.get((r.scenario_id, "none"))
        if worst is None:
            raise ValueError(f"{r.scenario_id}: worst-case ('none') run missing")
        rows.append(compute_event_metrics(r.human_onset_time, r, worst,
                                          scenarios[r.scenario_id]))
    rows.sort(key=lambda m: (m.scenario_id, m.model_name))
    return rows


def write_metrics(path, rows: Iterable[EventMetrics]) -> None:
    _write_csv(Path(path), METRICS_SCHEMA, METRIC_COLUMNS, (
        (m.scenario_id, m.model_name, m.human_onset, m.model_onset, m.t_diff, m.crashed,
         m.worst_case_crashed, m.ldbo_human, m.ldbo_model, m.ldbo_diff) for m in rows))


def read_metrics(path) -> list[EventMetrics]:
    return [EventMetrics(row["scenario_id"], row["model"], _opt_float(row["t_diff_s"]),
                         row["crashed"] == "1", row["worst_case_crashed"] == "1",
                         float(row["ldbo_human_m"]), _opt_float(row["ldbo_model_m"]),
                         _opt_float(row["ldbo_diff_m"]), _opt_float(row["human_onset_s"]),
                         _opt_float(row["model_onset_s"]))
            for row in _read_csv(Path(path), METRICS_SCHEMA)]


def never_braked_rows(rows: Iterable[EventMetrics]):
    return [(m.scenario_id, m.model_name, NEVER_BRAKED, "model never requested braking")
            for m in rows if m.t_diff is None]


# -- summary -----------------------------------------------------------------

@dataclass(frozen=True)
class ModelSummary:
    model: str
    n_events: int
    n_reacted: int
    n_crashes: int
    n_no_crash: int
    worst_case_crashes: int
    crashes_among_worst_case: int
    median_t_diff: float | None
    fraction_earlier_than_human: float | None
    median_ldbo: float | None
    median_ldbo_human: float | None
    median_ldbo_diff: float | None
    fraction_ldbo_negative: float | None
    wilcoxon_t_diff: dict | None
    wilcoxon_ldbo: dict | None


def _wilcoxon_dict(values: list[float], alpha: float) -> dict | None:
    try:
        w = wilcoxon_signed_rank(values)
    except AllZero:
        return None
    d = asdict(w)
    d["significant"] = w.p_value < alpha
    return d


def summarize(rows: Sequence[EventMetrics], alpha: float = 0.01) -> list[ModelSummary]:
    out = []
    for model in sorted({m.model_name for m in rows}):
        ms = [m for m in rows if m.model_name == model]
        reacted = [m for m in ms if m.t_diff is not None]
        t_diffs = [m.t_diff for m in reacted]
        ldbo = [m.ldbo_model for m in reacted]
        ldbo_h = [m.ldbo_human for m in reacted]
        ldbo_d = [m.ldbo_diff for m in reacted]
        n_crash = sum(m.crashed for m in ms)
        out.append(ModelSummary(
            model=model, n_events=len(ms), n_reacted=len(reacted), n_crashes=n_crash,
            n_no_crash=len(ms) - n_crash,
            worst_case_crashes=sum(m.worst_case_crashed for m in ms),
            crashes_among_worst_case=sum(m.crashed and m.worst_case_crashed for m in ms),
            median_t_diff=median(t_diffs) if t_diffs else None,
            fraction_earlier_than_human=(sum(t < 0 for t in t_diffs) / len(t_diffs)
                                         if t_diffs else None),
            median_ldbo=median(ldbo) if ldbo else None,
            median_ldbo_human=median(ldbo_h) if ldbo_h else None,
            median_ldbo_diff=median(ldbo_d) if ldbo_d else None,
            fraction_ldbo_negative=sum(v < 0 for v in ldbo) / len(ldbo) if ldbo else None,
            wilcoxon_t_diff=_wilcoxon_dict(t_diffs, alpha) if t_diffs else None,
            wilcoxon_ldbo=_wilcoxon_dict(ldbo_d, alpha) if ldbo_d else None,
        ))
    # the worst-case run has no metrics rows of its own; its crashes ride along
    worst = dict(sorted({(m.scenario_id, m.worst_case_crashed) for m in rows}))
    if worst:
        n_crash = sum(worst.values())
        out.append(ModelSummary("none", len(worst), 0, n_crash, len(worst) - n_crash, n_crash,
                                n_crash, None, None, None, None, None, None, None, None))
    return out


def summary_document(rows: Sequence[EventMetrics], alpha: float = 0.01) -> dict:
    human = sorted({(m.scenario_id, m.ldbo_human) for m in rows})
    hvals = [v for _, v in human]
    return {
        "schema": SUMMARY_SCHEMA,
        "alpha": alpha,
        "event_table": "metrics.csv",
        "human": {
            "n_events": len(hvals),
            "median_ldbo": median(hvals) if hvals else None,
            "fraction_ldbo_negative": sum(v < 0 for v in hvals) / len(hvals) if hvals else None,
        },
        "models": [asdict(s) for s in summarize(rows, alpha)],
    }


def write_summary(path, doc: dict) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- histograms ----------------------------------------------------------------

def histogram_panels(rows: Sequence[EventMetrics], bin_time: float, bin_dist: float):
    """Histogram panels keyed by file stem, mirroring the t_diff and LDBO figures.

    Each panel is ``(Histogram, crash_counts_per_bin, x_label)``.
    """
    panels = {}

    def add(stem, pairs, width, label):
        pairs = [(v, c) for v, c in pairs if v is not None]
        h = histogram([v for v, _ in pairs], width)
        crash = [0] * len(h.counts)
        for v, c in pairs:
            if c and h.counts:
                k = math.floor(round(v / width, 9)) - round(h.bin_edges[0] / width)
                crash[k] += 1
        panels[stem] = (h, crash, label)

    human = sorted({(m.scenario_id, m.ldbo_human) for m in rows})
    add("hist_ldbo_human", [(v, False) for _, v in human], bin_dist, "LDBO human (m)")
    for model in sorted({m.model_name for m in rows}):
        ms = [m for m in rows if m.model_name == model]
        add(f"hist_tdiff_{model}", [(m.t_diff, m.crashed) for m in ms], bin_time,
            f"t_diff {model} (s)")
        add(f"hist_ldbo_{model}", [(m.ldbo_model, m.crashed) for m in ms], bin_dist,
            f"LDBO {model} (m)")
        add(f"hist_ldbo_diff_{model}", [(m.ldbo_diff, m.crashed) for m in ms], bin_dist,
            f"LDBO {model} - human (m)")
    return panels


def write_histogram_csv(path, h: Histogram, crash_counts: Sequence[int]) -> None:
    rows = [(h.bin_edges[i], h.bin_edges[i + 1], c, crash_counts[i])
            for i, c in enumerate(h.counts)]
    _write_csv(Path(path), HIST_SCHEMA, ("bin_start", "bin_end", "count", "crashed_count"),
               rows)


def histogram_svg(h: Histogram, crash_counts: Sequence[int], title: str,
                  width: int = 480, height: int = 260) -> str:
    """Minimal standalone bar chart; crashed events are stacked in red."""
    pad_l, pad_r, pad_t, pad_b = 40, 10, 24, 36
    pw, ph = width - pad_l - pad_r, height - pad_t - pad_b
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{width / 2:.1f}" y="16" text-anchor="middle" font-size="12" '
             f'font-family="sans-serif">{title}</text>']
    if h.counts:
        top = max(h.counts)
        bw = pw / len(h.counts)
        for i, (c, cc) in enumerate(zip(h.counts, crash_counts)):
            x = pad_l + i * bw
            bh = ph * c / top
            ch = ph * cc / top
            parts.append(f'<rect x="{x:.2f}" y="{pad_t + ph - bh:.2f}" width="{bw * 0.9:.2f}" '
                         f'height="{bh:.2f}" fill="#4c72b0"/>')
            if cc:
                parts.append(f'<rect x="{x:.2f}" y="{pad_t + ph - ch:.2f}" '
                             f'width="{bw * 0.9:.2f}" height="{ch:.2f}" fill="#c44e52"/>')
        step = max(1, len(h.bin_edges) // 8)
        for i in range(0, len(h.bin_edges), step):
            x = pad_l + i * bw
            parts.append(f'<text x="{x:.2f}" y="{height - 20}" text-anchor="middle" '
                         f'font-size="9" font-family="sans-serif">{h.bin_edges[i]:g}</text>')
        parts.append(f'<text x="{pad_l - 4}" y="{pad_t + 8}" text-anchor="end" font-size="9" '
                     f'font-family="sans-serif">{top}</text>')
    parts.append(f'<line x1="{pad_l}" y1="{pad_t + ph}" x2="{pad_l + pw}" y2="{pad_t + ph}" '
                 f'stroke="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
