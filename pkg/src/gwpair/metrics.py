"""Evolution metrics over T1/T2 snapshots.

Percent changes are population-level (change of means) by default, with a
per-agent paired variant behind a flag. Reported spreads are sample
standard deviations and labeled as such. No significance testing.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

from .errors import ContractViolation
from .types import ATTRIBUTES

T1 = "T1"
T2 = "T2"


class UndefinedMetricError(ContractViolation):
    """The metric is undefined for this input (zero baseline or variance)."""


@dataclass
class SnapshotRow:
    agent_id: str
    time_label: str
    importance: dict[str, float]
    self_ratings: dict[str, float]
    received_ratings: dict[str, float] = field(default_factory=dict)
    overall_liking: float | None = None


@dataclass
class SnapshotTable:
    rows: list[SnapshotRow]

    def __post_init__(self):
        seen = set()
        for row in self.rows:
            if row.time_label not in (T1, T2):
                raise ContractViolation(f"bad time label {row.time_label!r}")
            key = (row.agent_id, row.time_label)
            if key in seen:
                raise ContractViolation(f"duplicate snapshot for {key}")
            seen.add(key)
            for name, mapping in (("importance", row.importance), ("self_ratings", row.self_ratings)):
                missing = set(ATTRIBUTES) - set(mapping)
                if missing:
                    raise ContractViolation(f"{name} missing attributes: {sorted(missing)}")

    def at(self, time_label: str) -> list[SnapshotRow]:
        return [r for r in self.rows if r.time_label == time_label]


def pearson(xs: list[float], ys: list[float]) -> float:
    """Sample Pearson correlation coefficient."""
    if len(xs) != len(ys):
        raise ContractViolation("pearson inputs must have equal length")
    n = len(xs)
    if n < 3:
        raise ContractViolation("pearson needs at least 3 points")
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    var_x = sum(d * d for d in dx)
    var_y = sum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise UndefinedMetricError("pearson undefined: zero variance")
    return sum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)


def percent_change(
    table: SnapshotTable, field_name: str, per_agent: bool = False
) -> dict[str, float]:
    """Per attribute: 100 * (mean_T2 - mean_T1) / mean_T1.

    With ``per_agent`` the change is computed per paired agent and then
    averaged, instead of comparing population means.
    """
    rows_t1 = table.at(T1)
    rows_t2 = table.at(T2)
    if not rows_t1 or not rows_t2:
        raise ContractViolation("both time labels must be present")

    def value(row: SnapshotRow, attr: str) -> float:
        return getattr(row, field_name)[attr]

    out: dict[str, float] = {}
    for attr in ATTRIBUTES:
        if per_agent:
            by_id_t2 = {r.agent_id: r for r in rows_t2}
            changes = []
            for r1 in rows_t1:
                if r1.agent_id not in by_id_t2:
                    continue
                v1 = value(r1, attr)
                if v1 == 0.0:
                    raise UndefinedMetricError(f"percent change undefined for {attr}: T1 value 0")
                changes.append(100.0 * (value(by_id_t2[r1.agent_id], attr) - v1) / v1)
            if not changes:
                raise ContractViolation("no paired agents across T1/T2")
            out[attr] = sum(changes) / len(changes)
        else:
            mean_t1 = sum(value(r, attr) for r in rows_t1) / len(rows_t1)
            mean_t2 = sum(value(r, attr) for r in rows_t2) / len(rows_t2)
            if mean_t1 == 0.0:
                raise UndefinedMetricError(f"percent change undefined for {attr}: T1 mean 0")
            out[attr] = 100.0 * (mean_t2 - mean_t1) / mean_t1
    return out


def match_accuracy(predicted: list[bool], actual: list[bool]) -> float:
    """Percent agreement between aligned boolean decision lists."""
    if len(predicted) != len(actual):
        raise ContractViolation("decision lists must be aligned")
    if not predicted:
        raise UndefinedMetricError("match accuracy undefined for empty lists")
    agreements = sum(1 for p, a in zip(predicted, actual) if p == a)
    return 100.0 * agreements / len(predicted)


def self_other_gap(table: SnapshotTable) -> tuple[float, float]:
    """Mean |self rating - received rating| over agents and attributes,
    at T1 and at T2. Rows without received ratings are skipped."""
    gaps = []
    for label in (T1, T2):
        diffs = []
        for row in table.at(label):
            if not row.received_ratings:
                continue
            for attr in ATTRIBUTES:
                if attr in row.received_ratings:
                    diffs.append(abs(row.self_ratings[attr] - row.received_ratings[attr]))
        if not diffs:
            raise UndefinedMetricError(f"self-other gap undefined at {label}: no received ratings")
        gaps.append(sum(diffs) / len(diffs))
    return gaps[0], gaps[1]


def sample_sd(values: list[float]) -> float:
    n = len(values)
    if n < 2:
        return 0.0
    mean = sum(values) / n
    return math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))


def format_signed_percent(x: float) -> str:
    return f"{x:+.1f}%"


def format_percent(x: float) -> str:
    return f"{x:.1f}%"


def table_from_event_json(doc: dict) -> SnapshotTable:
    """Build the snapshot table from a simulation export.

    Received ratings at T1 are each partner's rating state at session start
    (the agent's own T1 self-image, which is how sessions are seeded);
    received ratings at T2 average the partners' final session ratings.
    """
    received_t2: dict[str, dict[str, list[float]]] = {}
    liking: dict[str, list[float]] = {}
    for session in doc.get("sessions", []):
        i, j = session["pair"]
        for rater, rated in ((i, j), (j, i)):
            evaluation = session["evaluations"].get(rater)
            if not evaluation:
                continue
            bucket = received_t2.setdefault(rated, {a: [] for a in ATTRIBUTES})
            for a in ATTRIBUTES:
                bucket[a].append(evaluation["partner_ratings"][a])
            liking.setdefault(rated, []).append(evaluation["overall_liking"])

    rows = []
    for participant in doc["participants"]:
        agent_id = participant["agent_id"]
        t1 = participant["t1"]
        t2 = participant["t2"]
        rows.append(
            SnapshotRow(
                agent_id=agent_id,
                time_label=T1,
                importance=t1["importance"],
                self_ratings=t1["self_ratings"],
                received_ratings=dict(t1["self_ratings"]),
            )
        )
        recv = {
            a: sum(vals) / len(vals)
            for a, vals in received_t2.get(agent_id, {}).items()
            if vals
        }
        rows.append(
            SnapshotRow(
                agent_id=agent_id,
                time_label=T2,
                importance=t2["importance"],
                self_ratings=t2["self_ratings"],
                received_ratings=recv,
                overall_liking=(
                    sum(liking[agent_id]) / len(liking[agent_id])
                    if agent_id in liking
                    else None
                ),
            )
        )
    return SnapshotTable(rows)


_CSV_COLUMNS = (
    ["agent_id", "time"]
    + [f"importance_{a}" for a in ATTRIBUTES]
    + [f"self_{a}" for a in ATTRIBUTES]
    + [f"received_{a}" for a in ATTRIBUTES]
    + ["overall_liking"]
)


def table_from_csv(path: str) -> SnapshotTable:
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for raw in csv.DictReader(fh):
            received = {
                a: float(raw[f"received_{a}"])
                for a in ATTRIBUTES
                if raw.get(f"received_{a}", "") != ""
            }
            rows.append(
                SnapshotRow(
                    agent_id=raw["agent_id"],
                    time_label=raw["time"],
                    importance={a: float(raw[f"importance_{a}"]) for a in ATTRIBUTES},
                    self_ratings={a: float(raw[f"self_{a}"]) for a in ATTRIBUTES},
                    received_ratings=received,
                    overall_liking=(
                        float(raw["overall_liking"]) if raw.get("overall_liking") else None
                    ),
                )
            )
    return SnapshotTable(rows)


def table_to_csv(table: SnapshotTable, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_CSV_COLUMNS, restval="")
        writer.writeheader()
        for row in table.rows:
            cells = {"agent_id": row.agent_id, "time": row.time_label}
            for a in ATTRIBUTES:
                cells[f"importance_{a}"] = format(row.importance[a], "g")
                cells[f"self_{a}"] = format(row.self_ratings[a], "g")
                if a in row.received_ratings:
                    cells[f"received_{a}"] = format(row.received_ratings[a], "g")
            if row.overall_liking is not None:
                cells["overall_liking"] = format(row.overall_liking, "g")
            writer.writerow(cells)


def build_report(table: SnapshotTable, matches: dict | None = None) -> dict:
    """Full evolution report: preference and self-perception changes, the
    self-other gap, and attribute-liking correlations where defined."""
    report: dict = {"spread_estimator": "sample_sd"}
    report["preference_evolution"] = {
        a: {"change_pct": v, "formatted": format_signed_percent(v)}
        for a, v in percent_change(table, "importance").items()
    }
    report["self_perception_evolution"] = {
        a: {"change_pct": v, "formatted": format_signed_percent(v)}
        for a, v in percent_change(table, "self_ratings").items()
    }
    try:
        gap_t1, gap_t2 = self_other_gap(table)
        report["self_other_gap"] = {"t1": gap_t1, "t2": gap_t2}
    except UndefinedMetricError:
        report["self_other_gap"] = None

    correlations: dict[str, dict] = {}
    for label in (T1, T2):
        rows = [r for r in table.at(label) if r.overall_liking is not None and r.received_ratings]
        for attr in ATTRIBUTES:
            xs = [r.received_ratings[attr] for r in rows if attr in r.received_ratings]
            ys = [r.overall_liking for r in rows if attr in r.received_ratings]
            cell = correlations.setdefault(attr, {})
            try:
                cell[label.lower()] = pearson(xs, ys)
            except ContractViolation:
                cell[label.lower()] = None
    report["attribute_liking_correlations"] = correlations

    if matches:
        predicted = [bool(v) for v in matches.get("predicted", [])]
        actual = [bool(v) for v in matches.get("actual", [])]
        if predicted and actual:
            acc = match_accuracy(predicted, actual)
            report["match_accuracy"] = {"percent": acc, "formatted": format_percent(acc)}
    return report


def report_to_csv(report: dict) -> str:
    lines = ["section,attribute,value"]
    for section in ("preference_evolution", "self_perception_evolution"):
        for attr, cell in report.get(section, {}).items():
            lines.append(f"{section},{attr},{cell['change_pct']:.6f}")
    gap = report.get("self_other_gap")
    if gap:
        lines.append(f"self_other_gap,t1,{gap['t1']:.6f}")
        lines.append(f"self_other_gap,t2,{gap['t2']:.6f}")
    if "match_accuracy" in report:
        lines.append(f"match_accuracy,,{report['match_accuracy']['percent']:.6f}")
    return "\n".join(lines) + "\n"


def write_report(report: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")
