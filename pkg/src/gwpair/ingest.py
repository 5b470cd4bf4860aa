"""Speed-dating dataset ingest: CSV parsing and profile inference.

The expected input is the published speed-dating study layout: one row per
participant (or per participant-partner date when partner columns are
present), with 1-10 attribute self-ratings and a 100-point importance
allocation. Column names are configurable through a JSON mapping file and
default to the published names. Rows violating the record invariants land
in a rejection report instead of raising.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

from .errors import SchemaError
from .types import ATTRIBUTES, PersonalityProfile

IMPORTANCE_TOLERANCE = 0.5  # dataset rounding slack on the 100-point budget

DEFAULT_COLUMN_MAPPING: dict = {
    "participant_id": "iid",
    "gender": "gender",
    "age": "age",
    "partner_id": "pid",
    "decision": "dec",
    "self_ratings": {
        "attractiveness": "attr3_1",
        "sincerity": "sinc3_1",
        "intelligence": "intel3_1",
        "fun": "fun3_1",
        "ambition": "amb3_1",
        "shared_interests": "shar3_1",
    },
    "importance_t1": {
        "attractiveness": "attr1_1",
        "sincerity": "sinc1_1",
        "intelligence": "intel1_1",
        "fun": "fun1_1",
        "ambition": "amb1_1",
        "shared_interests": "shar1_1",
    },
    "importance_t2": {
        "attractiveness": "attr1_2",
        "sincerity": "sinc1_2",
        "intelligence": "intel1_2",
        "fun": "fun1_2",
        "ambition": "amb1_2",
        "shared_interests": "shar1_2",
    },
    "post_ratings": {
        "attractiveness": "attr",
        "sincerity": "sinc",
        "intelligence": "intel",
        "fun": "fun",
        "ambition": "amb",
        "shared_interests": "shar",
    },
}


@dataclass
class ParticipantRecord:
    participant_id: str
    gender: str
    age: int
    self_ratings: dict[str, float]
    importance_t1: dict[str, float]
    post_ratings: dict[tuple[str, str], float] = field(default_factory=dict)
    decisions: dict[str, bool] = field(default_factory=dict)
    importance_t2: dict[str, float] | None = None


@dataclass
class Rejection:
    row: int
    reason: str


def load_column_mapping(path: str | None) -> dict:
    if path is None:
        return DEFAULT_COLUMN_MAPPING
    with open(path, "r", encoding="utf-8") as fh:
        user = json.load(fh)
    merged = json.loads(json.dumps(DEFAULT_COLUMN_MAPPING))
    for key, value in user.items():
        if isinstance(value, dict):
            merged.setdefault(key, {}).update(value)
        else:
            merged[key] = value
    return merged


def _parse_float(raw: str, what: str) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ValueError(f"{what} value {raw!r} is not a number")


def _importance_from_row(row: dict, columns: dict, label: str) -> dict[str, float]:
    values = {}
    for attr in ATTRIBUTES:
        values[attr] = _parse_float(row[columns[attr]], f"{label} {attr}")
        if values[attr] < 0:
            raise ValueError(f"{label} {attr} is negative")
    total = sum(values.values())
    if abs(total - 100.0) > IMPORTANCE_TOLERANCE:
        raise ValueError(f"importance sum {total:g} != 100")
    return values


def parse_csv(
    path: str, mapping: dict | None = None
) -> tuple[list[ParticipantRecord], list[Rejection]]:
    """Parse participant records, collecting invalid rows into a report.

    Rows sharing a participant id are merged: the first row supplies the
    scalar fields, and every row carrying a partner id contributes that
    partner's post-ratings and decision.
    """
    mapping = mapping or DEFAULT_COLUMN_MAPPING
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError("CSV file has no header row")
        header = set(reader.fieldnames)
        required = [mapping["participant_id"], mapping["gender"], mapping["age"]]
        required += list(mapping["self_ratings"].values())
        required += list(mapping["importance_t1"].values())
        for column in required:
            if column not in header:
                raise SchemaError(f"missing required column: {column}")
        rows = list(reader)

    records: dict[str, ParticipantRecord] = {}
    order: list[str] = []
    rejections: list[Rejection] = []
    has_t2 = all(c in header for c in mapping["importance_t2"].values())
    partner_col = mapping.get("partner_id")
    has_partner = partner_col in header if partner_col else False

    for offset, row in enumerate(rows):
        line = offset + 2  # header is line 1
        try:
            pid = row[mapping["participant_id"]].strip()
            if not pid:
                raise ValueError("empty participant id")
            if pid not in records:
                ratings = {}
                for attr in ATTRIBUTES:
                    v = _parse_float(row[mapping["self_ratings"][attr]], f"self rating {attr}")
                    if not 1.0 <= v <= 10.0:
                        raise ValueError(f"self rating {attr}={v:g} outside [1, 10]")
                    ratings[attr] = v
                importance = _importance_from_row(row, mapping["importance_t1"], "importance")
                importance_t2 = None
                if has_t2 and all(row.get(c, "") != "" for c in mapping["importance_t2"].values()):
                    importance_t2 = _importance_from_row(
                        row, mapping["importance_t2"], "importance_t2"
                    )
                records[pid] = ParticipantRecord(
                    participant_id=pid,
                    gender=row[mapping["gender"]].strip(),
                    age=int(_parse_float(row[mapping["age"]], "age")),
                    self_ratings=ratings,
                    importance_t1=importance,
                    importance_t2=importance_t2,
                )
                order.append(pid)
            record = records[pid]
            if has_partner and row.get(partner_col, "").strip():
                partner = row[partner_col].strip()
                for attr in ATTRIBUTES:
                    col = mapping["post_ratings"][attr]
                    if row.get(col, "") != "":
                        v = _parse_float(row[col], f"post rating {attr}")
                        if not 1.0 <= v <= 10.0:
                            raise ValueError(f"post rating {attr}={v:g} outside [1, 10]")
                        record.post_ratings[(partner, attr)] = v
                dec_col = mapping.get("decision")
                if dec_col and row.get(dec_col, "") != "":
                    record.decisions[partner] = row[dec_col].strip() in ("1", "true", "True", "yes")
        except ValueError as exc:
            rejections.append(Rejection(row=line, reason=str(exc)))
    return [records[pid] for pid in order], rejections


def export_csv(records: list[ParticipantRecord], path: str, mapping: dict | None = None) -> None:
    """Write records back out in the same column layout parse_csv reads."""
    mapping = mapping or DEFAULT_COLUMN_MAPPING
    columns = [mapping["participant_id"], mapping["gender"], mapping["age"]]
    columns += [mapping["self_ratings"][a] for a in ATTRIBUTES]
    columns += [mapping["importance_t1"][a] for a in ATTRIBUTES]
    any_t2 = any(r.importance_t2 for r in records)
    any_partner = any(r.post_ratings or r.decisions for r in records)
    if any_t2:
        columns += [mapping["importance_t2"][a] for a in ATTRIBUTES]
    if any_partner:
        columns += [mapping["partner_id"], mapping["decision"]]
        columns += [mapping["post_ratings"][a] for a in ATTRIBUTES]

    def scalar_cells(record: ParticipantRecord) -> dict:
        cells = {
            mapping["participant_id"]: record.participant_id,
            mapping["gender"]: record.gender,
            mapping["age"]: str(record.age),
        }
        for a in ATTRIBUTES:
            cells[mapping["self_ratings"][a]] = format(record.self_ratings[a], "g")
            cells[mapping["importance_t1"][a]] = format(record.importance_t1[a], "g")
        if any_t2 and record.importance_t2:
            for a in ATTRIBUTES:
                cells[mapping["importance_t2"][a]] = format(record.importance_t2[a], "g")
        return cells

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, restval="")
        writer.writeheader()
        for record in records:
            partners = sorted({p for p, _ in record.post_ratings} | set(record.decisions))
            if not partners:
                writer.writerow(scalar_cells(record))
                continue
            for partner in partners:
                cells = scalar_cells(record)
                cells[mapping["partner_id"]] = partner
                if partner in record.decisions:
                    cells[mapping["decision"]] = "1" if record.decisions[partner] else "0"
                for a in ATTRIBUTES:
                    if (partner, a) in record.post_ratings:
                        cells[mapping["post_ratings"][a]] = format(
                            record.post_ratings[(partner, a)], "g"
                        )
                writer.writerow(cells)


def _norm(rating: float) -> float:
    return (rating - 1.0) / 9.0


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def infer_profile(record: ParticipantRecord) -> PersonalityProfile:
    """Map self-ratings and importance allocation to Big Five traits.

    Deterministic and centered: neutral inputs (all ratings 5.5, uniform
    importance) give 0.5 on every trait. Feature directions:

    * openness        up with intelligence self-rating and the importance
                      placed on shared interests (half weight each)
    * conscientiousness  up with ambition self-rating
    * extraversion    up with fun and attractiveness self-ratings
    * agreeableness   up with sincerity self-rating
    * neuroticism     down with the mean self-rating (inverted self-regard)
    """
    r = record.self_ratings
    shared_pull = record.importance_t1["shared_interests"] / (100.0 / 3.0)
    openness = _clamp01(0.5 * _norm(r["intelligence"]) + 0.5 * min(1.0, shared_pull))
    conscientiousness = _clamp01(_norm(r["ambition"]))
    extraversion = _clamp01(0.5 * _norm(r["fun"]) + 0.5 * _norm(r["attractiveness"]))
    agreeableness = _clamp01(_norm(r["sincerity"]))
    mean_rating = sum(r[a] for a in ATTRIBUTES) / len(ATTRIBUTES)
    neuroticism = _clamp01(1.0 - _norm(mean_rating))
    return PersonalityProfile(
        openness=openness,
        conscientiousness=conscientiousness,
        extraversion=extraversion,
        agreeableness=agreeableness,
        neuroticism=neuroticism,
    )
