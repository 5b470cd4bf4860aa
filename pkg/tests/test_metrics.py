"""Metric formulas against independent oracles, plus report formatting."""

import math
import random

import pytest

from gwpair import (
    SnapshotRow,
    SnapshotTable,
    match_accuracy,
    pearson,
    percent_change,
    self_other_gap,
)
from gwpair.errors import ContractViolation
from gwpair.metrics import (
    UndefinedMetricError,
    build_report,
    format_percent,
    format_signed_percent,
    table_from_csv,
    table_to_csv,
)
from gwpair.types import ATTRIBUTES


def oracle_pearson(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = math.sqrt(sum((x - mx) ** 2 for x in xs)) * math.sqrt(
        sum((y - my) ** 2 for y in ys)
    )
    return num / den


def make_table(t1_value, t2_value, agents=4, received=None):
    rows = []
    for i in range(agents):
        for label, value in (("T1", t1_value), ("T2", t2_value)):
            rows.append(
                SnapshotRow(
                    agent_id=f"a{i}",
                    time_label=label,
                    importance={a: value for a in ATTRIBUTES},
                    self_ratings={a: 5.0 for a in ATTRIBUTES},
                    received_ratings=dict(received or {}),
                )
            )
    return SnapshotTable(rows)


class TestPearson:
    def test_perfect_linearity(self):
        xs = [1.0, 2.0, 3.0, 4.0]
        assert pearson(xs, [2 * x + 1 for x in xs]) == pytest.approx(1.0)

    def test_anti_linearity(self):
        xs = [1.0, 2.0, 3.0, 4.0]
        assert pearson(xs, [-x for x in xs]) == pytest.approx(-1.0)

    def test_against_textbook_oracle_on_500_random_instances(self):
        rng = random.Random(23)
        for _ in range(500):
            n = rng.randint(3, 40)
            xs = [rng.uniform(-10, 10) for _ in range(n)]
            ys = [rng.uniform(-10, 10) for _ in range(n)]
            assert pearson(xs, ys) == pytest.approx(oracle_pearson(xs, ys), abs=1e-12)

    def test_symmetry_and_affine_invariance(self):
        rng = random.Random(29)
        xs = [rng.random() for _ in range(20)]
        ys = [rng.random() for _ in range(20)]
        r = pearson(xs, ys)
        assert pearson(ys, xs) == pytest.approx(r, abs=1e-12)
        assert pearson([3 * x + 7 for x in xs], ys) == pytest.approx(r, abs=1e-9)

    def test_zero_variance_rejected(self):
        with pytest.raises(UndefinedMetricError):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_short_input_rejected(self):
        with pytest.raises(ContractViolation):
            pearson([1.0, 2.0], [1.0, 2.0])


class TestPercentChange:
    def test_twenty_to_27_8_formats_as_plus_39_percent(self):
        table = make_table(20.0, 27.8)
        change = percent_change(table, "importance")
        for attr in ATTRIBUTES:
            assert change[attr] == pytest.approx(39.0, abs=1e-9)
            assert format_signed_percent(change[attr]) == "+39.0%"

    def test_identity(self):
        change = percent_change(make_table(15.0, 15.0), "importance")
        assert all(v == pytest.approx(0.0) for v in change.values())

    def test_zero_baseline_rejected(self):
        with pytest.raises(UndefinedMetricError):
            percent_change(make_table(0.0, 5.0), "importance")

    def test_against_two_pass_oracle_on_random_tables(self):
        rng = random.Random(37)
        for _ in range(200):
            rows = []
            t1_values, t2_values = {}, {}
            for i in range(rng.randint(1, 10)):
                for label, bucket in (("T1", t1_values), ("T2", t2_values)):
                    importance = {a: rng.uniform(1, 40) for a in ATTRIBUTES}
                    bucket.setdefault("rows", []).append(importance)
                    rows.append(
                        SnapshotRow(
                            agent_id=f"a{i}",
                            time_label=label,
                            importance=importance,
                            self_ratings={a: 5.0 for a in ATTRIBUTES},
                        )
                    )
            got = percent_change(SnapshotTable(rows), "importance")
            for attr in ATTRIBUTES:
                mean1 = sum(r[attr] for r in t1_values["rows"]) / len(t1_values["rows"])
                mean2 = sum(r[attr] for r in t2_values["rows"]) / len(t2_values["rows"])
                assert got[attr] == pytest.approx(100.0 * (mean2 - mean1) / mean1, abs=1e-12)

    def test_invariant_under_row_duplication(self):
        table = make_table(10.0, 13.0, agents=2)
        doubled = SnapshotTable(
            table.rows
            + [
                SnapshotRow(
                    agent_id=f"b{i}",
                    time_label=row.time_label,
                    importance=dict(row.importance),
                    self_ratings=dict(row.self_ratings),
                )
                for i, row in enumerate(table.rows)
            ]
        )
        assert percent_change(table, "importance") == pytest.approx(
            percent_change(doubled, "importance")
        )


class TestMatchAccuracy:
    def test_seven_of_nine_formats_as_77_8_percent(self):
        predicted = [True] * 7 + [False, False]
        actual = [True] * 7 + [True, True]
        accuracy = match_accuracy(predicted, actual)
        assert format_percent(accuracy) == "77.8%"

    def test_identity_is_100(self):
        rng = random.Random(41)
        for _ in range(50):
            xs = [rng.random() < 0.5 for _ in range(rng.randint(1, 30))]
            assert match_accuracy(xs, list(xs)) == 100.0

    def test_against_counting_oracle(self):
        rng = random.Random(43)
        for _ in range(500):
            n = rng.randint(1, 50)
            predicted = [rng.random() < 0.5 for _ in range(n)]
            actual = [rng.random() < 0.5 for _ in range(n)]
            expected = 100.0 * sum(p == a for p, a in zip(predicted, actual)) / n
            assert match_accuracy(predicted, actual) == pytest.approx(expected, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(UndefinedMetricError):
            match_accuracy([], [])


class TestSelfOtherGap:
    def test_zero_when_self_equals_received(self):
        received = {a: 5.0 for a in ATTRIBUTES}
        table = make_table(10.0, 10.0, received=received)
        assert self_other_gap(table) == (0.0, 0.0)

    def test_known_gap(self):
        received = {a: 6.0 for a in ATTRIBUTES}
        table = make_table(10.0, 10.0, received=received)
        assert self_other_gap(table) == (pytest.approx(1.0), pytest.approx(1.0))


def test_snapshot_csv_roundtrip(tmp_path):
    table = make_table(12.0, 15.0, received={a: 6.0 for a in ATTRIBUTES})
    path = tmp_path / "snapshots.csv"
    table_to_csv(table, str(path))
    reparsed = table_from_csv(str(path))
    assert len(reparsed.rows) == len(table.rows)
    assert reparsed.rows[0].importance == table.rows[0].importance


def test_build_report_shape():
    table = make_table(20.0, 27.8, received={a: 6.0 for a in ATTRIBUTES})
    report = build_report(
        table, matches={"predicted": [True] * 7 + [False] * 2, "actual": [True] * 9}
    )
    assert report["preference_evolution"]["fun"]["formatted"] == "+39.0%"
    assert report["match_accuracy"]["formatted"] == "77.8%"
    assert report["self_other_gap"] is not None
    assert report["spread_estimator"] == "sample_sd"


def test_percent_change_per_agent_variant():
    rows = []
    # Agent a doubles (+100%), agent b halves (-50%): per-agent mean is +25%,
    # population-mean change is 0% (3 -> 3).
    for agent_id, t1, t2 in (("a", 2.0, 4.0), ("b", 4.0, 2.0)):
        rows.append(SnapshotRow(agent_id, "T1", {a: t1 for a in ATTRIBUTES},
                                {a: 5.0 for a in ATTRIBUTES}))
        rows.append(SnapshotRow(agent_id, "T2", {a: t2 for a in ATTRIBUTES},
                                {a: 5.0 for a in ATTRIBUTES}))
    table = SnapshotTable(rows)
    population = percent_change(table, "importance")["fun"]
    per_agent = percent_change(table, "importance", per_agent=True)["fun"]
    assert population == pytest.approx(0.0)
    assert per_agent == pytest.approx(25.0)
