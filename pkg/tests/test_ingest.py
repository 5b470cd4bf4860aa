"""Dataset parsing, rejection reporting, round-trips, profile inference."""

import pytest

from gwpair import export_csv, infer_profile, parse_csv
from gwpair.errors import SchemaError
from gwpair.ingest import ParticipantRecord
from gwpair.types import ATTRIBUTES

from conftest import FIXTURES


def test_six_row_fixture_parses_cleanly():
    records, rejections = parse_csv(str(FIXTURES / "participants_6.csv"))
    assert len(records) == 6
    assert rejections == []
    for record in records:
        assert set(record.self_ratings) == set(ATTRIBUTES)
        assert abs(sum(record.importance_t1.values()) - 100.0) <= 0.5


def test_bad_importance_row_rejected_with_reason():
    records, rejections = parse_csv(str(FIXTURES / "participants_bad_importance.csv"))
    assert len(records) == 1
    assert len(rejections) == 1
    assert rejections[0].row == 3  # header is line 1
    assert "importance sum 90" in rejections[0].reason
    assert "100" in rejections[0].reason


def test_missing_required_column_names_it(tmp_path):
    path = tmp_path / "broken.csv"
    path.write_text("iid,gender\np1,m\n")
    with pytest.raises(SchemaError) as err:
        parse_csv(str(path))
    assert "age" in str(err.value)


def test_out_of_range_rating_rejected(tmp_path):
    src = (FIXTURES / "participants_6.csv").read_text().splitlines()
    row = src[1].split(",")
    row[3] = "11"  # attractiveness self-rating out of range
    path = tmp_path / "range.csv"
    path.write_text("\n".join([src[0], ",".join(row)]) + "\n")
    records, rejections = parse_csv(str(path))
    assert records == []
    assert "outside [1, 10]" in rejections[0].reason


def test_csv_roundtrip_identity(tmp_path):
    records, _ = parse_csv(str(FIXTURES / "participants_6.csv"))
    out = tmp_path / "roundtrip.csv"
    export_csv(records, str(out))
    reparsed, rejections = parse_csv(str(out))
    assert rejections == []
    assert reparsed == records


def test_roundtrip_with_partner_rows(tmp_path):
    records, _ = parse_csv(str(FIXTURES / "participants_6.csv"))
    records[0].post_ratings = {("p2", a): 6.0 for a in ATTRIBUTES}
    records[0].decisions = {"p2": True}
    out = tmp_path / "partner.csv"
    export_csv(records, str(out))
    reparsed, rejections = parse_csv(str(out))
    assert rejections == []
    assert reparsed == records


def neutral_record(**overrides):
    ratings = {a: 5.5 for a in ATTRIBUTES}
    importance = {a: 100.0 / 6.0 for a in ATTRIBUTES}
    ratings.update(overrides.pop("ratings", {}))
    importance.update(overrides.pop("importance", {}))
    return ParticipantRecord(
        participant_id="p", gender="f", age=30,
        self_ratings=ratings, importance_t1=importance,
    )


class TestInferProfile:
    def test_neutral_inputs_center_all_traits(self):
        profile = infer_profile(neutral_record())
        for value in profile.as_dict().values():
            assert value == pytest.approx(0.5, abs=0.05)

    def test_agreeableness_monotone_in_sincerity(self):
        previous = None
        for step in range(19):
            rating = 1.0 + step * 0.5
            profile = infer_profile(neutral_record(ratings={"sincerity": rating}))
            if previous is not None:
                assert profile.agreeableness >= previous
            previous = profile.agreeableness

    def test_all_outputs_in_range_over_fixture_corpus(self):
        records, _ = parse_csv(str(FIXTURES / "participants_6.csv"))
        records8, _ = parse_csv(str(FIXTURES / "participants_8.csv"))
        for record in records + records8:
            profile = infer_profile(record)
            for value in profile.as_dict().values():
                assert 0.0 <= value <= 1.0

    def test_deterministic(self):
        record = neutral_record(ratings={"fun": 8.0}, importance={})
        assert infer_profile(record) == infer_profile(record)
