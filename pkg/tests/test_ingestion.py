"""Score-table and round-sequence loading, validation, and round-trips."""

from __future__ import annotations

import json

import pytest

from swissrank import (
    DomainError,
    DuplicateDatasetError,
    DuplicateModelError,
    MissingPolicy,
    MissingScoreError,
    ParseError,
    UnknownDatasetError,
    load_round_sequence,
    load_score_table,
    save_score_table,
    validate_inputs,
)

from conftest import one_dataset_rounds, simple_table


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadScoreTable:
    def test_csv_two_models_three_datasets(self, tmp_path):
        path = write(
            tmp_path / "scores.csv",
            "model,d1,d2,d3\nalpha,80,70.5,60\nbeta,55,90,100\n",
        )
        table = load_score_table(path)
        assert table.models == ("alpha", "beta")
        assert table.datasets == ("d1", "d2", "d3")
        assert len(table.scores) == 2 and len(table.scores[0]) == 3
        assert table.score("alpha", "d2") == 70.5

    def test_csv_empty_cell_is_missing(self, tmp_path):
        path = write(tmp_path / "scores.csv", "model,d1,d2\nalpha,80,\nbeta,55,90\n")
        table = load_score_table(path)
        missing = [v for row in table.scores for v in row if v is None]
        assert len(missing) == 1
        assert table.score("alpha", "d2") is None

    def test_csv_out_of_range_names_cell(self, tmp_path):
        path = write(tmp_path / "scores.csv", "model,d1\nalpha,135.0\n")
        with pytest.raises(DomainError) as excinfo:
            load_score_table(path)
        assert "alpha" in str(excinfo.value) and "d1" in str(excinfo.value)

    def test_csv_duplicate_model(self, tmp_path):
        path = write(tmp_path / "scores.csv", "model,d1\nalpha,10\nalpha,20\n")
        with pytest.raises(DuplicateModelError):
            load_score_table(path)

    def test_csv_garbage_cell(self, tmp_path):
        path = write(tmp_path / "scores.csv", "model,d1\nalpha,not-a-number\n")
        with pytest.raises(ParseError):
            load_score_table(path)

    def test_json_with_null(self, tmp_path):
        payload = {"models": ["a", "b"], "datasets": ["d1"], "scores": [[50.0], [None]]}
        path = write(tmp_path / "scores.json", json.dumps(payload))
        table = load_score_table(path)
        assert table.score("b", "d1") is None

    def test_json_bad_shape(self, tmp_path):
        payload = {"models": ["a"], "datasets": ["d1", "d2"], "scores": [[50.0]]}
        path = write(tmp_path / "scores.json", json.dumps(payload))
        with pytest.raises(ParseError):
            load_score_table(path)


class TestRoundTrip:
    @pytest.mark.parametrize("format", ["csv", "json"])
    def test_save_and_reload_identical(self, tmp_path, format):
        table = simple_table(
            ["alpha", "beta"],
            ["d1", "d2", "d3"],
            [[80.0, None, 33.333333333333336], [0.0, 100.0, 0.1]],
        )
        path = tmp_path / f"scores.{format}"
        save_score_table(table, path, format)
        reloaded = load_score_table(path, format)
        assert reloaded == table


class TestLoadRoundSequence:
    def test_twelve_rounds(self, tmp_path):
        payload = [
            {"label": f"round{k}", "datasets": [f"d{k}a", f"d{k}b"]} for k in range(12)
        ]
        path = write(tmp_path / "seq.json", json.dumps(payload))
        seq = load_round_sequence(path)
        assert seq.k == 12
        assert seq.rounds[0].label == "round0"

    def test_single_round(self, tmp_path):
        path = write(tmp_path / "seq.json", '[{"label": "only", "datasets": ["d1"]}]')
        assert load_round_sequence(path).k == 1

    def test_duplicate_dataset_across_rounds(self, tmp_path):
        payload = [
            {"label": "r1", "datasets": ["d1"]},
            {"label": "r2", "datasets": ["d2"]},
            {"label": "r3", "datasets": ["IFEval"]},
            {"label": "r4", "datasets": ["IFEval"]},
        ]
        path = write(tmp_path / "seq.json", json.dumps(payload))
        with pytest.raises(DuplicateDatasetError):
            load_round_sequence(path)

    def test_empty_sequence_rejected(self, tmp_path):
        path = write(tmp_path / "seq.json", "[]")
        with pytest.raises(ParseError):
            load_round_sequence(path)


class TestValidateInputs:
    def test_complete_passthrough(self):
        table = simple_table(["a", "b"], ["d1", "d2"], [[1.0, 2.0], [3.0, 4.0]])
        seq = one_dataset_rounds(["d1", "d2"])
        inputs = validate_inputs(table, seq, MissingPolicy.ERROR)
        assert inputs.table is table
        assert inputs.missing_cells == frozenset()

    def test_missing_cell_error_policy(self):
        table = simple_table(["a", "b"], ["d1"], [[None], [3.0]])
        seq = one_dataset_rounds(["d1"])
        with pytest.raises(MissingScoreError) as excinfo:
            validate_inputs(table, seq, MissingPolicy.ERROR)
        assert "a" in str(excinfo.value) and "d1" in str(excinfo.value)

    def test_missing_cell_loss_policy_flagged(self):
        table = simple_table(["a", "b"], ["d1"], [[None], [3.0]])
        seq = one_dataset_rounds(["d1"])
        inputs = validate_inputs(table, seq, MissingPolicy.TREAT_AS_LOSS)
        assert inputs.missing_cells == frozenset({(0, 0)})

    def test_unknown_dataset_named(self):
        table = simple_table(["a", "b"], ["d1"], [[1.0], [3.0]])
        seq = one_dataset_rounds(["ghost"])
        with pytest.raises(UnknownDatasetError) as excinfo:
            validate_inputs(table, seq, MissingPolicy.ERROR)
        assert "ghost" in str(excinfo.value)

    def test_unreferenced_missing_cell_passes_error_policy(self):
        table = simple_table(["a", "b"], ["d1", "d2"], [[1.0, None], [3.0, 4.0]])
        seq = one_dataset_rounds(["d1"])
        inputs = validate_inputs(table, seq, MissingPolicy.ERROR)
        assert inputs.missing_cells == frozenset()

    def test_idempotent(self):
        table = simple_table(["a", "b"], ["d1"], [[None], [3.0]])
        seq = one_dataset_rounds(["d1"])
        first = validate_inputs(table, seq, MissingPolicy.TREAT_AS_LOSS)
        second = validate_inputs(table, seq, MissingPolicy.TREAT_AS_LOSS)
        assert first == second
