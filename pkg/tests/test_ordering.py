"""Weighted order sampling and difficulty-tier construction."""

from __future__ import annotations

import json
from collections import Counter

import pytest

from swissrank import (
    DomainError,
    EliminationSchedule,
    EmptyQuestionError,
    OutcomeMatrix,
    ParseError,
    SimulationConfig,
    WeightedSuite,
    build_tiers,
    estimate,
    estimate_weighted,
    load_outcomes,
    load_weighted_suite,
    sample_order,
    tier_sequence_to_rounds,
    validate_inputs,
)
from swissrank.ordering import default_bands
from swissrank.streams import derive_rng

from conftest import one_dataset_rounds, simple_table


class TestSampleOrder:
    def test_single_dataset_identity(self):
        suite = WeightedSuite(datasets=("only",), weights=(3.0,))
        assert sample_order(suite, derive_rng(0, 0)) == ["only"]

    def test_result_is_permutation(self):
        suite = WeightedSuite(datasets=("a", "b", "c", "d"), weights=(1.0, 2.0, 3.0, 4.0))
        order = sample_order(suite, derive_rng(1, 0))
        assert sorted(order) == ["a", "b", "c", "d"]

    def test_keys_sorted_descending(self):
        suite = WeightedSuite(datasets=("a", "b", "c"), weights=(2.0, 1.0, 5.0))
        order = sample_order(suite, derive_rng(2, 7))
        replay = derive_rng(2, 7)
        keys = {ds: replay.random() ** (1.0 / w) for ds, w in zip(suite.datasets, suite.weights)}
        ordered_keys = [keys[ds] for ds in order]
        assert ordered_keys == sorted(ordered_keys, reverse=True)

    def test_heavy_weight_first(self):
        suite = WeightedSuite(datasets=("heavy", "x", "y"), weights=(1e6, 1.0, 1.0))
        rng = derive_rng(3, 0)
        firsts = sum(sample_order(suite, rng)[0] == "heavy" for _ in range(10_000))
        assert firsts / 10_000 >= 0.99

    def test_equal_weights_uniform_first_position(self):
        suite = WeightedSuite(datasets=("a", "b", "c"), weights=(2.0, 2.0, 2.0))
        rng = derive_rng(4, 0)
        counter = Counter(sample_order(suite, rng)[0] for _ in range(60_000))
        for dataset in suite.datasets:
            assert abs(counter[dataset] / 60_000 - 1 / 3) <= 0.02

    def test_non_positive_weight_rejected(self):
        with pytest.raises(DomainError):
            WeightedSuite(datasets=("a",), weights=(0.0,))
        with pytest.raises(DomainError):
            WeightedSuite(datasets=("a", "b"), weights=(1.0, -2.0))


class TestLoadWeightedSuite:
    def test_load(self, tmp_path):
        path = tmp_path / "suite.json"
        path.write_text(
            json.dumps([{"dataset": "d1", "weight": 2}, {"dataset": "d2", "weight": 1}]),
            encoding="utf-8",
        )
        suite = load_weighted_suite(path)
        assert suite.datasets == ("d1", "d2")
        assert suite.weights == (2.0, 1.0)

    def test_malformed_entry(self, tmp_path):
        path = tmp_path / "suite.json"
        path.write_text(json.dumps([{"dataset": "d1"}]), encoding="utf-8")
        with pytest.raises(ParseError):
            load_weighted_suite(path)


def weighted_fixture():
    """Four models, two datasets; model X is last on d1 and first on d2."""
    models = ["a", "b", "c", "x"]
    datasets = ["d1", "d2"]
    rows = [
        [90.0, 80.0],
        [80.0, 70.0],
        [70.0, 60.0],
        [10.0, 95.0],
    ]
    return simple_table(models, datasets, rows)


class TestEstimateWeighted:
    def test_single_dataset_matches_plain_estimate(self):
        table = simple_table(["a", "b"], ["d1"], [[80.0], [70.0]])
        suite = WeightedSuite(datasets=("d1",), weights=(1.0,))
        config = SimulationConfig(
            iterations=2_000, seed=6, schedule=EliminationSchedule.constant(0, 1)
        )
        from swissrank import build_tensor

        tensor = build_tensor(validate_inputs(table, one_dataset_rounds(["d1"])))
        assert estimate_weighted(suite, table, config) == estimate(tensor, config)

    def test_identical_columns_match_fixed_order(self):
        table = simple_table(
            ["a", "b", "c"], ["d1", "d2"], [[90.0, 90.0], [80.0, 80.0], [70.0, 70.0]]
        )
        suite = WeightedSuite(datasets=("d1", "d2"), weights=(1.0, 1.0))
        config = SimulationConfig(
            iterations=30_000, seed=7, schedule=EliminationSchedule.constant(1, 2)
        )
        from swissrank import build_tensor

        tensor = build_tensor(validate_inputs(table, one_dataset_rounds(["d1", "d2"])))
        weighted = estimate_weighted(suite, table, config)
        fixed = estimate(tensor, config)
        for m in range(3):
            combined = (weighted.std_error[m] ** 2 + fixed.std_error[m] ** 2) ** 0.5
            assert abs(weighted.expected_scores[m] - fixed.expected_scores[m]) <= max(
                3 * combined, 1e-12
            )

    def test_worker_count_does_not_change_result(self):
        table = weighted_fixture()
        suite = WeightedSuite(datasets=("d1", "d2"), weights=(3.0, 1.0))
        from dataclasses import replace

        base = SimulationConfig(
            iterations=4_000, seed=9, schedule=EliminationSchedule.constant(1, 2)
        )
        serial = estimate_weighted(suite, table, replace(base, parallelism=1))
        pooled = estimate_weighted(suite, table, replace(base, parallelism=3))
        assert serial == pooled

    def test_weak_round_first_hurts_under_elimination(self):
        table = weighted_fixture()
        config = SimulationConfig(
            iterations=20_000, seed=8, schedule=EliminationSchedule.constant(1, 2)
        )
        weak_first = estimate_weighted(
            WeightedSuite(datasets=("d1", "d2"), weights=(10.0, 1.0)), table, config
        )
        strong_first = estimate_weighted(
            WeightedSuite(datasets=("d1", "d2"), weights=(1.0, 10.0)), table, config
        )
        x = table.models.index("x")
        margin = 3 * (weak_first.std_error[x] ** 2 + strong_first.std_error[x] ** 2) ** 0.5
        assert weak_first.expected_scores[x] < strong_first.expected_scores[x] - margin


def outcomes_fixture():
    models = ("m1", "m2", "m3", "m4")
    questions = ("q_all", "q_three", "q_one", "q_none_right")
    rows = (
        (1, 1, 1, 0),
        (1, 1, 0, 0),
        (1, 1, 0, 0),
        (1, 0, 0, 0),
    )
    return OutcomeMatrix(models=models, questions=questions, outcomes=rows)


class TestBuildTiers:
    def test_default_bands_are_deciles(self):
        bands = default_bands()
        assert len(bands) == 10
        assert bands[0] == (90.0, 100.0)
        assert bands[-1] == (0.0, 10.0)

    def test_fully_solved_question_lands_in_top_tier(self):
        partition = build_tiers(outcomes_fixture())
        assert "q_all" in partition.tiers[0]

    def test_banding_by_accuracy(self):
        partition = build_tiers(outcomes_fixture())
        # q_three: 3/4 correct = 75% -> band [70, 80)
        band_index = [i for i, band in enumerate(partition.bands) if band == (70.0, 80.0)]
        assert partition.tiers[band_index[0]] == ("q_three",)
        # q_none_right: 0% -> bottom band [0, 10)
        assert "q_none_right" in partition.tiers[-1]

    def test_partition_property(self):
        partition = build_tiers(outcomes_fixture())
        assigned = [q for tier in partition.tiers for q in tier]
        assert sorted(assigned) == sorted(outcomes_fixture().questions)

    def test_question_without_outcomes_rejected(self):
        matrix = OutcomeMatrix(
            models=("m1",), questions=("q1",), outcomes=((None,),)
        )
        with pytest.raises(EmptyQuestionError):
            build_tiers(matrix)

    def test_bad_bands_rejected(self):
        with pytest.raises(DomainError):
            build_tiers(outcomes_fixture(), bands=((0.0, 50.0), (60.0, 100.0)))


class TestTierSequence:
    def test_rounds_follow_non_empty_tiers(self):
        outcomes = outcomes_fixture()
        partition = build_tiers(outcomes)
        tier_rounds = tier_sequence_to_rounds(partition, outcomes)
        non_empty = sum(1 for tier in partition.tiers if tier)
        assert tier_rounds.sequence.k == non_empty
        dropped = len(partition.tiers) - non_empty
        drop_warnings = [w for w in tier_rounds.warnings if "dropped" in w]
        assert len(drop_warnings) == dropped

    def test_perfect_model_scores_hundred(self):
        models = ("ace", "dunce")
        questions = ("q1", "q2")
        outcomes = OutcomeMatrix(
            models=models, questions=questions, outcomes=((1, 1), (0, 0))
        )
        tier_rounds = tier_sequence_to_rounds(build_tiers(outcomes), outcomes)
        ace_row = tier_rounds.table.scores[0]
        assert all(value == 100.0 for value in ace_row)

    def test_output_validates_under_error_policy(self):
        outcomes = outcomes_fixture()
        tier_rounds = tier_sequence_to_rounds(build_tiers(outcomes), outcomes)
        inputs = validate_inputs(tier_rounds.table, tier_rounds.sequence, "error")
        assert inputs.missing_cells == frozenset()

    def test_single_tier_when_everyone_answers_everything(self):
        outcomes = OutcomeMatrix(
            models=("m1", "m2"), questions=("q1", "q2"), outcomes=((1, 1), (1, 1))
        )
        tier_rounds = tier_sequence_to_rounds(build_tiers(outcomes), outcomes)
        assert tier_rounds.sequence.k == 1


class TestLoadOutcomes:
    def test_load(self, tmp_path):
        path = tmp_path / "outcomes.csv"
        path.write_text(
            "model,question_id,outcome\nm1,q1,1\nm1,q2,0\nm2,q1,0\n", encoding="utf-8"
        )
        matrix = load_outcomes(path)
        assert matrix.models == ("m1", "m2")
        assert matrix.questions == ("q1", "q2")
        assert matrix.outcomes == ((1, 0), (0, None))

    def test_duplicate_rejected(self, tmp_path):
        path = tmp_path / "outcomes.csv"
        path.write_text(
            "model,question_id,outcome\nm1,q1,1\nm1,q1,0\n", encoding="utf-8"
        )
        with pytest.raises(ParseError):
            load_outcomes(path)

    def test_bad_outcome_value(self, tmp_path):
        path = tmp_path / "outcomes.csv"
        path.write_text("model,question_id,outcome\nm1,q1,2\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_outcomes(path)
