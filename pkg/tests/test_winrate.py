"""Win-rate tensor construction rules and algebraic properties."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swissrank import (
    DomainError,
    MissingPolicy,
    UnknownModelError,
    build_tensor,
    perturb_scores,
    tensor_from_round_matrices,
    validate_inputs,
)

from conftest import one_dataset_rounds, simple_table


def build(models, datasets, rows, rounds=None, policy=MissingPolicy.ERROR):
    table = simple_table(models, datasets, rows)
    sequence = rounds if rounds is not None else one_dataset_rounds(list(datasets))
    return build_tensor(validate_inputs(table, sequence, policy))


class TestBuildRules:
    def test_strict_dominance_single_dataset(self):
        tensor = build(["i", "j"], ["d1"], [[80.0], [70.0]])
        assert tensor.w[0][1][0] == 1.0
        assert tensor.w[1][0][0] == 0.0

    def test_symmetric_split_two_datasets(self):
        from swissrank import Round, RoundSequence

        seq = RoundSequence(rounds=(Round(label="r1", datasets=("d1", "d2")),))
        tensor = build(["i", "j"], ["d1", "d2"], [[80.0, 10.0], [70.0, 20.0]], seq)
        assert tensor.w[0][1][0] == 0.5

    def test_majority_loss_three_datasets(self):
        # i wins 1 of 3 datasets, so its round fraction is 1/3 and the entry is 0.
        from swissrank import Round, RoundSequence

        seq = RoundSequence(rounds=(Round(label="r1", datasets=("d1", "d2", "d3")),))
        tensor = build(
            ["i", "j"], ["d1", "d2", "d3"], [[90.0, 40.0, 40.0], [10.0, 50.0, 50.0]], seq
        )
        assert tensor.w[0][1][0] == 0.0
        assert tensor.w[1][0][0] == 1.0

    def test_exact_tie_gives_half(self):
        tensor = build(["i", "j"], ["d1"], [[50.0], [50.0]])
        assert tensor.w[0][1][0] == 0.5

    def test_missing_treated_as_loss(self):
        tensor = build(
            ["i", "j"], ["d1"], [[None], [10.0]], policy=MissingPolicy.TREAT_AS_LOSS
        )
        assert tensor.w[0][1][0] == 0.0

    def test_two_missing_sides_tie(self):
        tensor = build(
            ["i", "j"], ["d1"], [[None], [None]], policy=MissingPolicy.TREAT_AS_LOSS
        )
        assert tensor.w[0][1][0] == 0.5

    def test_diagonal_is_half(self):
        tensor = build(["i", "j"], ["d1"], [[80.0], [70.0]])
        assert tensor.w[0][0][0] == 0.5 and tensor.w[1][1][0] == 0.5


class TestPerturbScores:
    def table(self):
        return simple_table(
            ["a", "b"], ["d1", "d2", "d3", "d4"],
            [[80.0, 70.0, 60.0, 50.0], [10.0, 20.0, 30.0, 40.0]],
        )

    def test_zero_two_cells(self):
        table = self.table()
        out = perturb_scores(table, [("a", "d1", 0.0), ("a", "d2", 0.0)])
        changed = [
            (mi, di)
            for mi in range(2)
            for di in range(4)
            if out.scores[mi][di] != table.scores[mi][di]
        ]
        assert changed == [(0, 0), (0, 1)]
        assert out.scores[0][0] == 0.0 and out.scores[0][1] == 0.0

    def test_zero_four_cells(self):
        table = self.table()
        out = perturb_scores(table, [("a", d, 0.0) for d in ("d1", "d2", "d3", "d4")])
        diff = sum(
            out.scores[mi][di] != table.scores[mi][di]
            for mi in range(2)
            for di in range(4)
        )
        assert diff == 4

    def test_empty_targets_identity(self):
        table = self.table()
        assert perturb_scores(table, []) == table

    def test_original_untouched(self):
        table = self.table()
        perturb_scores(table, [("a", "d1", 0.0)])
        assert table.scores[0][0] == 80.0

    def test_unknown_model(self):
        with pytest.raises(UnknownModelError):
            perturb_scores(self.table(), [("ghost", "d1", 0.0)])

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            perturb_scores(self.table(), [("a", "d1", 101.0)])


names_st = st.integers(2, 4).map(lambda m: [f"m{i}" for i in range(m)])


@st.composite
def score_tables(draw):
    # scores in thousandths of a point: realistic granularity, and coarse
    # enough that affine transforms stay strictly increasing in floats
    models = draw(names_st)
    dataset_count = draw(st.integers(1, 4))
    datasets = [f"d{i}" for i in range(dataset_count)]
    rows = [
        [draw(st.integers(0, 100_000)) / 1000.0 for _ in datasets] for _ in models
    ]
    return simple_table(models, datasets, rows)


class TestProperties:
    @given(score_tables())
    @settings(max_examples=120, deadline=None)
    def test_antisymmetry_and_codomain(self, table):
        tensor = build_tensor(
            validate_inputs(table, one_dataset_rounds(list(table.datasets)))
        )
        m, k = tensor.m, tensor.k
        for i in range(m):
            for j in range(m):
                for kk in range(k):
                    value = tensor.w[i][j][kk]
                    assert value in (0.0, 0.5, 1.0)
                    if i != j:
                        assert value + tensor.w[j][i][kk] == 1.0

    @given(score_tables(), st.integers(0, 3))
    @settings(max_examples=80, deadline=None)
    def test_monotone_transform_invariance(self, table, column_seed):
        sequence = one_dataset_rounds(list(table.datasets))
        before = build_tensor(validate_inputs(table, sequence))
        column = column_seed % len(table.datasets)
        # strictly increasing map keeping values inside [0, 100]
        rows = [
            tuple(
                v / 2.0 + 10.0 if di == column else v for di, v in enumerate(row)
            )
            for row in table.scores
        ]
        transformed = simple_table(list(table.models), list(table.datasets), [list(r) for r in rows])
        after = build_tensor(validate_inputs(transformed, sequence))
        assert after.w == before.w

    @given(score_tables(), st.randoms(use_true_random=False))
    @settings(max_examples=80, deadline=None)
    def test_relabeling_equivariance(self, table, rnd):
        sequence = one_dataset_rounds(list(table.datasets))
        base = build_tensor(validate_inputs(table, sequence))
        perm = list(range(len(table.models)))
        rnd.shuffle(perm)
        permuted = simple_table(
            [table.models[p] for p in perm],
            list(table.datasets),
            [list(table.scores[p]) for p in perm],
        )
        shuffled = build_tensor(validate_inputs(permuted, sequence))
        for a in range(len(perm)):
            for b in range(len(perm)):
                assert shuffled.w[a][b] == base.w[perm[a]][perm[b]]


class TestTensorIO:
    def test_json_round_trip(self, tmp_path):
        from swissrank import load_tensor, save_tensor

        matrix = [[0.5, 0.25], [0.75, 0.5]]
        tensor = tensor_from_round_matrices(["a", "b"], ["r1"], [matrix])
        path = tmp_path / "tensor.json"
        save_tensor(tensor, path)
        assert load_tensor(path) == tensor

    def test_rejects_asymmetry(self):
        with pytest.raises(DomainError):
            tensor_from_round_matrices(["a", "b"], ["r1"], [[[0.5, 0.7], [0.7, 0.5]]])

    def test_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            tensor_from_round_matrices(["a", "b"], ["r1"], [[[0.5, 1.2], [-0.2, 0.5]]])
