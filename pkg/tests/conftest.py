"""Shared fixture builders for the test suite."""

from __future__ import annotations

import random

import pytest

from swissrank import (
    EliminationSchedule,
    Round,
    RoundSequence,
    ScoreTable,
    WinRateTensor,
    tensor_from_round_matrices,
)


def names(count: int) -> list[str]:
    return [f"m{i:02d}" for i in range(count)]


def half_matrix(size: int) -> list[list[float]]:
    return [[0.5] * size for _ in range(size)]


def set_entry(matrix: list[list[float]], i: int, j: int, p: float) -> None:
    matrix[i][j] = p
    matrix[j][i] = 1.0 - p


def chain_matrix(size: int) -> list[list[float]]:
    """Deterministic strict hierarchy: lower index beats higher index."""
    matrix = half_matrix(size)
    for i in range(size):
        for j in range(i + 1, size):
            set_entry(matrix, i, j, 1.0)
    return matrix


def chain_tensor(size: int, rounds: int) -> WinRateTensor:
    return tensor_from_round_matrices(
        names(size), [f"r{k}" for k in range(rounds)], [chain_matrix(size)] * rounds
    )


def random_tensor(
    size: int, rounds: int, rng: random.Random, values: tuple[float, ...] = (0.0, 0.5, 1.0)
) -> WinRateTensor:
    """Random antisymmetric tensor with off-diagonal entries from ``values``."""
    matrices = []
    for _ in range(rounds):
        matrix = half_matrix(size)
        for i in range(size):
            for j in range(i + 1, size):
                set_entry(matrix, i, j, rng.choice(values))
        matrices.append(matrix)
    return tensor_from_round_matrices(
        names(size), [f"r{k}" for k in range(rounds)], matrices
    )


@pytest.fixture
def canonical3() -> WinRateTensor:
    """A beats B and C, B beats C; one round."""
    matrix = half_matrix(3)
    set_entry(matrix, 0, 1, 1.0)
    set_entry(matrix, 0, 2, 1.0)
    set_entry(matrix, 1, 2, 1.0)
    return tensor_from_round_matrices(["A", "B", "C"], ["r1"], [matrix])


def no_elimination(rounds: int) -> EliminationSchedule:
    return EliminationSchedule.constant(0, rounds)


def simple_table(
    models: list[str], datasets: list[str], rows: list[list[float | None]]
) -> ScoreTable:
    return ScoreTable(
        models=tuple(models),
        datasets=tuple(datasets),
        scores=tuple(tuple(row) for row in rows),
    )


def one_dataset_rounds(datasets: list[str]) -> RoundSequence:
    return RoundSequence(
        rounds=tuple(Round(label=ds, datasets=(ds,)) for ds in datasets)
    )
