"""Monte Carlo estimation of the expected win score.

``estimate`` averages the final score vector over N independent contest
instances. Instance i draws its randomness from a stream derived from
(seed, i) alone, and all per-instance statistics are accumulated as exact
integers (half-point score units, squared units, survival and elimination
counts), so the result is bitwise identical no matter how instances are
chunked across workers.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .engine import EliminationSchedule, _execute
from .errors import DimensionMismatchError
from .streams import check_seed, derive_seed, stream_state
from .winrate import WinRateTensor

DEFAULT_ITERATIONS = 10_000
_SWEEP_TAG = "sweep"


@dataclass(frozen=True)
class SimulationConfig:
    iterations: int = DEFAULT_ITERATIONS
    seed: int = 0
    schedule: EliminationSchedule | None = None
    parallelism: int = 0  # worker count hint; 0 = one worker per CPU

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        check_seed(self.seed)
        if self.parallelism < 0:
            raise ValueError("parallelism must be >= 0")


@dataclass(frozen=True)
class SimulationResult:
    """Expected win scores with convergence and survival statistics."""

    models: tuple[str, ...]
    expected_scores: tuple[float, ...]
    std_error: tuple[float, ...]
    survival_prob: tuple[float, ...]
    elim_histogram: tuple[tuple[int, ...], ...]  # [model][round-1] counts
    iterations: int
    seed: int
    schedule: EliminationSchedule


class _Accumulator:
    """Exact integer tallies over a set of instances."""

    __slots__ = ("unit_sum", "unit_sq_sum", "survived", "elim_counts")

    def __init__(self, model_count: int, rounds: int):
        self.unit_sum = [0] * model_count
        self.unit_sq_sum = [0] * model_count
        self.survived = [0] * model_count
        self.elim_counts = [[0] * rounds for _ in range(model_count)]

    def add_instance(self, score_units: tuple[int, ...], elim_round: tuple[int, ...]) -> None:
        for m, units in enumerate(score_units):
            self.unit_sum[m] += units
            self.unit_sq_sum[m] += units * units
            r = elim_round[m]
            if r == 0:
                self.survived[m] += 1
            else:
                self.elim_counts[m][r - 1] += 1

    def merge(self, other: "_Accumulator") -> None:
        for m in range(len(self.unit_sum)):
            self.unit_sum[m] += other.unit_sum[m]
            self.unit_sq_sum[m] += other.unit_sq_sum[m]
            self.survived[m] += other.survived[m]
            row, other_row = self.elim_counts[m], other.elim_counts[m]
            for k in range(len(row)):
                row[k] += other_row[k]


def _simulate_chunk(
    round_matrices: list[list[list[float]]],
    counts: tuple[int, ...],
    model_count: int,
    seed: int,
    lo: int,
    hi: int,
) -> _Accumulator:
    acc = _Accumulator(model_count, len(counts))
    rng = random.Random()
    for i in range(lo, hi):
        rng.seed(stream_state(seed, i))
        result = _execute(round_matrices, counts, model_count, rng, False)
        acc.add_instance(result.score_units, result.elimination_round)
    return acc


def _resolve_workers(parallelism: int) -> int:
    if parallelism > 0:
        return parallelism
    return os.cpu_count() or 1


def _result_from_accumulator(
    acc: _Accumulator,
    models: tuple[str, ...],
    iterations: int,
    seed: int,
    schedule: EliminationSchedule,
) -> SimulationResult:
    n = iterations
    expected: list[float] = []
    std_error: list[float] = []
    for m in range(len(models)):
        mean = acc.unit_sum[m] / (2.0 * n)
        expected.append(mean)
        if n > 1:
            variance = (acc.unit_sq_sum[m] / 4.0 - n * mean * mean) / (n - 1)
            variance = max(0.0, variance)
        else:
            variance = 0.0
        std_error.append((variance / n) ** 0.5)
    return SimulationResult(
        models=models,
        expected_scores=tuple(expected),
        std_error=tuple(std_error),
        survival_prob=tuple(acc.survived[m] / n for m in range(len(models))),
        elim_histogram=tuple(tuple(row) for row in acc.elim_counts),
        iterations=n,
        seed=seed,
        schedule=schedule,
    )


def estimate(tensor: WinRateTensor, config: SimulationConfig) -> SimulationResult:
    """Run N independent contest instances and average their final scores.

    The result is a pure function of (tensor, config): the worker count only
    decides how instances are distributed, never what they compute, and the
    integer accumulators make the merge order irrelevant.
    """
    schedule = config.schedule or EliminationSchedule.constant(1, tensor.k)
    if len(schedule.counts) != tensor.k:
        raise DimensionMismatchError(
            f"schedule covers {len(schedule.counts)} rounds, tensor has {tensor.k}"
        )
    round_matrices = tensor.round_matrices()
    n = config.iterations
    workers = _resolve_workers(config.parallelism)
    if workers > 1 and n >= 2 * workers:
        bounds = [(n * w) // workers for w in range(workers + 1)]
        chunks = [(bounds[w], bounds[w + 1]) for w in range(workers)]
        acc = _Accumulator(tensor.m, tensor.k)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _simulate_chunk,
                    round_matrices,
                    schedule.counts,
                    tensor.m,
                    config.seed,
                    lo,
                    hi,
                )
                for lo, hi in chunks
            ]
            for future in futures:
                acc.merge(future.result())
    else:
        acc = _simulate_chunk(round_matrices, schedule.counts, tensor.m, config.seed, 0, n)
    return _result_from_accumulator(acc, tensor.models, n, config.seed, schedule)


def estimate_sweep(
    tensor: WinRateTensor,
    config: SimulationConfig,
    t_values: list[int],
) -> list[tuple[int, SimulationResult]]:
    """Run one full estimate per elimination count.

    Sweep element i runs under the derived seed (seed, i), so repeated t
    values produce independent but reproducible estimates.
    """
    if not t_values:
        raise ValueError("t_values must be non-empty")
    results: list[tuple[int, SimulationResult]] = []
    for index, t in enumerate(t_values):
        if t < 0:
            raise ValueError(f"elimination count must be >= 0, got {t}")
        sweep_config = replace(
            config,
            seed=derive_seed(config.seed, _SWEEP_TAG, index),
            schedule=EliminationSchedule.constant(t, tensor.k),
        )
        results.append((t, estimate(tensor, sweep_config)))
    return results


def schedule_t_value(schedule: EliminationSchedule) -> int | list[int]:
    """Collapse a constant schedule to its scalar t for serialization."""
    counts = set(schedule.counts)
    if len(counts) == 1:
        return schedule.counts[0]
    return list(schedule.counts)


def result_to_dict(result: SimulationResult) -> dict:
    """Result export object (keys are the stable file interface)."""
    return {
        "seed": result.seed,
        "iterations": result.iterations,
        "t": schedule_t_value(result.schedule),
        "models": list(result.models),
        "e_score": list(result.expected_scores),
        "std_err": list(result.std_error),
        "survival": list(result.survival_prob),
        "elim_hist": [list(row) for row in result.elim_histogram],
    }
