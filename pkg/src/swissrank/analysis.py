"""Exact small-instance oracle, elimination-sensitivity profiling, and
ranking comparisons against the plain score-average baseline.

The oracle enumerates every contest history (pairings, byes, match
outcomes, elimination subsets) with exact rational arithmetic; it exists to
verify the Monte Carlo estimator and is deliberately restricted to small
instances, where the factorial state space is still tractable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .engine import ContestState, EliminationSchedule
from .errors import InactiveModelError, InstanceTooLargeError, MissingScoreError
from .ingestion import MissingPolicy, RoundSequence, ScoreTable, validate_inputs
from .montecarlo import SimulationConfig, SimulationResult, estimate, estimate_sweep
from .winrate import WinRateTensor, build_tensor

ORACLE_MAX_MODELS = 5
ORACLE_MAX_ROUNDS = 3

CLASS_GENERALIST = "robust_generalist"
CLASS_SPECIALIST = "aggressive_specialist"
CLASS_INTERMEDIATE = "intermediate"


def _matchings(items: tuple[int, ...]) -> list[tuple[tuple[tuple[int, int], ...], Fraction]]:
    """All perfect matchings of an even-sized set with their uniform probability."""
    if not items:
        return [((), Fraction(1))]
    first = items[0]
    rest = items[1:]
    out: list[tuple[tuple[tuple[int, int], ...], Fraction]] = []
    pick = Fraction(1, len(rest))
    for idx, partner in enumerate(rest):
        remaining = rest[:idx] + rest[idx + 1 :]
        for pairs, prob in _matchings(remaining):
            out.append((((first, partner),) + pairs, pick * prob))
    return out


def _group_pairings(group: tuple[int, ...]) -> list[tuple[tuple[tuple[int, int], ...], Fraction]]:
    """Pairing distribution for one score group; odd groups draw a uniform bye."""
    n = len(group)
    if n % 2 == 0:
        return _matchings(group)
    out: list[tuple[tuple[tuple[int, int], ...], Fraction]] = []
    bye_prob = Fraction(1, n)
    for idx in range(n):
        rest = group[:idx] + group[idx + 1 :]
        for pairs, prob in _matchings(rest):
            out.append((pairs, bye_prob * prob))
    return out


def _round_pairings(
    groups: list[tuple[int, ...]],
) -> list[tuple[tuple[tuple[int, int], ...], Fraction]]:
    combined: list[tuple[tuple[tuple[int, int], ...], Fraction]] = [((), Fraction(1))]
    for group in groups:
        per_group = _group_pairings(group)
        combined = [
            (pairs + extra, prob * extra_prob)
            for pairs, prob in combined
            for extra, extra_prob in per_group
        ]
    return combined


def exact_expected_scores(
    tensor: WinRateTensor,
    schedule: EliminationSchedule,
    limits: tuple[int, int] = (ORACLE_MAX_MODELS, ORACLE_MAX_ROUNDS),
) -> tuple[Fraction, ...]:
    """Exact per-model expected final scores by exhaustive history enumeration.

    Walks every reachable contest state, weighting pairings uniformly over
    perfect matchings (with uniform byes in odd groups), match outcomes by
    their tensor probability, and eliminations uniformly over subsets of the
    minimum score group. Probabilities and expectations are exact rationals;
    tensor entries are taken at their exact binary float values.
    """
    m, rounds = tensor.m, tensor.k
    max_models, max_rounds = limits
    if m > max_models or rounds > max_rounds:
        raise InstanceTooLargeError(
            f"exact enumeration supports at most {max_models} models and "
            f"{max_rounds} rounds, got M={m}, K={rounds}"
        )
    if len(schedule.counts) != rounds:
        raise InstanceTooLargeError(
            f"schedule covers {len(schedule.counts)} rounds, tensor has {rounds}"
        )
    probs = [
        [[Fraction(tensor.w[i][j][k]) for j in range(m)] for i in range(m)]
        for k in range(rounds)
    ]
    memo: dict[tuple[int, tuple[int, ...], tuple[int, ...]], tuple[Fraction, ...]] = {}

    def expect(k: int, active: tuple[int, ...], scores: tuple[int, ...]) -> tuple[Fraction, ...]:
        if k == rounds:
            return tuple(Fraction(s) for s in scores)
        key = (k, active, scores)
        cached = memo.get(key)
        if cached is not None:
            return cached
        prob_k = probs[k]
        t_k = schedule.counts[k]
        totals = [Fraction(0)] * m
        buckets: dict[int, list[int]] = {}
        for model in active:
            buckets.setdefault(scores[model], []).append(model)
        groups = [tuple(buckets[s]) for s in sorted(buckets, reverse=True)]
        for pairs, pairing_prob in _round_pairings(groups):
            outcomes: list[tuple[tuple[int, ...], Fraction]] = [((), Fraction(1))]
            for i, j in pairs:
                p = prob_k[i][j]
                extended: list[tuple[tuple[int, ...], Fraction]] = []
                for winners, q in outcomes:
                    if p > 0:
                        extended.append((winners + (i,), q * p))
                    if p < 1:
                        extended.append((winners + (j,), q * (1 - p)))
                outcomes = extended
            for winners, outcome_prob in outcomes:
                new_scores = list(scores)
                for winner in winners:
                    new_scores[winner] += 1
                scored = tuple(new_scores)
                branch_prob = pairing_prob * outcome_prob
                for survivors, elim_prob in _eliminations(active, scored, t_k):
                    p_total = branch_prob * elim_prob
                    if len(survivors) < 2:
                        sub = tuple(Fraction(s) for s in scored)
                    else:
                        sub = expect(k + 1, survivors, scored)
                    for idx in range(m):
                        totals[idx] += p_total * sub[idx]
        result = tuple(totals)
        memo[key] = result
        return result

    def _eliminations(
        active: tuple[int, ...], scores: tuple[int, ...], t_k: int
    ) -> list[tuple[tuple[int, ...], Fraction]]:
        if t_k <= 0:
            return [(active, Fraction(1))]
        minimum = min(scores[model] for model in active)
        g_min = tuple(model for model in active if scores[model] == minimum)
        r = min(t_k, len(g_min))
        weight = Fraction(1, math.comb(len(g_min), r))
        out: list[tuple[tuple[int, ...], Fraction]] = []
        for removed in combinations(g_min, r):
            removed_set = set(removed)
            out.append(
                (tuple(model for model in active if model not in removed_set), weight)
            )
        return out

    return expect(0, tuple(range(m)), (0,) * m)


def round_expectation(
    tensor: WinRateTensor, state: ContestState, model: int
) -> Fraction:
    """Conditional expected round gain for a model in its current score group.

    Even group: the mean win rate against the group mates. Odd group: the
    same mean scaled by (1 - 1/n) for the bye chance. Exact rational result.
    """
    if model not in state.active:
        raise InactiveModelError(f"model index {model} is not active")
    if not 1 <= state.round <= tensor.k:
        raise ValueError(f"state.round must be in 1..{tensor.k}, got {state.round}")
    k = state.round - 1
    own_score = state.scores[model]
    group = [m for m in state.active if state.scores[m] == own_score]
    n = len(group)
    if n == 1:
        return Fraction(0)
    mean = sum(
        (Fraction(tensor.w[model][j][k]) for j in group if j != model), Fraction(0)
    ) / (n - 1)
    if n % 2 == 0:
        return mean
    return (1 - Fraction(1, n)) * mean


@dataclass(frozen=True)
class FsaThresholds:
    """Slope cutoffs for the risk-profile classification.

    Negative ``specialist_slope`` marks the steep-collapse regime; slopes
    within ``generalist_band`` of zero count as flat. Defaults scale with the
    round count so the labels stay contest-length invariant; the magnitudes
    themselves are conventional, not derived.
    """

    specialist_slope: float
    generalist_band: float

    def __post_init__(self) -> None:
        if self.specialist_slope >= 0:
            raise ValueError("specialist_slope must be negative")
        if self.generalist_band < 0:
            raise ValueError("generalist_band must be non-negative")

    @staticmethod
    def for_rounds(rounds: int) -> "FsaThresholds":
        return FsaThresholds(
            specialist_slope=-0.15 * rounds / 12.0,
            generalist_band=0.03 * rounds / 12.0,
        )


@dataclass(frozen=True)
class FsaReport:
    """Per-model sensitivity of the expected score to elimination pressure."""

    models: tuple[str, ...]
    t_grid: tuple[int, ...]
    curves: tuple[tuple[float, ...], ...]  # [model][t index]
    curve_errors: tuple[tuple[float, ...], ...]
    base_score: tuple[float, ...]
    sensitivity: tuple[float, ...]  # least-squares slope of score vs t
    drop: tuple[float, ...] | None  # score(t=2) - score(t=0) when both present
    classification: tuple[str, ...]
    thresholds: FsaThresholds


def least_squares_slope(xs: list[float], ys: list[float]) -> float:
    if len(xs) == 2:
        return (ys[1] - ys[0]) / (xs[1] - xs[0])
    x_mean = sum(xs) / len(xs)
    y_mean = sum(ys) / len(ys)
    sxx = sum((x - x_mean) ** 2 for x in xs)
    sxy = sum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    return sxy / sxx


def classify_slope(slope: float, thresholds: FsaThresholds) -> str:
    if abs(slope) <= thresholds.generalist_band:
        return CLASS_GENERALIST
    if slope <= thresholds.specialist_slope:
        return CLASS_SPECIALIST
    return CLASS_INTERMEDIATE


def fsa(
    tensor: WinRateTensor,
    config: SimulationConfig,
    t_grid: list[int] | tuple[int, ...] = (0, 1, 2),
    thresholds: FsaThresholds | None = None,
) -> FsaReport:
    """Sweep the elimination count and profile each model's score curve.

    The sensitivity is the least-squares slope of the estimated score
    against t over the grid. When the grid contains both t=0 and t=2 the
    endpoint drop score(2) - score(0) is reported alongside (for a two-point
    grid it equals exactly twice the slope).
    """
    grid = list(t_grid)
    if len(set(grid)) < 2:
        raise ValueError("t_grid needs at least two distinct values")
    if thresholds is None:
        thresholds = FsaThresholds.for_rounds(tensor.k)
    sweep = estimate_sweep(tensor, config, grid)
    xs = [float(t) for t, _ in sweep]
    curves = tuple(
        tuple(result.expected_scores[m] for _, result in sweep)
        for m in range(tensor.m)
    )
    errors = tuple(
        tuple(result.std_error[m] for _, result in sweep) for m in range(tensor.m)
    )
    base_index = grid.index(min(grid))
    slopes = tuple(least_squares_slope(xs, list(curve)) for curve in curves)
    drop: tuple[float, ...] | None = None
    if 0 in grid and 2 in grid:
        i0, i2 = grid.index(0), grid.index(2)
        drop = tuple(curve[i2] - curve[i0] for curve in curves)
    return FsaReport(
        models=tensor.models,
        t_grid=tuple(grid),
        curves=curves,
        curve_errors=errors,
        base_score=tuple(curve[base_index] for curve in curves),
        sensitivity=slopes,
        drop=drop,
        classification=tuple(classify_slope(s, thresholds) for s in slopes),
        thresholds=thresholds,
    )


def rank_models(models: tuple[str, ...], values: tuple[float, ...]) -> tuple[int, ...]:
    """Dense 1..M ranks by descending value, ties broken alphabetically."""
    order = sorted(range(len(models)), key=lambda i: (-values[i], models[i]))
    ranks = [0] * len(models)
    for position, index in enumerate(order, start=1):
        ranks[index] = position
    return tuple(ranks)


@dataclass(frozen=True)
class AverageRanking:
    models: tuple[str, ...]
    means: tuple[float, ...]
    ranks: tuple[int, ...]


def average_baseline_rank(
    table: ScoreTable, missing_policy: MissingPolicy | str = MissingPolicy.ERROR
) -> AverageRanking:
    """Rank models by their unweighted mean score over all datasets.

    Under the ``error`` policy a missing cell aborts; under ``treat_as_loss``
    missing cells contribute zero to the mean.
    """
    policy = MissingPolicy(missing_policy)
    means: list[float] = []
    for mi, row in enumerate(table.scores):
        values: list[float] = []
        for di, value in enumerate(row):
            if value is None:
                if policy is MissingPolicy.ERROR:
                    raise MissingScoreError(
                        f"missing score for model {table.models[mi]!r} on dataset "
                        f"{table.datasets[di]!r}"
                    )
                values.append(0.0)
            else:
                values.append(value)
        means.append(sum(values) / len(values))
    means_t = tuple(means)
    return AverageRanking(
        models=table.models, means=means_t, ranks=rank_models(table.models, means_t)
    )


@dataclass(frozen=True)
class RankingComparison:
    """Rank movement of every model under both ranking methods."""

    models: tuple[str, ...]
    csd_rank_before: tuple[int, ...]
    csd_rank_after: tuple[int, ...]
    avg_rank_before: tuple[int, ...]
    avg_rank_after: tuple[int, ...]

    def csd_delta(self, model_index: int) -> int:
        return self.csd_rank_after[model_index] - self.csd_rank_before[model_index]

    def avg_delta(self, model_index: int) -> int:
        return self.avg_rank_after[model_index] - self.avg_rank_before[model_index]


def perturbation_experiment(
    base: ScoreTable,
    perturbed: ScoreTable,
    sequence: RoundSequence,
    config: SimulationConfig,
    missing_policy: MissingPolicy | str = MissingPolicy.ERROR,
) -> tuple[RankingComparison, SimulationResult, SimulationResult]:
    """Compare contest rankings and average-score rankings across a perturbation.

    Both tables run under the same simulation config (same seed, paired
    streams) so rank movement reflects the score change, not resampling.
    Returns the comparison plus both simulation results.
    """
    if base.models != perturbed.models or base.datasets != perturbed.datasets:
        raise ValueError("base and perturbed tables must share models and datasets")
    results: list[SimulationResult] = []
    csd_ranks: list[tuple[int, ...]] = []
    for table in (base, perturbed):
        inputs = validate_inputs(table, sequence, missing_policy)
        result = estimate(build_tensor(inputs), config)
        results.append(result)
        csd_ranks.append(rank_models(result.models, result.expected_scores))
    avg_before = average_baseline_rank(base, missing_policy)
    avg_after = average_baseline_rank(perturbed, missing_policy)
    comparison = RankingComparison(
        models=base.models,
        csd_rank_before=csd_ranks[0],
        csd_rank_after=csd_ranks[1],
        avg_rank_before=avg_before.ranks,
        avg_rank_after=avg_after.ranks,
    )
    return comparison, results[0], results[1]
