"""Single-instance execution of the Swiss-system contest.

One instance plays the K rounds in order. Each round partitions the active
models into exact score groups, draws a uniformly random perfect matching
inside every group (odd groups give one uniformly chosen member a bye worth
zero points), resolves every pair from the win-rate tensor, then removes a
uniformly random subset of the minimum score group. The contest stops early
once fewer than two models remain active.

Cumulative scores are kept in integer half-point units so that score-group
equality is exact; one match win is worth 2 units.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import DimensionMismatchError
from .winrate import WinRateTensor

WIN_UNITS = 2  # one match victory, in half-point units


@dataclass(frozen=True)
class EliminationSchedule:
    """Per-round elimination counts; ``constant`` covers the common case."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        for k, t in enumerate(self.counts):
            if t < 0:
                raise ValueError(f"elimination count for round {k + 1} is negative")

    @staticmethod
    def constant(t: int, rounds: int) -> "EliminationSchedule":
        return EliminationSchedule(counts=(t,) * rounds)


@dataclass
class ContestState:
    """Active set and cumulative scores at a round boundary.

    ``scores`` covers all M models in half-point units; eliminated models
    keep the frozen score they held when they were removed. ``round`` is the
    1-based index of the round being played (0 before the contest starts).
    """

    active: list[int]
    scores: list[int]
    round: int = 0

    @staticmethod
    def initial(model_count: int) -> "ContestState":
        return ContestState(active=list(range(model_count)), scores=[0] * model_count)


@dataclass(frozen=True)
class RoundOutcome:
    round: int
    pairs: tuple[tuple[int, int], ...]
    winners: tuple[int, ...]
    byes: tuple[int, ...]
    eliminated: tuple[int, ...]
    scores: tuple[int, ...]  # cumulative, half-point units, post-elimination


@dataclass(frozen=True)
class InstanceResult:
    """Final state of one contest instance."""

    score_units: tuple[int, ...]
    elimination_round: tuple[int, ...]  # 0 = survived, else 1-based round
    trace: tuple[RoundOutcome, ...] = field(default=())

    @property
    def final_scores(self) -> tuple[float, ...]:
        return tuple(units / 2.0 for units in self.score_units)


def group_by_score(state: ContestState) -> list[list[int]]:
    """Partition the active set into exact score groups, descending score."""
    buckets: dict[int, list[int]] = {}
    scores = state.scores
    for m in state.active:
        buckets.setdefault(scores[m], []).append(m)
    return [buckets[s] for s in sorted(buckets, reverse=True)]


def pair_group(
    group: list[int], rng: random.Random
) -> tuple[list[tuple[int, int]], int | None]:
    """Draw a uniformly random perfect matching of one score group.

    The group is shuffled once (ordering by iid uniform keys, one draw per
    member) and adjacent elements are paired; for an odd group the element
    left unpaired after the shuffle takes the bye, which gives every member
    the same 1/n bye probability. Groups of one or two have a single
    possible outcome and consume no randomness.
    """
    n = len(group)
    if n == 1:
        return [], group[0]
    if n == 2:
        return [(group[0], group[1])], None
    rand = rng.random
    members = sorted(group, key=lambda _: rand())
    pairs = [(members[a], members[a + 1]) for a in range(0, n - 1, 2)]
    bye = members[-1] if n % 2 else None
    return pairs, bye


def play_round(
    state: ContestState,
    round_matrix: list[list[float]],
    rng: random.Random,
    record: bool = True,
) -> RoundOutcome | None:
    """Group, pair, and resolve one round, updating cumulative scores.

    Each pair (i, j) is a Bernoulli draw: i takes the point with probability
    ``round_matrix[i][j]``. Entries of exactly 0 or 1 resolve without
    consuming randomness; any other entry consumes one draw, in pair order.
    Bye models score nothing. Returns a partial ``RoundOutcome`` (eliminated
    and post-elimination scores filled in by the caller) when ``record`` is
    set, else ``None``.
    """
    scores = state.scores
    pairs_rec: list[tuple[int, int]] = []
    winners_rec: list[int] = []
    byes_rec: list[int] = []
    for group in group_by_score(state):
        pairs, bye = pair_group(group, rng)
        for i, j in pairs:
            p = round_matrix[i][j]
            if p >= 1.0:
                winner = i
            elif p <= 0.0:
                winner = j
            else:
                winner = i if rng.random() < p else j
            scores[winner] += WIN_UNITS
            if record:
                winners_rec.append(winner)
        if record:
            pairs_rec.extend(pairs)
            if bye is not None:
                byes_rec.append(bye)
    if not record:
        return None
    return RoundOutcome(
        round=state.round,
        pairs=tuple(pairs_rec),
        winners=tuple(winners_rec),
        byes=tuple(byes_rec),
        eliminated=(),
        scores=(),
    )


def apply_elimination(
    state: ContestState, t_k: int, rng: random.Random
) -> list[int]:
    """Remove a uniform random subset of the minimum score group.

    Exactly ``min(t_k, |G_min|)`` models leave; each member of the minimum
    group is removed with probability ``t_k / max(t_k, |G_min|)``. Returns
    the removed indices, sorted.
    """
    if t_k <= 0 or not state.active:
        return []
    scores = state.scores
    minimum = min(scores[m] for m in state.active)
    g_min = [m for m in state.active if scores[m] == minimum]
    if t_k >= len(g_min):
        removed = list(g_min)
    else:
        removed = sorted(rng.sample(g_min, t_k))
    removed_set = set(removed)
    state.active = [m for m in state.active if m not in removed_set]
    return removed


def run_single_instance(
    tensor: WinRateTensor,
    schedule: EliminationSchedule,
    rng: random.Random,
    record_trace: bool = True,
) -> InstanceResult:
    """Play one full contest instance and return its final score vector.

    The returned vector covers all M models; eliminated models report the
    score frozen at their elimination. With ``record_trace`` the per-round
    outcomes are kept (pairings, winners, byes, eliminations, cumulative
    scores in half-point units).
    """
    if len(schedule.counts) != tensor.k:
        raise DimensionMismatchError(
            f"schedule covers {len(schedule.counts)} rounds, tensor has {tensor.k}"
        )
    return _execute(
        tensor.round_matrices(), schedule.counts, tensor.m, rng, record_trace
    )


def _execute(
    round_matrices: list[list[list[float]]],
    counts: tuple[int, ...],
    model_count: int,
    rng: random.Random,
    record_trace: bool,
) -> InstanceResult:
    state = ContestState.initial(model_count)
    elimination_round = [0] * model_count
    trace: list[RoundOutcome] = []
    for k, round_matrix in enumerate(round_matrices):
        state.round = k + 1
        partial = play_round(state, round_matrix, rng, record=record_trace)
        removed = apply_elimination(state, counts[k], rng)
        for m in removed:
            elimination_round[m] = k + 1
        if record_trace:
            assert partial is not None
            trace.append(
                RoundOutcome(
                    round=partial.round,
                    pairs=partial.pairs,
                    winners=partial.winners,
                    byes=partial.byes,
                    eliminated=tuple(removed),
                    scores=tuple(state.scores),
                )
            )
        if len(state.active) < 2:
            break
    return InstanceResult(
        score_units=tuple(state.scores),
        elimination_round=tuple(elimination_round),
        trace=tuple(trace),
    )


def trace_to_jsonl(result: InstanceResult, models: tuple[str, ...]) -> str:
    """Serialize a trace as JSON lines with a unit-declaring header."""
    import json

    lines = [
        json.dumps(
            {"score_unit": "half-point", "models": list(models), "rounds": len(result.trace)}
        )
    ]
    for outcome in result.trace:
        lines.append(
            json.dumps(
                {
                    "round": outcome.round,
                    "pairs": [list(p) for p in outcome.pairs],
                    "byes": list(outcome.byes),
                    "winners": list(outcome.winners),
                    "eliminated": list(outcome.eliminated),
                    "scores": list(outcome.scores),
                }
            )
        )
    return "\n".join(lines) + "\n"
