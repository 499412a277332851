"""Round orderings for suites without a fixed sequence.

Two mechanisms produce contest rounds here: weighted random permutations of
a dataset suite (heavier datasets statistically earlier, sampled fresh
inside every Monte Carlo iteration), and difficulty tiers that slice one
benchmark's questions into an easiest-to-hardest synthetic sequence based on
empirical per-question success rates.
"""

from __future__ import annotations

import csv
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .engine import EliminationSchedule, _execute
from .errors import DomainError, EmptyQuestionError, ParseError
from .ingestion import MissingPolicy, Round, RoundSequence, ScoreTable, validate_inputs
from .montecarlo import (
    SimulationConfig,
    SimulationResult,
    _Accumulator,
    _resolve_workers,
    _result_from_accumulator,
)
from .streams import stream_state
from .winrate import build_tensor


@dataclass(frozen=True)
class WeightedSuite:
    """Datasets with strictly positive importance weights and no fixed order."""

    datasets: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.datasets:
            raise DomainError("a weighted suite needs at least one dataset")
        if len(self.datasets) != len(self.weights):
            raise DomainError("datasets and weights must have equal length")
        if len(set(self.datasets)) != len(self.datasets):
            raise DomainError("suite datasets must be unique")
        for name, weight in zip(self.datasets, self.weights):
            if weight <= 0:
                raise DomainError(f"weight for dataset {name!r} must be > 0, got {weight}")


def load_weighted_suite(path: str | Path) -> WeightedSuite:
    """Load a suite from a JSON array of {"dataset", "weight"} objects."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(payload, list):
        raise ParseError(f"{path}: expected a JSON array")
    datasets: list[str] = []
    weights: list[float] = []
    for idx, entry in enumerate(payload):
        if not isinstance(entry, dict) or "dataset" not in entry or "weight" not in entry:
            raise ParseError(f"{path}: entry {idx} needs 'dataset' and 'weight'")
        datasets.append(str(entry["dataset"]))
        try:
            weights.append(float(entry["weight"]))
        except (TypeError, ValueError):
            raise ParseError(f"{path}: weight of entry {idx} is not a number") from None
    return WeightedSuite(datasets=tuple(datasets), weights=tuple(weights))


def _sample_permutation(weights: tuple[float, ...], rng: random.Random) -> list[int]:
    # Weighted-key permutation: key = u^(1/w), sorted descending, so the
    # first pick lands on index i with probability w_i / sum(w). A singleton
    # has only one order and consumes no randomness.
    if len(weights) == 1:
        return [0]
    keys = [rng.random() ** (1.0 / w) for w in weights]
    return sorted(range(len(weights)), key=keys.__getitem__, reverse=True)


def sample_order(suite: WeightedSuite, rng: random.Random) -> list[str]:
    """Draw one weighted random ordering of the suite's datasets."""
    return [suite.datasets[i] for i in _sample_permutation(suite.weights, rng)]


def _weighted_chunk(
    matrices: list[list[list[float]]],
    weights: tuple[float, ...],
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
        perm = _sample_permutation(weights, rng)
        result = _execute(
            [matrices[p] for p in perm], counts, model_count, rng, False
        )
        acc.add_instance(result.score_units, result.elimination_round)
    return acc


def estimate_weighted(
    suite: WeightedSuite,
    table: ScoreTable,
    config: SimulationConfig,
    missing_policy: MissingPolicy | str = MissingPolicy.ERROR,
) -> SimulationResult:
    """Expected win scores when the round order itself is random.

    Every iteration first samples a dataset permutation from the suite
    weights (one dataset per round), then plays one contest instance on the
    permuted per-dataset win matrices. The estimate therefore averages over
    both order randomness and tournament randomness, from a single stream
    per instance.
    """
    sequence = RoundSequence(
        rounds=tuple(Round(label=ds, datasets=(ds,)) for ds in suite.datasets)
    )
    inputs = validate_inputs(table, sequence, missing_policy)
    tensor = build_tensor(inputs)
    matrices = tensor.round_matrices()
    rounds = len(suite.datasets)
    schedule = config.schedule or EliminationSchedule.constant(1, rounds)
    if len(schedule.counts) != rounds:
        raise DomainError(
            f"schedule covers {len(schedule.counts)} rounds, suite has {rounds}"
        )
    n = config.iterations
    workers = _resolve_workers(config.parallelism)
    args = (matrices, suite.weights, schedule.counts, tensor.m, config.seed)
    if workers > 1 and n >= 2 * workers:
        bounds = [(n * w) // workers for w in range(workers + 1)]
        acc = _Accumulator(tensor.m, rounds)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_weighted_chunk, *args, bounds[w], bounds[w + 1])
                for w in range(workers)
            ]
            for future in futures:
                acc.merge(future.result())
    else:
        acc = _weighted_chunk(*args, 0, n)
    return _result_from_accumulator(acc, tensor.models, n, config.seed, schedule)


@dataclass(frozen=True)
class OutcomeMatrix:
    """Per-question correctness records; ``None`` marks an unrecorded attempt."""

    models: tuple[str, ...]
    questions: tuple[str, ...]
    outcomes: tuple[tuple[int | None, ...], ...]  # [model][question], values 0/1


def load_outcomes(path: str | Path) -> OutcomeMatrix:
    """Load outcomes from CSV rows ``model,question_id,outcome``.

    Outcome must be 0 or 1; a (model, question) pair with no row is missing.
    """
    path = Path(path)
    records: dict[tuple[str, str], int] = {}
    models: list[str] = []
    questions: list[str] = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != [
            "model",
            "question_id",
            "outcome",
        ]:
            raise ParseError(f"{path}: header must be 'model,question_id,outcome'")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"{path}:{line_no}: expected 3 cells, got {len(row)}")
            model, question, raw = (cell.strip() for cell in row)
            if raw not in ("0", "1"):
                raise ParseError(f"{path}:{line_no}: outcome must be 0 or 1, got {raw!r}")
            key = (model, question)
            if key in records:
                raise ParseError(
                    f"{path}:{line_no}: duplicate outcome for model {model!r}, "
                    f"question {question!r}"
                )
            records[key] = int(raw)
            if model not in models:
                models.append(model)
            if question not in questions:
                questions.append(question)
    outcomes = tuple(
        tuple(records.get((model, question)) for question in questions)
        for model in models
    )
    return OutcomeMatrix(
        models=tuple(models), questions=tuple(questions), outcomes=outcomes
    )


def default_bands() -> tuple[tuple[float, float], ...]:
    """The ten accuracy deciles, easiest band first."""
    return tuple((float(lo), float(lo + 10)) for lo in range(90, -10, -10))


@dataclass(frozen=True)
class TierPartition:
    """Questions grouped by mean model accuracy, easiest tier first."""

    tiers: tuple[tuple[str, ...], ...]
    bands: tuple[tuple[float, float], ...]


def _check_bands(bands: tuple[tuple[float, float], ...]) -> tuple[tuple[float, float], ...]:
    ordered = tuple(sorted(bands, key=lambda b: -b[0]))
    for lo, hi in ordered:
        if hi <= lo:
            raise DomainError(f"band [{lo}, {hi}) is empty")
    if ordered[0][1] != 100.0 or ordered[-1][0] != 0.0:
        raise DomainError("bands must cover [0, 100]")
    for (lo, _), (_, next_hi) in zip(ordered, ordered[1:]):
        if next_hi != lo:
            raise DomainError("bands must partition [0, 100] without gaps or overlap")
    return ordered


def build_tiers(
    outcomes: OutcomeMatrix,
    bands: tuple[tuple[float, float], ...] | None = None,
) -> TierPartition:
    """Partition questions into accuracy bands.

    A question's difficulty is its mean success rate over the models that
    attempted it. Bands are half-open [lo, hi) except the top band, which
    includes 100%. Tiers come back easiest (highest band) first; a band with
    no questions yields an empty tier.
    """
    ordered = _check_bands(bands if bands is not None else default_bands())
    tiers: list[list[str]] = [[] for _ in ordered]
    for qi, question in enumerate(outcomes.questions):
        attempts = [row[qi] for row in outcomes.outcomes if row[qi] is not None]
        if not attempts:
            raise EmptyQuestionError(
                f"question {question!r} has no recorded outcome for any model"
            )
        accuracy = 100.0 * sum(attempts) / len(attempts)
        for ti, (lo, hi) in enumerate(ordered):
            if lo <= accuracy < hi or (hi == 100.0 and accuracy == 100.0):
                tiers[ti].append(question)
                break
    return TierPartition(
        tiers=tuple(tuple(tier) for tier in tiers), bands=ordered
    )


@dataclass(frozen=True)
class TierRounds:
    """Synthetic per-tier score table and round sequence, plus any warnings."""

    table: ScoreTable
    sequence: RoundSequence
    warnings: tuple[str, ...]


def tier_sequence_to_rounds(
    partition: TierPartition, outcomes: OutcomeMatrix
) -> TierRounds:
    """Turn a tier partition into one synthetic dataset and round per tier.

    A model's score on a tier is its accuracy (%) over that tier's questions,
    counting only recorded attempts. Empty tiers are dropped; both drops and
    models with no attempts in a tier (scored 0) are reported as warnings.
    """
    question_index = {q: i for i, q in enumerate(outcomes.questions)}
    warnings: list[str] = []
    labels: list[str] = []
    columns: list[list[float]] = []
    for ti, (tier, band) in enumerate(zip(partition.tiers, partition.bands), start=1):
        label = f"tier{ti:02d}"
        if not tier:
            warnings.append(
                f"{label} (accuracy band [{band[0]:g}, {band[1]:g})) has no "
                "questions and was dropped"
            )
            continue
        indices = [question_index[q] for q in tier]
        column: list[float] = []
        for model, row in zip(outcomes.models, outcomes.outcomes):
            attempts = [row[qi] for qi in indices if row[qi] is not None]
            if not attempts:
                warnings.append(
                    f"model {model!r} has no recorded outcome in {label}; scored 0"
                )
                column.append(0.0)
            else:
                column.append(100.0 * sum(attempts) / len(attempts))
        labels.append(label)
        columns.append(column)
    table = ScoreTable(
        models=outcomes.models,
        datasets=tuple(labels),
        scores=tuple(
            tuple(columns[ci][mi] for ci in range(len(columns)))
            for mi in range(len(outcomes.models))
        ),
    )
    sequence = RoundSequence(
        rounds=tuple(Round(label=label, datasets=(label,)) for label in labels)
    )
    return TierRounds(table=table, sequence=sequence, warnings=tuple(warnings))
