"""Loading and validation of benchmark score tables and round sequences.

A score table is a dense model x dataset matrix of percentage scores with an
explicit missing marker (``None``). A round sequence maps datasets onto the
ordered rounds of a contest. Both are plain immutable values; validation
produces a ``ValidatedInputs`` bundle that the win-rate builder consumes.

File formats:

* score CSV: header ``model,<dataset1>,<dataset2>,...``, one row per model,
  empty cell means missing, UTF-8, decimal point ``.``
* score JSON: ``{"models": [...], "datasets": [...], "scores": [[...]]}``
  with ``null`` for missing cells
* round sequence: JSON array of ``{"label": ..., "datasets": [...]}``
  objects, array order giving the round order
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    DomainError,
    DuplicateDatasetError,
    DuplicateModelError,
    MissingScoreError,
    ParseError,
    UnknownDatasetError,
    UnknownModelError,
)

SCORE_MIN = 0.0
SCORE_MAX = 100.0


class MissingPolicy(str, enum.Enum):
    """How validation treats missing score cells referenced by a sequence."""

    ERROR = "error"
    TREAT_AS_LOSS = "treat_as_loss"


@dataclass(frozen=True)
class ScoreTable:
    """Dense model x dataset score matrix; ``None`` marks a missing cell."""

    models: tuple[str, ...]
    datasets: tuple[str, ...]
    scores: tuple[tuple[float | None, ...], ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for name in self.models:
            if not name:
                raise ParseError("model name must be a non-empty string")
            if name in seen:
                raise DuplicateModelError(f"duplicate model name: {name!r}")
            seen.add(name)
        seen_ds: set[str] = set()
        for name in self.datasets:
            if not name:
                raise ParseError("dataset name must be a non-empty string")
            if name in seen_ds:
                raise ParseError(f"duplicate dataset column: {name!r}")
            seen_ds.add(name)
        if len(self.scores) != len(self.models):
            raise ParseError(
                f"score matrix has {len(self.scores)} rows for {len(self.models)} models"
            )
        for mi, row in enumerate(self.scores):
            if len(row) != len(self.datasets):
                raise ParseError(
                    f"row for model {self.models[mi]!r} has {len(row)} cells, "
                    f"expected {len(self.datasets)}"
                )
            for di, value in enumerate(row):
                if value is None:
                    continue
                if not SCORE_MIN <= value <= SCORE_MAX:
                    raise DomainError(
                        f"score {value} out of range [0, 100] for model "
                        f"{self.models[mi]!r}, dataset {self.datasets[di]!r}"
                    )

    def model_index(self, name: str) -> int:
        try:
            return self.models.index(name)
        except ValueError:
            raise UnknownModelError(f"unknown model: {name!r}") from None

    def dataset_index(self, name: str) -> int:
        try:
            return self.datasets.index(name)
        except ValueError:
            raise UnknownDatasetError(f"unknown dataset: {name!r}") from None

    def score(self, model: str, dataset: str) -> float | None:
        return self.scores[self.model_index(model)][self.dataset_index(dataset)]


@dataclass(frozen=True)
class Round:
    label: str
    datasets: tuple[str, ...]


@dataclass(frozen=True)
class RoundSequence:
    """Ordered rounds of a contest, each holding one or more datasets."""

    rounds: tuple[Round, ...]

    def __post_init__(self) -> None:
        if not self.rounds:
            raise ParseError("a round sequence needs at least one round")
        seen: set[str] = set()
        for rnd in self.rounds:
            if not rnd.datasets:
                raise ParseError(f"round {rnd.label!r} lists no datasets")
            for ds in rnd.datasets:
                if ds in seen:
                    raise DuplicateDatasetError(
                        f"dataset {ds!r} appears in more than one round"
                    )
                seen.add(ds)

    @property
    def k(self) -> int:
        return len(self.rounds)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(rnd.label for rnd in self.rounds)


@dataclass(frozen=True)
class ValidatedInputs:
    """A score table and sequence that passed cross-validation.

    ``missing_cells`` lists the (model index, dataset index) pairs that are
    referenced by the sequence but carry no score; non-empty only under the
    ``treat_as_loss`` policy.
    """

    table: ScoreTable
    sequence: RoundSequence
    policy: MissingPolicy
    missing_cells: frozenset[tuple[int, int]]


def _check_score(raw: str, model: str, dataset: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(
            f"cannot parse score {raw!r} for model {model!r}, dataset {dataset!r}"
        ) from None
    if not SCORE_MIN <= value <= SCORE_MAX:
        raise DomainError(
            f"score {value} out of range [0, 100] for model {model!r}, "
            f"dataset {dataset!r}"
        )
    return value


def _load_score_csv(path: Path) -> ScoreTable:
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if len(header) < 2 or header[0].strip().lower() != "model":
            raise ParseError(f"{path}: header must be 'model,<dataset>,...'")
        datasets = tuple(name.strip() for name in header[1:])
        models: list[str] = []
        rows: list[tuple[float | None, ...]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(datasets) + 1:
                raise ParseError(
                    f"{path}:{line_no}: expected {len(datasets) + 1} cells, got {len(row)}"
                )
            model = row[0].strip()
            cells: list[float | None] = []
            for dataset, raw in zip(datasets, row[1:]):
                raw = raw.strip()
                cells.append(None if raw == "" else _check_score(raw, model, dataset))
            models.append(model)
            rows.append(tuple(cells))
    return ScoreTable(models=tuple(models), datasets=datasets, scores=tuple(rows))


def _load_score_json(path: Path) -> ScoreTable:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise ParseError(f"{path}: expected a JSON object")
    try:
        models = payload["models"]
        datasets = payload["datasets"]
        scores = payload["scores"]
    except KeyError as exc:
        raise ParseError(f"{path}: missing key {exc}") from None
    if not isinstance(models, list) or not isinstance(datasets, list):
        raise ParseError(f"{path}: 'models' and 'datasets' must be lists")
    rows: list[tuple[float | None, ...]] = []
    for mi, row in enumerate(scores):
        if not isinstance(row, list):
            raise ParseError(f"{path}: score row {mi} is not a list")
        cells: list[float | None] = []
        for di, value in enumerate(row):
            if value is None:
                cells.append(None)
            elif isinstance(value, (int, float)):
                cells.append(float(value))
            else:
                raise ParseError(f"{path}: score [{mi}][{di}] is not a number or null")
        rows.append(tuple(cells))
    return ScoreTable(
        models=tuple(str(m) for m in models),
        datasets=tuple(str(d) for d in datasets),
        scores=tuple(rows),
    )


def load_score_table(path: str | Path, format: str | None = None) -> ScoreTable:
    """Load a score table from CSV or JSON.

    When ``format`` is omitted it is inferred from the file suffix.
    """
    path = Path(path)
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "csv"
    if format == "csv":
        return _load_score_csv(path)
    if format == "json":
        return _load_score_json(path)
    raise ValueError(f"unknown score table format: {format!r}")


def save_score_table(table: ScoreTable, path: str | Path, format: str | None = None) -> None:
    """Write a score table back to disk; inverse of :func:`load_score_table`."""
    path = Path(path)
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "csv"
    if format == "csv":
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["model", *table.datasets])
            for model, row in zip(table.models, table.scores):
                writer.writerow([model] + ["" if v is None else repr(v) for v in row])
    elif format == "json":
        payload = {
            "models": list(table.models),
            "datasets": list(table.datasets),
            "scores": [list(row) for row in table.scores],
        }
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown score table format: {format!r}")


def load_round_sequence(path: str | Path) -> RoundSequence:
    """Load a round sequence from its JSON file format."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(payload, list):
        raise ParseError(f"{path}: expected a JSON array of round objects")
    rounds: list[Round] = []
    for idx, entry in enumerate(payload):
        if not isinstance(entry, dict):
            raise ParseError(f"{path}: round {idx} is not an object")
        label = entry.get("label")
        datasets = entry.get("datasets")
        if not isinstance(label, str) or not label:
            raise ParseError(f"{path}: round {idx} needs a non-empty 'label'")
        if not isinstance(datasets, list) or not datasets:
            raise ParseError(f"{path}: round {label!r} needs a non-empty 'datasets' list")
        rounds.append(Round(label=label, datasets=tuple(str(d) for d in datasets)))
    return RoundSequence(rounds=tuple(rounds))


def save_round_sequence(sequence: RoundSequence, path: str | Path) -> None:
    payload = [
        {"label": rnd.label, "datasets": list(rnd.datasets)} for rnd in sequence.rounds
    ]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def validate_inputs(
    table: ScoreTable,
    sequence: RoundSequence,
    missing_policy: MissingPolicy | str = MissingPolicy.ERROR,
) -> ValidatedInputs:
    """Cross-check a table against a sequence and apply the missing policy.

    Under ``error`` any missing cell referenced by the sequence aborts with
    ``MissingScoreError``. Under ``treat_as_loss`` such cells are recorded so
    the win-rate builder scores them as automatic losses (two missing sides
    of a comparison count as an exact tie).
    """
    policy = MissingPolicy(missing_policy)
    missing: set[tuple[int, int]] = set()
    for rnd in sequence.rounds:
        for dataset in rnd.datasets:
            di = table.dataset_index(dataset)
            for mi, model in enumerate(table.models):
                if table.scores[mi][di] is None:
                    if policy is MissingPolicy.ERROR:
                        raise MissingScoreError(
                            f"missing score for model {model!r} on dataset {dataset!r}"
                        )
                    missing.add((mi, di))
    return ValidatedInputs(
        table=table, sequence=sequence, policy=policy, missing_cells=frozenset(missing)
    )
