"""Pairwise win-rate tensor construction.

The tensor holds, for every ordered model pair and every round, the
probability that the first model beats the second on that round's datasets.
Built tensors are binary-or-half: a pair either has a strict majority winner
across the round's datasets (entry 1 or 0) or is exactly deadlocked (0.5).
The contest engine accepts any antisymmetric tensor with entries in [0, 1],
so hand-written probabilistic fixtures are equally valid inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import DomainError, ParseError
from .ingestion import ScoreTable, ValidatedInputs

_ANTISYM_TOL = 1e-9


@dataclass(frozen=True)
class WinRateTensor:
    """Dense M x M x K win-probability tensor, indexed [i][j][k]."""

    models: tuple[str, ...]
    round_labels: tuple[str, ...]
    w: tuple[tuple[tuple[float, ...], ...], ...]

    def __post_init__(self) -> None:
        m, k = len(self.models), len(self.round_labels)
        if len(self.w) != m:
            raise DomainError(f"tensor has {len(self.w)} rows for {m} models")
        for i, plane in enumerate(self.w):
            if len(plane) != m:
                raise DomainError(f"tensor row {i} has {len(plane)} columns, expected {m}")
            for j, cell in enumerate(plane):
                if len(cell) != k:
                    raise DomainError(
                        f"tensor entry [{i}][{j}] has {len(cell)} rounds, expected {k}"
                    )
                for kk, value in enumerate(cell):
                    if not 0.0 <= value <= 1.0:
                        raise DomainError(
                            f"win rate w[{i}][{j}][{kk}] = {value} outside [0, 1]"
                        )
                    if i == j and abs(value - 0.5) > _ANTISYM_TOL:
                        raise DomainError(
                            f"diagonal entry w[{i}][{i}][{kk}] must be 0.5, got {value}"
                        )
                    if i < j:
                        mirror = self.w[j][i][kk]
                        if abs(value + mirror - 1.0) > _ANTISYM_TOL:
                            raise DomainError(
                                f"antisymmetry violated at [{i}][{j}][{kk}]: "
                                f"{value} + {mirror} != 1"
                            )

    @property
    def m(self) -> int:
        return len(self.models)

    @property
    def k(self) -> int:
        return len(self.round_labels)

    def round_matrices(self) -> list[list[list[float]]]:
        """Per-round M x M matrices, laid out [k][i][j] for fast row access."""
        m, k = self.m, self.k
        return [[[self.w[i][j][kk] for j in range(m)] for i in range(m)] for kk in range(k)]


def tensor_from_round_matrices(
    models: tuple[str, ...] | list[str],
    round_labels: tuple[str, ...] | list[str],
    matrices: list[list[list[float]]],
) -> WinRateTensor:
    """Build a tensor from per-round [k][i][j] matrices (test-fixture helper)."""
    m = len(models)
    w = tuple(
        tuple(tuple(matrices[kk][i][j] for kk in range(len(round_labels))) for j in range(m))
        for i in range(m)
    )
    return WinRateTensor(models=tuple(models), round_labels=tuple(round_labels), w=w)


def _pair_entry(
    row_i: tuple[float | None, ...],
    row_j: tuple[float | None, ...],
    dataset_indices: tuple[int, ...],
) -> float:
    # Majority of per-dataset wins, in half-point units to keep the
    # f-vs-one-half comparison exact: wins*2 + ties vs dataset count.
    units = 0
    for di in dataset_indices:
        a, b = row_i[di], row_j[di]
        if a is None and b is None:
            units += 1
        elif a is None:
            pass
        elif b is None:
            units += 2
        elif a > b:
            units += 2
        elif a == b:
            units += 1
    n = len(dataset_indices)
    if units > n:
        return 1.0
    if units < n:
        return 0.0
    return 0.5


def build_tensor(inputs: ValidatedInputs) -> WinRateTensor:
    """Build the win-rate tensor from validated scores and a round sequence.

    For each round and ordered pair (i, j), model i wins each of the round's
    datasets where its score is strictly higher; exact ties contribute half a
    win to both sides. The per-round fraction is thresholded at one half,
    giving entries in {0, 0.5, 1}. Missing cells only occur under the
    ``treat_as_loss`` policy: the non-missing side takes the dataset, two
    missing sides tie.
    """
    table = inputs.table
    m = len(table.models)
    round_sets = [
        tuple(table.dataset_index(ds) for ds in rnd.datasets)
        for rnd in inputs.sequence.rounds
    ]
    k = len(round_sets)
    w = [[[0.5] * k for _ in range(m)] for _ in range(m)]
    for i in range(m):
        row_i = table.scores[i]
        for j in range(i + 1, m):
            row_j = table.scores[j]
            for kk, dataset_indices in enumerate(round_sets):
                entry = _pair_entry(row_i, row_j, dataset_indices)
                w[i][j][kk] = entry
                w[j][i][kk] = 1.0 - entry
    return WinRateTensor(
        models=table.models,
        round_labels=inputs.sequence.labels,
        w=tuple(tuple(tuple(cell) for cell in plane) for plane in w),
    )


def perturb_scores(
    table: ScoreTable,
    targets: list[tuple[str, str, float]],
) -> ScoreTable:
    """Return a copy of the table with the targeted cells overwritten.

    Each target is a (model, dataset, new score) triple; the original table
    is untouched.
    """
    rows = [list(row) for row in table.scores]
    for model, dataset, value in targets:
        mi = table.model_index(model)
        di = table.dataset_index(dataset)
        if not 0.0 <= value <= 100.0:
            raise DomainError(
                f"perturbed score {value} out of range [0, 100] for model "
                f"{model!r}, dataset {dataset!r}"
            )
        rows[mi][di] = float(value)
    return ScoreTable(
        models=table.models,
        datasets=table.datasets,
        scores=tuple(tuple(row) for row in rows),
    )


def save_tensor(tensor: WinRateTensor, path: str | Path) -> None:
    """Write a tensor to its JSON file format (layout [i][j][k])."""
    payload = {
        "layout": "ijk",
        "models": list(tensor.models),
        "rounds": list(tensor.round_labels),
        "w": [[list(cell) for cell in plane] for plane in tensor.w],
    }
    Path(path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


def load_tensor(path: str | Path) -> WinRateTensor:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise ParseError(f"{path}: expected a JSON object")
    layout = payload.get("layout", "ijk")
    if layout != "ijk":
        raise ParseError(f"{path}: unsupported tensor layout {layout!r}")
    try:
        models = tuple(str(m) for m in payload["models"])
        rounds = tuple(str(r) for r in payload["rounds"])
        w = tuple(
            tuple(tuple(float(v) for v in cell) for cell in plane)
            for plane in payload["w"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed tensor file: {exc}") from None
    return WinRateTensor(models=models, round_labels=rounds, w=w)
