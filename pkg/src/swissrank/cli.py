"""Command-line entry point.

One binary, seven subcommands: ``rank``, ``fsa``, ``perturb``, ``oracle``,
``tiers``, ``order``, and ``build-tensor``. Every command resolves its
parameters (seed, iteration count, elimination schedule, policies), writes
its reports (CSV + JSON, with matplotlib figures alongside where a report
has a natural picture), and records a run manifest with input digests and a
replayable argument vector. Exit codes: 0 success, 1 data or domain error,
2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import (
    FsaThresholds,
    exact_expected_scores,
    fsa,
    perturbation_experiment,
    rank_models,
)
from .engine import EliminationSchedule, run_single_instance, trace_to_jsonl
from .errors import ParseError, SwissRankError
from .ingestion import (
    MissingPolicy,
    load_round_sequence,
    load_score_table,
    save_round_sequence,
    save_score_table,
    validate_inputs,
)
from .montecarlo import (
    DEFAULT_ITERATIONS,
    SimulationConfig,
    estimate,
    result_to_dict,
)
from .ordering import (
    build_tiers,
    estimate_weighted,
    load_outcomes,
    load_weighted_suite,
    sample_order,
    tier_sequence_to_rounds,
)
from .streams import MAX_SEED, derive_rng
from .winrate import build_tensor, load_tensor, perturb_scores, save_tensor

SEED_ENV_VAR = "CSD_SEED"


class UsageError(Exception):
    """Bad command usage detected after argparse (exit code 2)."""


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for block in iter(lambda: handle.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def _resolve_seed(args: argparse.Namespace, environ: dict[str, str]) -> int:
    if args.seed is not None:
        seed = args.seed
    else:
        raw = environ.get(SEED_ENV_VAR, "0")
        try:
            seed = int(raw)
        except ValueError:
            raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None
    if not 0 <= seed <= MAX_SEED:
        raise UsageError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def _parse_t_grid(raw: str) -> list[int]:
    try:
        grid = [int(part) for part in raw.split(",") if part.strip() != ""]
    except ValueError:
        raise UsageError(f"--t-grid must be a comma-separated integer list, got {raw!r}") from None
    if len(set(grid)) < 2:
        raise UsageError("--t-grid needs at least two distinct values (slope undefined)")
    if any(t < 0 for t in grid):
        raise UsageError("--t-grid values must be >= 0")
    return grid


def _missing_policy(args: argparse.Namespace) -> MissingPolicy:
    return MissingPolicy.ERROR if args.missing == "error" else MissingPolicy.TREAT_AS_LOSS


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload: object) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _write_csv(path: Path, header: list[str], rows: list[list[object]]) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value: float) -> str:
    return repr(float(value))


def _manifest(
    out_dir: Path,
    command: str,
    parameters: dict[str, object],
    inputs: list[Path],
    name: str,
) -> None:
    argv: list[str] = [command]
    for key, value in parameters.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        elif value is not None:
            argv.extend([flag, str(value)])
    payload = {
        "command": command,
        "version": __version__,
        "created_utc": dt.datetime.now(dt.timezone.utc).isoformat(),
        "parameters": parameters,
        "argv": argv,
        "inputs": {str(path): _sha256(Path(path)) for path in inputs},
    }
    _write_json(out_dir / name, payload)


def replay_manifest(manifest_path: str | Path, out_dir: str | Path | None = None) -> int:
    """Re-run the command recorded in a manifest, optionally redirecting --out."""
    payload = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    argv = list(payload["argv"])
    if out_dir is not None:
        try:
            position = argv.index("--out")
            argv[position + 1] = str(out_dir)
        except ValueError:
            argv.extend(["--out", str(out_dir)])
    return main(argv)


def _load_contest(args: argparse.Namespace):
    table = load_score_table(args.scores)
    sequence = load_round_sequence(args.sequence)
    inputs = validate_inputs(table, sequence, _missing_policy(args))
    return table, sequence, build_tensor(inputs)


def _config(args: argparse.Namespace, seed: int, rounds: int) -> SimulationConfig:
    return SimulationConfig(
        iterations=args.n,
        seed=seed,
        schedule=EliminationSchedule.constant(args.t, rounds),
        parallelism=args.workers,
    )


def _write_ranking_report(out_dir: Path, stem: str, result, title: str) -> None:
    from .plots import plot_ranking

    ranks = rank_models(result.models, result.expected_scores)
    order = sorted(range(len(result.models)), key=lambda i: ranks[i])
    rows = [
        [
            result.models[i],
            _fmt(result.expected_scores[i]),
            _fmt(result.std_error[i]),
            _fmt(result.survival_prob[i]),
            ranks[i],
        ]
        for i in order
    ]
    _write_csv(out_dir / f"{stem}.csv", ["model", "e_score", "std_err", "survival", "rank"], rows)
    _write_json(out_dir / f"{stem}.json", result_to_dict(result))
    plot_ranking(result, out_dir / f"{stem}.png", title=title)


def cmd_rank(args: argparse.Namespace, environ: dict[str, str]) -> int:
    seed = _resolve_seed(args, environ)
    out_dir = _out_dir(args)
    _, _, tensor = _load_contest(args)
    config = _config(args, seed, tensor.k)
    result = estimate(tensor, config)
    _write_ranking_report(out_dir, "rank", result, "Contest ranking")
    if args.trace:
        traced = run_single_instance(tensor, config.schedule, derive_rng(seed, 0))
        Path(args.trace).write_text(trace_to_jsonl(traced, tensor.models), encoding="utf-8")
    _manifest(
        out_dir,
        "rank",
        {
            "scores": args.scores,
            "sequence": args.sequence,
            "seed": seed,
            "n": args.n,
            "t": args.t,
            "missing": args.missing,
            "workers": args.workers,
            "out": str(out_dir),
            "trace": args.trace,
        },
        [Path(args.scores), Path(args.sequence)],
        "rank_manifest.json",
    )
    print(f"wrote {out_dir / 'rank.csv'}")
    return 0


def cmd_fsa(args: argparse.Namespace, environ: dict[str, str]) -> int:
    seed = _resolve_seed(args, environ)
    grid = _parse_t_grid(args.t_grid)
    out_dir = _out_dir(args)
    _, _, tensor = _load_contest(args)
    thresholds = None
    if args.specialist_slope is not None or args.generalist_band is not None:
        defaults = FsaThresholds.for_rounds(tensor.k)
        thresholds = FsaThresholds(
            specialist_slope=(
                args.specialist_slope
                if args.specialist_slope is not None
                else defaults.specialist_slope
            ),
            generalist_band=(
                args.generalist_band
                if args.generalist_band is not None
                else defaults.generalist_band
            ),
        )
    config = _config(args, seed, tensor.k)
    report = fsa(tensor, config, grid, thresholds)
    _write_fsa_report(out_dir, "fsa", report, config)
    _manifest(
        out_dir,
        "fsa",
        {
            "scores": args.scores,
            "sequence": args.sequence,
            "seed": seed,
            "n": args.n,
            "t_grid": ",".join(str(t) for t in grid),
            "missing": args.missing,
            "workers": args.workers,
            "specialist_slope": args.specialist_slope,
            "generalist_band": args.generalist_band,
            "out": str(out_dir),
        },
        [Path(args.scores), Path(args.sequence)],
        "fsa_manifest.json",
    )
    print(f"wrote {out_dir / 'fsa.csv'}")
    return 0


def _write_fsa_report(out_dir: Path, stem: str, report, config: SimulationConfig) -> None:
    from .plots import plot_fsa_curves, plot_fsa_profile

    rows = [
        [
            model,
            _fmt(report.base_score[m]),
            _fmt(report.sensitivity[m]),
            "" if report.drop is None else _fmt(report.drop[m]),
            report.classification[m],
        ]
        for m, model in enumerate(report.models)
    ]
    _write_csv(out_dir / f"{stem}.csv", ["model", "base_score", "lambda", "delta", "class"], rows)
    curve_rows = [
        [t, model, _fmt(report.curves[m][ti]), _fmt(report.curve_errors[m][ti])]
        for ti, t in enumerate(report.t_grid)
        for m, model in enumerate(report.models)
    ]
    _write_csv(out_dir / f"{stem}_curve.csv", ["t", "model", "e_score", "std_err"], curve_rows)
    _write_json(
        out_dir / f"{stem}.json",
        {
            "seed": config.seed,
            "iterations": config.iterations,
            "t_grid": list(report.t_grid),
            "models": list(report.models),
            "curves": [list(curve) for curve in report.curves],
            "std_err": [list(err) for err in report.curve_errors],
            "base_score": list(report.base_score),
            "lambda": list(report.sensitivity),
            "delta": None if report.drop is None else list(report.drop),
            "class": list(report.classification),
            "thresholds": {
                "specialist_slope": report.thresholds.specialist_slope,
                "generalist_band": report.thresholds.generalist_band,
            },
        },
    )
    plot_fsa_curves(report, out_dir / f"{stem}_curves.png")
    plot_fsa_profile(report, out_dir / f"{stem}_profile.png")


def _load_perturbations(path: Path) -> list[tuple[str, str, float]]:
    targets: list[tuple[str, str, float]] = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["model", "dataset", "score"]:
            raise ParseError(f"{path}: header must be 'model,dataset,score'")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"{path}:{line_no}: expected 3 cells, got {len(row)}")
            try:
                value = float(row[2])
            except ValueError:
                raise ParseError(f"{path}:{line_no}: score {row[2]!r} is not a number") from None
            targets.append((row[0].strip(), row[1].strip(), value))
    return targets


def cmd_perturb(args: argparse.Namespace, environ: dict[str, str]) -> int:
    from .plots import plot_rank_comparison

    seed = _resolve_seed(args, environ)
    out_dir = _out_dir(args)
    base = load_score_table(args.scores)
    sequence = load_round_sequence(args.sequence)
    targets = _load_perturbations(Path(args.perturbations))
    perturbed = perturb_scores(base, targets)
    config = _config(args, seed, sequence.k)
    comparison, before, after = perturbation_experiment(
        base, perturbed, sequence, config, _missing_policy(args)
    )
    rows = [
        [
            model,
            comparison.csd_rank_before[m],
            comparison.csd_rank_after[m],
            comparison.avg_rank_before[m],
            comparison.avg_rank_after[m],
        ]
        for m, model in enumerate(comparison.models)
    ]
    _write_csv(
        out_dir / "perturb.csv",
        ["model", "csd_rank_before", "csd_rank_after", "avg_rank_before", "avg_rank_after"],
        rows,
    )
    _write_json(
        out_dir / "perturb.json",
        {
            "models": list(comparison.models),
            "csd_rank_before": list(comparison.csd_rank_before),
            "csd_rank_after": list(comparison.csd_rank_after),
            "avg_rank_before": list(comparison.avg_rank_before),
            "avg_rank_after": list(comparison.avg_rank_after),
            "csd_delta": [comparison.csd_delta(m) for m in range(len(comparison.models))],
            "avg_delta": [comparison.avg_delta(m) for m in range(len(comparison.models))],
            "before": result_to_dict(before),
            "after": result_to_dict(after),
        },
    )
    plot_rank_comparison(comparison, out_dir / "perturb.png")
    _manifest(
        out_dir,
        "perturb",
        {
            "scores": args.scores,
            "perturbations": args.perturbations,
            "sequence": args.sequence,
            "seed": seed,
            "n": args.n,
            "t": args.t,
            "missing": args.missing,
            "workers": args.workers,
            "out": str(out_dir),
        },
        [Path(args.scores), Path(args.perturbations), Path(args.sequence)],
        "perturb_manifest.json",
    )
    print(f"wrote {out_dir / 'perturb.csv'}")
    return 0


def cmd_oracle(args: argparse.Namespace, environ: dict[str, str]) -> int:
    seed = _resolve_seed(args, environ)
    out_dir = _out_dir(args)
    if args.tensor:
        tensor = load_tensor(args.tensor)
        input_paths = [Path(args.tensor)]
    else:
        if not args.scores or not args.sequence:
            raise UsageError("oracle needs either --tensor or both --scores and --sequence")
        _, _, tensor = _load_contest(args)
        input_paths = [Path(args.scores), Path(args.sequence)]
    schedule = EliminationSchedule.constant(args.t, tensor.k)
    exact = exact_expected_scores(
        tensor, schedule, limits=(args.max_models, args.max_rounds)
    )
    header = ["model", "e_exact", "fraction"]
    rows: list[list[object]] = [
        [model, f"{float(value):.12f}", str(value)]
        for model, value in zip(tensor.models, exact)
    ]
    payload: dict[str, object] = {
        "t": args.t,
        "models": list(tensor.models),
        "e_exact": [float(v) for v in exact],
        "fractions": [str(v) for v in exact],
    }
    if args.check:
        config = _config(args, seed, tensor.k)
        result = estimate(tensor, config)
        header += ["e_mc", "std_err", "abs_diff", "pass"]
        for m in range(tensor.m):
            diff = abs(result.expected_scores[m] - float(exact[m]))
            ok = diff <= 3.0 * result.std_error[m]
            rows[m] += [
                _fmt(result.expected_scores[m]),
                _fmt(result.std_error[m]),
                _fmt(diff),
                str(ok).lower(),
            ]
        payload["check"] = result_to_dict(result)
    _write_csv(out_dir / "oracle.csv", header, rows)
    _write_json(out_dir / "oracle.json", payload)
    for row in rows:
        print(",".join(str(cell) for cell in row))
    _manifest(
        out_dir,
        "oracle",
        {
            "scores": args.scores,
            "sequence": args.sequence,
            "tensor": args.tensor,
            "seed": seed,
            "n": args.n,
            "t": args.t,
            "missing": args.missing,
            "workers": args.workers,
            "max_models": args.max_models,
            "max_rounds": args.max_rounds,
            "check": args.check,
            "out": str(out_dir),
        },
        input_paths,
        "oracle_manifest.json",
    )
    return 0


def cmd_tiers(args: argparse.Namespace, environ: dict[str, str]) -> int:
    seed = _resolve_seed(args, environ)
    grid = _parse_t_grid(args.t_grid)
    out_dir = _out_dir(args)
    outcomes = load_outcomes(args.outcomes)
    partition = build_tiers(outcomes)
    tier_rounds = tier_sequence_to_rounds(partition, outcomes)
    _write_json(
        out_dir / "tiers.json",
        {
            "bands": [list(band) for band in partition.bands],
            "tiers": [list(tier) for tier in partition.tiers],
            "rounds": [rnd.label for rnd in tier_rounds.sequence.rounds],
            "warnings": list(tier_rounds.warnings),
        },
    )
    save_score_table(tier_rounds.table, out_dir / "tier_scores.csv")
    save_round_sequence(tier_rounds.sequence, out_dir / "tier_sequence.json")
    inputs = validate_inputs(tier_rounds.table, tier_rounds.sequence, MissingPolicy.ERROR)
    tensor = build_tensor(inputs)
    config = _config(args, seed, tensor.k)
    report = fsa(tensor, config, grid)
    _write_fsa_report(out_dir, "tier_fsa", report, config)
    for warning in tier_rounds.warnings:
        print(f"warning: {warning}")
    _manifest(
        out_dir,
        "tiers",
        {
            "outcomes": args.outcomes,
            "seed": seed,
            "n": args.n,
            "t_grid": ",".join(str(t) for t in grid),
            "workers": args.workers,
            "out": str(out_dir),
        },
        [Path(args.outcomes)],
        "tiers_manifest.json",
    )
    print(f"wrote {out_dir / 'tier_fsa.csv'}")
    return 0


def cmd_order(args: argparse.Namespace, environ: dict[str, str]) -> int:
    seed = _resolve_seed(args, environ)
    out_dir = _out_dir(args)
    suite = load_weighted_suite(args.suite)
    if args.orders_only:
        orders = [sample_order(suite, derive_rng(seed, i)) for i in range(args.samples)]
        for order in orders:
            print(",".join(order))
        _write_json(out_dir / "orders.json", {"seed": seed, "orders": orders})
        _manifest(
            out_dir,
            "order",
            {
                "suite": args.suite,
                "seed": seed,
                "samples": args.samples,
                "orders_only": True,
                "out": str(out_dir),
            },
            [Path(args.suite)],
            "order_manifest.json",
        )
        return 0
    if not args.scores:
        raise UsageError("order needs --scores unless --orders-only is given")
    table = load_score_table(args.scores)
    config = SimulationConfig(
        iterations=args.n,
        seed=seed,
        schedule=EliminationSchedule.constant(args.t, len(suite.datasets)),
        parallelism=args.workers,
    )
    result = estimate_weighted(suite, table, config, _missing_policy(args))
    _write_ranking_report(out_dir, "order", result, "Weighted-order contest ranking")
    _manifest(
        out_dir,
        "order",
        {
            "suite": args.suite,
            "scores": args.scores,
            "seed": seed,
            "n": args.n,
            "t": args.t,
            "missing": args.missing,
            "workers": args.workers,
            "out": str(out_dir),
        },
        [Path(args.suite), Path(args.scores)],
        "order_manifest.json",
    )
    print(f"wrote {out_dir / 'order.csv'}")
    return 0


def cmd_build_tensor(args: argparse.Namespace, environ: dict[str, str]) -> int:
    out_dir = _out_dir(args)
    _, _, tensor = _load_contest(args)
    save_tensor(tensor, out_dir / "tensor.json")
    _manifest(
        out_dir,
        "build-tensor",
        {
            "scores": args.scores,
            "sequence": args.sequence,
            "missing": args.missing,
            "out": str(out_dir),
        },
        [Path(args.scores), Path(args.sequence)],
        "tensor_manifest.json",
    )
    print(f"wrote {out_dir / 'tensor.json'}")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help=f"root seed (default ${SEED_ENV_VAR} or 0)")
    parser.add_argument("--n", type=int, default=DEFAULT_ITERATIONS, help="Monte Carlo iterations")
    parser.add_argument("--t", type=int, default=1, help="eliminations per round")
    parser.add_argument("--t-grid", default="0,1,2", help="comma-separated elimination counts for sweeps")
    parser.add_argument("--missing", choices=("error", "loss"), default="error", help="missing-score policy")
    parser.add_argument("--workers", type=int, default=0, help="worker processes (0 = auto)")
    parser.add_argument("--out", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swissrank",
        description="Swiss-system contest simulation over benchmark score tables.",
    )
    parser.add_argument("--version", action="version", version=f"swissrank {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_rank = sub.add_parser("rank", help="estimate expected win scores and rank models")
    p_rank.add_argument("--scores", required=True)
    p_rank.add_argument("--sequence", required=True)
    p_rank.add_argument("--trace", default=None, help="write a JSONL trace of instance 0")
    _add_common(p_rank)
    p_rank.set_defaults(func=cmd_rank)

    p_fsa = sub.add_parser("fsa", help="sweep elimination pressure and profile sensitivity")
    p_fsa.add_argument("--scores", required=True)
    p_fsa.add_argument("--sequence", required=True)
    p_fsa.add_argument("--specialist-slope", type=float, default=None)
    p_fsa.add_argument("--generalist-band", type=float, default=None)
    _add_common(p_fsa)
    p_fsa.set_defaults(func=cmd_fsa)

    p_perturb = sub.add_parser("perturb", help="compare rank movement under score perturbations")
    p_perturb.add_argument("--scores", required=True)
    p_perturb.add_argument("--perturbations", required=True, help="CSV of model,dataset,score")
    p_perturb.add_argument("--sequence", required=True)
    _add_common(p_perturb)
    p_perturb.set_defaults(func=cmd_perturb)

    p_oracle = sub.add_parser("oracle", help="exact expected scores by exhaustive enumeration")
    p_oracle.add_argument("--scores", default=None)
    p_oracle.add_argument("--sequence", default=None)
    p_oracle.add_argument("--tensor", default=None, help="tensor JSON instead of scores+sequence")
    p_oracle.add_argument("--check", action="store_true", help="compare against Monte Carlo")
    p_oracle.add_argument("--max-models", type=int, default=5)
    p_oracle.add_argument("--max-rounds", type=int, default=3)
    _add_common(p_oracle)
    p_oracle.set_defaults(func=cmd_oracle)

    p_tiers = sub.add_parser("tiers", help="build difficulty tiers from per-question outcomes")
    p_tiers.add_argument("--outcomes", required=True, help="CSV of model,question_id,outcome")
    _add_common(p_tiers)
    p_tiers.set_defaults(func=cmd_tiers)

    p_order = sub.add_parser("order", help="weighted random round orders")
    p_order.add_argument("--suite", required=True, help="JSON array of dataset/weight objects")
    p_order.add_argument("--scores", default=None)
    p_order.add_argument("--orders-only", action="store_true", help="print sampled orders and exit")
    p_order.add_argument("--samples", type=int, default=1, help="orders to sample with --orders-only")
    _add_common(p_order)
    p_order.set_defaults(func=cmd_order)

    p_tensor = sub.add_parser("build-tensor", help="build and export the win-rate tensor")
    p_tensor.add_argument("--scores", required=True)
    p_tensor.add_argument("--sequence", required=True)
    _add_common(p_tensor)
    p_tensor.set_defaults(func=cmd_build_tensor)

    return parser


def main(argv: list[str] | None = None, environ: dict[str, str] | None = None) -> int:
    if environ is None:
        import os

        environ = dict(os.environ)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, environ)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SwissRankError as exc:
        print(f"error [{args.command}, {type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
