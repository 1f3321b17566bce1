"""Command-line interface.

Subcommands: synth, split-labels, evaluate, train-adapter, bench. Every
command takes --seed (default from LCPROTONETS_SEED, else 0) and writes
deterministic outputs for identical inputs and seed; the evaluate report
embeds a timestamp unless --no-timestamp is passed. Usage errors exit 2,
operational failures exit 1.
"""
from __future__ import annotations

import argparse
import os
import sys
from datetime import datetime, timezone

from .episodes import split_labels
from .errors import LCProtoError
from .evaluation import (
    METHODS,
    MODES,
    EvaluationConfig,
    evaluate,
    render_report,
    write_scores_csv,
)
from .manifest import (
    load_adapter,
    load_manifest,
    load_split,
    save_adapter,
    write_manifest,
    write_split,
    write_training_log,
)
from .prototypes import DEFAULT_TIE_EPSILON
from .baselines import DEFAULT_MLPN_THRESHOLD
from .episodes import EpisodeSpec
from .scaling import run_scaling, write_scaling_csv, write_scaling_gnuplot
from .synth import SynthConfig, generate
from .training import TrainConfig, train_adapter

SEED_ENV_VAR = "LCPROTONETS_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(
            f"error: {SEED_ENV_VAR}={raw!r} is not an integer"
        ) from None


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help=f"RNG seed (default: ${SEED_ENV_VAR} or 0)")


def _resolve_seed(args: argparse.Namespace) -> int:
    return args.seed if args.seed is not None else _default_seed()


def cmd_synth(args: argparse.Namespace) -> int:
    probs = tuple(float(p) for p in args.cardinality_probs.split(","))
    if len(probs) != 3:
        raise ValueError("--cardinality-probs needs exactly 3 comma-separated values")
    config = SynthConfig(
        n_labels=args.labels, dimension=args.dimension,
        items_per_label=args.items_per_label, cardinality_probs=probs,
        noise_sigma=args.noise, co_occurrence_bias=args.co_occurrence_bias,
        seed=_resolve_seed(args),
    )
    result = generate(config)
    write_manifest(args.output, result.items, result.vocabulary)
    print(f"wrote {len(result.items)} items over {args.labels} labels "
          f"to {args.output}")
    return 0


def cmd_split_labels(args: argparse.Namespace) -> int:
    data = load_manifest(args.manifest)
    split = split_labels(data.vocabulary, args.base, args.holdout,
                         _resolve_seed(args))
    write_split(args.output, split)
    print(f"wrote split ({len(split.base)} base / "
          f"{len(split.validation_holdout)} holdout / {len(split.novel)} novel) "
          f"to {args.output}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    data = load_manifest(args.manifest)
    split = load_split(args.split)
    adapter = load_adapter(args.adapter) if args.adapter else None
    config = EvaluationConfig(
        method=args.method, mode=args.mode, n_way=args.n_way,
        k_shot=args.k_shot, n_query=args.n_query, n_episodes=args.episodes,
        runs=args.runs, seed=_resolve_seed(args),
        mlpn_threshold=args.mlpn_threshold, tie_epsilon=args.tie_epsilon,
    )
    report = evaluate(data.items, split, data.vocabulary, config, adapter)
    stamp = None if args.no_timestamp else (
        datetime.now(timezone.utc).isoformat(timespec="seconds"))
    text = render_report(report, timestamp=stamp)
    sys.stdout.write(text)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.csv:
        write_scores_csv(args.csv, report)
    if args.figure:
        from .plots import plot_evaluation

        plot_evaluation(report, args.figure)
    return 0


def cmd_train_adapter(args: argparse.Namespace) -> int:
    data = load_manifest(args.manifest)
    split = load_split(args.split)
    config = TrainConfig(
        spec=EpisodeSpec(n_way=args.n_way, k_shot=args.k_shot,
                         n_query=args.n_query),
        episodes_per_epoch=args.episodes_per_epoch,
        learning_rate=args.learning_rate, patience=args.patience,
        max_epochs=args.max_epochs,
        validation_episodes=args.validation_episodes,
        seed=_resolve_seed(args),
    )
    progress = None
    if args.verbose:
        progress = lambda e, l, v: print(  # noqa: E731
            f"epoch {e}: loss {l:.6f}  val macro-F1 {v:.4f}")
    result = train_adapter(data.items, split, data.vocabulary, config,
                           progress=progress)
    save_adapter(args.adapter_out, result.adapter)
    if args.log_out:
        write_training_log(args.log_out, result.log)
    if args.figure and result.log:
        from .plots import plot_training

        plot_training(result.log, args.figure)
    print(f"trained {len(result.log)} epochs; best validation macro-F1 "
          f"{result.best_val_macro_f1:.4f} at epoch {result.best_epoch} "
          f"(initial {result.initial_val_macro_f1:.4f}); adapter saved "
          f"to {args.adapter_out}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    data = load_manifest(args.manifest)
    n_values = [int(n) for n in args.n_values.split(",")]
    rows = run_scaling(
        data.items, data.vocabulary, n_values, k_shot=args.k_shot,
        repetitions=args.repetitions, dedup=args.dedup,
        query_count=args.queries, seed=_resolve_seed(args),
        vectorized=args.vectorized,
    )
    write_scaling_csv(args.csv, rows)
    if args.gnuplot:
        write_scaling_gnuplot(args.gnuplot, rows)
    if args.figure:
        from .plots import plot_scaling

        plot_scaling(rows, args.figure)
    for row in rows:
        print(f"N={row.n_way}: {row.lcp_count:.1f} LC-prototypes "
              f"({row.lcp_count_dedup:.1f} deduplicated), "
              f"{row.ms_per_item:.3f} ms/item")
    print(f"wrote {args.csv}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcprotonets",
        description="Multi-label few-shot classification over label-combination prototypes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic embedding manifest")
    p.add_argument("--labels", type=int, required=True)
    p.add_argument("--dimension", type=int, required=True)
    p.add_argument("--items-per-label", type=int, required=True)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--cardinality-probs", default="0.5,0.3,0.2",
                   help="P(|labels|=1),P(2),P(3), comma-separated")
    p.add_argument("--co-occurrence-bias", type=float, default=0.0)
    p.add_argument("--output", required=True)
    _add_seed(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("split-labels", help="partition the vocabulary into "
                                            "base/holdout/novel sections")
    p.add_argument("--manifest", required=True)
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--holdout", type=int, required=True)
    p.add_argument("--output", required=True)
    _add_seed(p)
    p.set_defaults(func=cmd_split_labels)

    p = sub.add_parser("evaluate", help="run the episodic evaluation protocol")
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--method", choices=METHODS, default="lc-protonets")
    p.add_argument("--mode", choices=MODES, default="novel")
    p.add_argument("--n-way", type=int, default=10)
    p.add_argument("--k-shot", type=int, default=3)
    p.add_argument("--n-query", type=int, default=3)
    p.add_argument("--episodes", type=int, default=50)
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--adapter", default=None,
                   help="apply a trained adapter before classification")
    p.add_argument("--mlpn-threshold", type=float, default=DEFAULT_MLPN_THRESHOLD)
    p.add_argument("--tie-epsilon", type=float, default=DEFAULT_TIE_EPSILON)
    p.add_argument("--report", default=None, help="also write the report here")
    p.add_argument("--csv", default=None, help="write per-run scores as CSV")
    p.add_argument("--figure", default=None, help="render a score figure (png/pdf)")
    p.add_argument("--no-timestamp", action="store_true",
                   help="omit the timestamp for byte-identical reports")
    _add_seed(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("train-adapter", help="episodically train the linear "
                                             "embedding adapter")
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--n-way", type=int, default=10)
    p.add_argument("--k-shot", type=int, default=3)
    p.add_argument("--n-query", type=int, default=3)
    p.add_argument("--episodes-per-epoch", type=int, default=50)
    p.add_argument("--learning-rate", type=float, default=1e-3)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--max-epochs", type=int, default=200)
    p.add_argument("--validation-episodes", type=int, default=20)
    p.add_argument("--adapter-out", required=True)
    p.add_argument("--log-out", default=None, help="write the epoch log as CSV")
    p.add_argument("--figure", default=None, help="render the training curves")
    p.add_argument("--verbose", action="store_true")
    _add_seed(p)
    p.set_defaults(func=cmd_train_adapter)

    p = sub.add_parser("bench", help="prototype-count and latency scaling in N")
    p.add_argument("--manifest", required=True)
    p.add_argument("--n-values", required=True, help="comma-separated N values")
    p.add_argument("--k-shot", type=int, default=3)
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--dedup", action="store_true",
                   help="time the deduplicated store (verifies equivalence)")
    p.add_argument("--vectorized", action="store_true",
                   help="time one batched matrix product instead of a serial loop")
    p.add_argument("--csv", required=True)
    p.add_argument("--gnuplot", default=None)
    p.add_argument("--figure", default=None)
    _add_seed(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LCProtoError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
