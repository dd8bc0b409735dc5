"""Command-line interface.

Subcommands: gen-data, train, pacing-preview, timecost, compare, report.
Failures print a machine-readable JSON error record to stderr and exit
nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .corpus import CorpusSpec, generate_corpus, load_corpus, load_manifest, save_corpus, save_manifest
from .metrics import PairedErrorSample, edit_distance, mapsswe
from .pacing import PacingParams, build_schedule
from .runner import StrategyRun, emit_report, load_config, load_report, run_experiment
from .scoring import parse_strategy
from .timecost import CostParams, overhead_table


def _corpus_spec_from_args(args) -> CorpusSpec:
    return CorpusSpec(
        n_utterances=args.n,
        vocab_size=args.vocab_size,
        feature_dim=args.feature_dim,
        token_length_range=(args.min_tokens, args.max_tokens),
        noise_sigma_range=(args.sigma_min, args.sigma_max),
        frame_seconds=args.frame_seconds,
        prototype_scale=args.prototype_scale,
    )


def _cmd_gen_data(args) -> int:
    spec = _corpus_spec_from_args(args)
    corpus = generate_corpus(spec, args.seed)
    save_corpus(corpus, args.out, spec=spec, seed=args.seed)
    if args.manifest:
        save_manifest(corpus, args.manifest)
    print(f"wrote {len(corpus)} utterances ({corpus.total_hours:.3f} h) to {args.out}")
    return 0


def _cmd_train(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    if args.epochs is not None:
        config = replace(config, train=replace(config.train, n_epochs=args.epochs))
    if args.strategy is not None:
        keep = tuple(r for r in config.strategies if r.resolved_label == args.strategy)
        if not keep:
            # not in the config: run it fresh ("paced:ABBR" enables pacing)
            token = args.strategy
            if token.lower().startswith("paced:"):
                keep = (StrategyRun(parse_strategy(token[len("paced:"):]),
                                    pacing=PacingParams()),)
            else:
                keep = (StrategyRun(parse_strategy(token)),)
        config = replace(config, strategies=keep)
    if args.out is not None:
        config = replace(config, out_dir=args.out)
    report = run_experiment(config)
    for res in report.strategies:
        print(f"{res.label}: valid WER {res.valid_wer_mean:.4f} "
              f"(+/- {res.valid_wer_std:.4f}), test WER {res.test_wer_mean:.4f}, "
              f"hours seen {res.hours_seen_expected:.2f}")
    if config.out_dir:
        print(f"report files in {config.out_dir}")
    return 0


def _cmd_pacing_preview(args) -> int:
    params = PacingParams(
        start_fraction=args.start_fraction,
        growth_factor=args.growth_factor,
        growth_step=args.growth_step,
        refresh_every=args.refresh_every,
        enabled=not args.disabled,
    )
    schedule = build_schedule(args.epochs, params)
    lines = ["epoch,fraction,refresh,expected_hours"]
    for entry in schedule.entries:
        lines.append(f"{entry.epoch},{entry.fraction!r},{entry.refresh},"
                     f"{entry.fraction * args.total_hours!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _load_any_corpus(corpus_path: str | None, manifest_path: str | None):
    if (corpus_path is None) == (manifest_path is None):
        raise ValueError("give exactly one of --corpus or --manifest")
    if corpus_path is not None:
        return load_corpus(corpus_path)
    return load_manifest(manifest_path)


def _cmd_timecost(args) -> int:
    corpus = _load_any_corpus(args.corpus, args.manifest)
    params = CostParams(
        batch_size=args.batch_size,
        decode_cost_ratio=args.decode_cost_ratio,
        teacher_inference_cost_ratio=args.teacher_cost_ratio,
    )
    paced_params = PacingParams()
    unpaced = build_schedule(args.epochs, PacingParams(enabled=False))
    paced = build_schedule(args.epochs, paced_params)
    runs = []
    for token in args.strategies:
        if token.lower().startswith("paced:"):
            strategy = parse_strategy(token[len("paced:"):])
            runs.append((f"(Paced) {strategy.kind.value}", strategy, paced))
        else:
            strategy = parse_strategy(token)
            runs.append((strategy.kind.value, strategy, unpaced))
    rows = overhead_table(runs, corpus, params, seed=args.seed)
    lines = ["strategy,overhead_pct"]
    for label, overhead in rows:
        lines.append(f"{label},{100.0 * overhead!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _read_hyp_file(path: str) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'id<TAB>tokens'")
        utt_id, text = line.split("\t", 1)
        if utt_id in out:
            raise ValueError(f"{path}:{lineno}: duplicate id {utt_id!r}")
        out[utt_id] = text.split()
    return out


def _cmd_compare(args) -> int:
    ref = _read_hyp_file(args.ref)
    hyp_a = _read_hyp_file(args.hyp_a)
    hyp_b = _read_hyp_file(args.hyp_b)
    for name, hyp in (("A", hyp_a), ("B", hyp_b)):
        if set(hyp) != set(ref):
            raise ValueError(f"hypothesis {name} does not cover the reference utterances")
    per_utterance = []
    errors_a = {}
    errors_b = {}
    for utt_id in sorted(ref):
        counts_a = edit_distance(ref[utt_id], hyp_a[utt_id])
        counts_b = edit_distance(ref[utt_id], hyp_b[utt_id])
        errors_a[utt_id] = counts_a.distance
        errors_b[utt_id] = counts_b.distance
        per_utterance.append(
            {
                "id": utt_id,
                "ref_len": counts_a.ref_len,
                "errors_a": counts_a.distance,
                "errors_b": counts_b.distance,
                "counts_a": {"substitutions": counts_a.substitutions,
                             "deletions": counts_a.deletions,
                             "insertions": counts_a.insertions},
                "counts_b": {"substitutions": counts_b.substitutions,
                             "deletions": counts_b.deletions,
                             "insertions": counts_b.insertions},
            }
        )
    result = mapsswe(PairedErrorSample.from_dicts(errors_a, errors_b))
    doc = {
        "n": result.n,
        "z": result.z,
        "p_two_sided": result.p_two_sided,
        "alpha": args.alpha,
        "significant": result.p_two_sided < args.alpha,
        "mean_diff": result.mean_diff,
        "sd_diff": result.sd_diff,
        "per_utterance": per_utterance,
    }
    text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_report(args) -> int:
    report = load_report(Path(args.run_dir) / "report.json")
    out = args.out or args.run_dir
    files = emit_report(report, out)
    print(f"re-emitted {len(files)} files to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curricula",
        description="Curriculum-learning scheduling engine and experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a synthetic corpus")
    p.add_argument("--out", required=True, help="corpus JSON output path")
    p.add_argument("--manifest", help="also export a CSV manifest here")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--vocab-size", type=int, default=12)
    p.add_argument("--feature-dim", type=int, default=16)
    p.add_argument("--min-tokens", type=int, default=4)
    p.add_argument("--max-tokens", type=int, default=12)
    p.add_argument("--sigma-min", type=float, default=0.0)
    p.add_argument("--sigma-max", type=float, default=0.5)
    p.add_argument("--frame-seconds", type=float, default=0.5)
    p.add_argument("--prototype-scale", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("train", help="run an experiment from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--strategy", help="run only the strategy with this label")
    p.add_argument("--epochs", type=int, help="override the epoch count")
    p.add_argument("--out", help="override the report output directory")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("pacing-preview", help="emit a pacing schedule as CSV")
    p.add_argument("--epochs", type=int, required=True)
    p.add_argument("--start-fraction", type=float, default=0.2)
    p.add_argument("--growth-factor", type=float, default=1.71)
    p.add_argument("--growth-step", type=float, default=5.0)
    p.add_argument("--refresh-every", type=int, default=1)
    p.add_argument("--total-hours", type=float, default=1.0)
    p.add_argument("--disabled", action="store_true", help="preview the unpaced schedule")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_pacing_preview)

    p = sub.add_parser("timecost", help="emit per-strategy wall-cost overheads as CSV")
    p.add_argument("--corpus", help="corpus JSON (from gen-data)")
    p.add_argument("--manifest", help="CSV manifest (durations only)")
    p.add_argument("--epochs", type=int, default=15)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--decode-cost-ratio", type=float, default=0.1)
    p.add_argument("--teacher-cost-ratio", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategies", nargs="+",
                   default=["Baseline", "RS", "WS-M", "T-WS-M", "T-S2S-M",
                            "paced:WS-M", "paced:T-WS-M"],
                   help="strategy abbreviations; prefix with 'paced:' for pacing")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_timecost)

    p = sub.add_parser("compare", help="MAPSSWE significance test between two systems")
    p.add_argument("--ref", required=True, help="reference file, id<TAB>tokens")
    p.add_argument("--hyp-a", required=True)
    p.add_argument("--hyp-b", required=True)
    p.add_argument("--alpha", type=float, default=0.001)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("report", help="re-emit report files from a saved run")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
