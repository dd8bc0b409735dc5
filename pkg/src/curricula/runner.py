"""Experiment orchestration: multi-seed runs, the full training loop wiring
scoring + pacing + learner together, and report emission.

One experiment trains every configured strategy for n_seeds seeds on a shared
synthetic corpus with a shared valid/test split, then aggregates means and
standard deviations, hours-seen and padding-overhead accounting, and pairwise
MAPSSWE significance verdicts. Every random stream derives from
(master_seed, strategy label, seed index, purpose tag), so a config replays
byte-identically.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Corpus, CorpusSpec, generate_corpus, load_manifest
from .learner import (
    ToyModel,
    TrainConfig,
    evaluate,
    train_epoch,
    train_teacher,
    word_errors,
)
from .metrics import PairedErrorSample, mapsswe
from .pacing import (
    DISABLED_PACING,
    PacingParams,
    ScoringContext,
    build_schedule,
    hours_seen,
    sample_subset,
)
from .scoring import (
    Strategy,
    StrategyKind,
    epoch_order,
    parse_strategy,
    transfer_scores,
    write_score_cache,
)
from .seeding import derive_rng, derive_seed
from .timecost import CostParams, OverheadReport, wall_cost


@dataclass(frozen=True)
class StrategyRun:
    """One strategy to train, with its own pacing settings."""

    strategy: Strategy
    pacing: PacingParams = DISABLED_PACING
    label: str | None = None

    @property
    def resolved_label(self) -> str:
        if self.label is not None:
            return self.label
        prefix = "(Paced) " if self.pacing.enabled else ""
        return prefix + self.strategy.kind.value


@dataclass(frozen=True)
class ExperimentConfig:
    corpus_spec: CorpusSpec | None = None
    manifest_path: str | None = None
    strategies: tuple[StrategyRun, ...] = ()
    train: TrainConfig = TrainConfig(learning_rate=0.5, n_epochs=10)
    n_seeds: int = 3
    master_seed: int = 0
    valid_fraction: float = 0.1
    test_fraction: float = 0.1
    init_scale: float = 0.01
    alpha: float = 0.001
    cost: CostParams = CostParams()
    out_dir: str | None = None

    def __post_init__(self) -> None:
        if (self.corpus_spec is None) == (self.manifest_path is None):
            raise ValueError("configure exactly one of corpus_spec or manifest_path")
        if self.n_seeds < 1:
            raise ValueError("n_seeds must be >= 1")
        if self.valid_fraction <= 0 or self.test_fraction <= 0:
            raise ValueError("the harness needs nonempty valid and test splits")
        if self.valid_fraction + self.test_fraction >= 1.0:
            raise ValueError("valid_fraction + test_fraction must stay below 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")

    def to_dict(self) -> dict:
        return {
            "corpus_spec": None if self.corpus_spec is None else {
                "n_utterances": self.corpus_spec.n_utterances,
                "vocab_size": self.corpus_spec.vocab_size,
                "feature_dim": self.corpus_spec.feature_dim,
                "token_length_range": list(self.corpus_spec.token_length_range),
                "noise_sigma_range": list(self.corpus_spec.noise_sigma_range),
                "frame_seconds": self.corpus_spec.frame_seconds,
                "prototype_scale": self.corpus_spec.prototype_scale,
            },
            "manifest_path": self.manifest_path,
            "strategies": [
                {
                    "kind": run.strategy.kind.value,
                    "mixing_fraction": run.strategy.mixing_fraction,
                    "reshuffle_each_epoch": run.strategy.reshuffle_each_epoch,
                    "pacing": {
                        "start_fraction": run.pacing.start_fraction,
                        "growth_factor": run.pacing.growth_factor,
                        "growth_step": run.pacing.growth_step,
                        "refresh_every": run.pacing.refresh_every,
                        "enabled": run.pacing.enabled,
                    },
                    "label": run.resolved_label,
                }
                for run in self.strategies
            ],
            "train": {
                "learning_rate": self.train.learning_rate,
                "n_epochs": self.train.n_epochs,
                "micro_batch": self.train.micro_batch,
                "accumulation_steps": self.train.accumulation_steps,
                "seed": self.train.seed,
            },
            "n_seeds": self.n_seeds,
            "master_seed": self.master_seed,
            "valid_fraction": self.valid_fraction,
            "test_fraction": self.test_fraction,
            "init_scale": self.init_scale,
            "alpha": self.alpha,
            "cost": {
                "batch_size": self.cost.batch_size,
                "per_second_train_cost": self.cost.per_second_train_cost,
                "decode_cost_ratio": self.cost.decode_cost_ratio,
                "teacher_inference_cost_ratio": self.cost.teacher_inference_cost_ratio,
            },
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    valid_loss: float
    valid_wer: float
    valid_cer: float
    subset_size: int
    subset_hours: float
    plan_digest: str


@dataclass(frozen=True)
class SeedResult:
    seed_index: int
    completed: bool
    error: str | None = None
    untrained_valid_wer: float = math.nan
    untrained_valid_cer: float = math.nan
    epochs: tuple[EpochStats, ...] = ()
    test_wer: float = math.nan
    test_cer: float = math.nan
    test_errors: dict[str, int] | None = None
    plans_valid: bool = False


@dataclass(frozen=True)
class StrategyResult:
    label: str
    kind: str
    paced: bool
    seeds: tuple[SeedResult, ...]
    valid_wer_mean: float
    valid_wer_std: float
    valid_cer_mean: float
    valid_cer_std: float
    test_wer_mean: float
    test_wer_std: float
    test_cer_mean: float
    test_cer_std: float
    hours_seen_expected: float
    hours_seen_actual_mean: float
    overhead: OverheadReport


@dataclass(frozen=True)
class SignificanceRow:
    strategy_a: str
    strategy_b: str
    seed_index: int
    z: float
    p: float
    significant: bool


@dataclass(frozen=True)
class RunReport:
    config_hash: str
    master_seed: int
    n_seeds: int
    alpha: float
    total_train_hours: float
    test_ids: tuple[str, ...]
    strategies: tuple[StrategyResult, ...]
    significance: tuple[SignificanceRow, ...]

    def strategy(self, label: str) -> StrategyResult:
        for result in self.strategies:
            if result.label == label:
                return result
        raise KeyError(f"no strategy {label!r} in this report")


def _plan_digest(ordered_ids: Sequence[str]) -> str:
    return hashlib.sha256("\n".join(ordered_ids).encode("utf-8")).hexdigest()


def _mean_std(values: list[float]) -> tuple[float, float]:
    if not values:
        return math.nan, math.nan
    arr = np.asarray(values, dtype=np.float64)
    # Population std: a single seed reports exactly 0 spread.
    return float(arr.mean()), float(arr.std())


def _collect_mode(kind: StrategyKind) -> str:
    # Only the adaptive WER strategies pay for a decode pass while training;
    # everyone else gets losses for free from the forward pass.
    if kind in (StrategyKind.WER_SCORE, StrategyKind.WER_SCORE_MIXED):
        return "loss+metric"
    return "loss-only"


def _slug(label: str) -> str:
    return "".join(c if c.isalnum() else "-" for c in label.lower()).strip("-")


def split_corpus(corpus: Corpus, valid_fraction: float, test_fraction: float,
                 seed: int) -> tuple[Corpus, Corpus, Corpus]:
    """Seeded (train, valid, test) partition of a corpus."""
    n = len(corpus)
    n_valid = int(n * valid_fraction)
    n_test = int(n * test_fraction)
    if n - n_valid - n_test < 1 or (valid_fraction > 0 and n_valid < 1) or (
        test_fraction > 0 and n_test < 1
    ):
        raise ValueError(f"corpus of {n} utterances is too small for the requested split")
    order = derive_rng(seed, "split").permutation(n)
    ids = [corpus.records[i].id for i in order]
    test_ids = set(ids[:n_test])
    valid_ids = set(ids[n_test:n_test + n_valid])
    train_ids = set(ids[n_test + n_valid:])
    return corpus.subset(train_ids), corpus.subset(valid_ids), corpus.subset(test_ids)


def _run_seed(
    run: StrategyRun,
    seed_index: int,
    train_corpus: Corpus,
    valid_corpus: Corpus,
    test_corpus: Corpus,
    config: ExperimentConfig,
    teacher_table,
    scores_path: Path | None,
) -> SeedResult:
    strategy = run.strategy
    label = run.resolved_label
    master = config.master_seed
    model = ToyModel.random(
        train_corpus.vocab_size,
        train_corpus.feature_dim or 0,
        seed=derive_seed(master, "init", seed_index),
        scale=config.init_scale,
    )
    untrained = evaluate(model, valid_corpus)
    schedule = build_schedule(config.train.n_epochs, run.pacing)
    order_seed = derive_seed(master, "order", label, seed_index)
    collect = _collect_mode(strategy.kind)
    prev_scores = teacher_table
    subset_ids: list[str] | None = None
    subset_records = None
    stats: list[EpochStats] = []
    plans_valid = True

    for entry in schedule.entries:
        if entry.refresh or subset_ids is None:
            subset_ids, plan = sample_subset(
                train_corpus,
                entry.fraction,
                seed=derive_seed(master, "sample", label, seed_index, entry.epoch),
                scoring_context=ScoringContext(
                    strategy=strategy,
                    epoch=entry.epoch,
                    prev_scores=prev_scores,
                    order_seed=order_seed,
                ),
            )
            subset_records = [train_corpus.by_id[i] for i in subset_ids]
        else:
            plan = epoch_order(strategy, subset_records, prev_scores, entry.epoch, order_seed)
        if sorted(plan.ordered_ids) != sorted(subset_ids):
            plans_valid = False
            raise RuntimeError(
                f"epoch {entry.epoch} plan is not a permutation of the active subset"
            )
        model, table, feedback = train_epoch(model, plan, train_corpus,
                                             config.train, collect)
        if strategy.is_adaptive:
            prev_scores = table
        if scores_path is not None:
            write_score_cache(scores_path, table, label, append=entry.epoch > 1)
        valid_eval = evaluate(model, valid_corpus)
        stats.append(
            EpochStats(
                epoch=entry.epoch,
                train_loss=float(np.mean([fb.loss for fb in feedback])),
                valid_loss=valid_eval.mean_loss,
                valid_wer=valid_eval.wer,
                valid_cer=valid_eval.cer,
                subset_size=len(plan),
                subset_hours=sum(train_corpus.by_id[i].duration_s for i in subset_ids) / 3600.0,
                plan_digest=_plan_digest(plan.ordered_ids),
            )
        )

    test_eval = evaluate(model, test_corpus)
    return SeedResult(
        seed_index=seed_index,
        completed=True,
        untrained_valid_wer=untrained.wer,
        untrained_valid_cer=untrained.cer,
        epochs=tuple(stats),
        test_wer=test_eval.wer,
        test_cer=test_eval.cer,
        test_errors=word_errors(model, test_corpus),
        plans_valid=plans_valid,
    )


def run_experiment(config: ExperimentConfig) -> RunReport:
    """Run every configured strategy for n_seeds seeds and aggregate.

    A module error inside one (strategy, seed) run aborts that seed with a
    recorded diagnostic; the report marks it incomplete and aggregates over
    the seeds that finished. If config.out_dir is set the report files are
    emitted there.
    """
    if config.corpus_spec is not None:
        corpus = generate_corpus(config.corpus_spec, derive_seed(config.master_seed, "corpus"))
    else:
        corpus = load_manifest(config.manifest_path)
    if not corpus.has_frames:
        raise ValueError(
            "training needs feature frames; manifest corpora are metadata-only "
            "(use a generated corpus for experiments)"
        )
    train_corpus, valid_corpus, test_corpus = split_corpus(
        corpus, config.valid_fraction, config.test_fraction, config.master_seed
    )
    total_train_hours = train_corpus.total_hours

    teacher_tables: dict[str, object] = {}
    if any(run.strategy.is_transfer for run in config.strategies):
        teacher = train_teacher(
            train_corpus,
            replace(config.train, seed=derive_seed(config.master_seed, "teacher")),
        )
        for kind_name in ("wer", "loss"):
            teacher_tables[kind_name] = transfer_scores(teacher, train_corpus, kind_name)

    out_dir = Path(config.out_dir) if config.out_dir else None
    scores_dir = None
    if out_dir is not None:
        scores_dir = out_dir / "scores"
        scores_dir.mkdir(parents=True, exist_ok=True)

    results = []
    for run in config.strategies:
        label = run.resolved_label
        teacher_table = None
        if run.strategy.is_transfer:
            kind_name = "wer" if run.strategy.kind is StrategyKind.TRANSFER_WER_MIXED else "loss"
            teacher_table = teacher_tables[kind_name]
        seeds = []
        for seed_index in range(config.n_seeds):
            scores_path = None
            if scores_dir is not None:
                scores_path = scores_dir / f"{_slug(label)}_seed{seed_index}.csv"
            try:
                seeds.append(
                    _run_seed(run, seed_index, train_corpus, valid_corpus,
                              test_corpus, config, teacher_table, scores_path)
                )
            except Exception as exc:  # noqa: BLE001 - seed isolation by contract
                seeds.append(
                    SeedResult(
                        seed_index=seed_index,
                        completed=False,
                        error=f"{type(exc).__name__}: {exc}",
                    )
                )
        done = [s for s in seeds if s.completed]
        valid_wer_mean, valid_wer_std = _mean_std([s.epochs[-1].valid_wer for s in done])
        valid_cer_mean, valid_cer_std = _mean_std([s.epochs[-1].valid_cer for s in done])
        test_wer_mean, test_wer_std = _mean_std([s.test_wer for s in done])
        test_cer_mean, test_cer_std = _mean_std([s.test_cer for s in done])
        schedule = build_schedule(config.train.n_epochs, run.pacing)
        hours_actual, _ = _mean_std([sum(e.subset_hours for e in s.epochs) for s in done])
        results.append(
            StrategyResult(
                label=label,
                kind=run.strategy.kind.value,
                paced=run.pacing.enabled,
                seeds=tuple(seeds),
                valid_wer_mean=valid_wer_mean,
                valid_wer_std=valid_wer_std,
                valid_cer_mean=valid_cer_mean,
                valid_cer_std=valid_cer_std,
                test_wer_mean=test_wer_mean,
                test_wer_std=test_wer_std,
                test_cer_mean=test_cer_mean,
                test_cer_std=test_cer_std,
                hours_seen_expected=hours_seen(schedule, total_train_hours),
                hours_seen_actual_mean=hours_actual,
                overhead=wall_cost(run.strategy, schedule, train_corpus, config.cost,
                                   seed=derive_seed(config.master_seed, "cost")),
            )
        )

    significance = []
    for i, res_a in enumerate(results):
        for res_b in results[i + 1:]:
            for k in range(config.n_seeds):
                sa, sb = res_a.seeds[k], res_b.seeds[k]
                if not (sa.completed and sb.completed):
                    continue
                verdict = mapsswe(PairedErrorSample.from_dicts(sa.test_errors, sb.test_errors))
                significance.append(
                    SignificanceRow(
                        strategy_a=res_a.label,
                        strategy_b=res_b.label,
                        seed_index=k,
                        z=verdict.z,
                        p=verdict.p_two_sided,
                        significant=verdict.p_two_sided < config.alpha,
                    )
                )

    report = RunReport(
        config_hash=config.config_hash(),
        master_seed=config.master_seed,
        n_seeds=config.n_seeds,
        alpha=config.alpha,
        total_train_hours=total_train_hours,
        test_ids=tuple(r.id for r in test_corpus.records),
        strategies=tuple(results),
        significance=tuple(significance),
    )
    if out_dir is not None:
        emit_report(report, out_dir)
    return report


@dataclass(frozen=True)
class StrategyComparison:
    strategy_a: str
    strategy_b: str
    alpha: float
    rows: tuple[SignificanceRow, ...]

    @property
    def significant(self) -> bool:
        """True when every matched seed pair differs significantly."""
        return bool(self.rows) and all(r.significant for r in self.rows)


def compare_strategies(
    report_a: RunReport,
    report_b: RunReport,
    label_a: str | None = None,
    label_b: str | None = None,
    alpha: float | None = None,
) -> StrategyComparison:
    """MAPSSWE verdicts between two strategies' per-seed test outputs.

    Seeds are paired by index (seed k of A against seed k of B), which makes
    a report compared against itself come out at p = 1 for every pair. Both
    reports must share the same test set.
    """
    if set(report_a.test_ids) != set(report_b.test_ids):
        raise ValueError("reports do not share a test set")
    if alpha is None:
        alpha = report_a.alpha
    res_a = report_a.strategy(label_a) if label_a else report_a.strategies[0]
    res_b = report_b.strategy(label_b) if label_b else report_b.strategies[0]
    rows = []
    for sa, sb in zip(res_a.seeds, res_b.seeds):
        if not (sa.completed and sb.completed):
            continue
        verdict = mapsswe(PairedErrorSample.from_dicts(sa.test_errors, sb.test_errors))
        rows.append(
            SignificanceRow(
                strategy_a=res_a.label,
                strategy_b=res_b.label,
                seed_index=sa.seed_index,
                z=verdict.z,
                p=verdict.p_two_sided,
                significant=verdict.p_two_sided < alpha,
            )
        )
    return StrategyComparison(strategy_a=res_a.label, strategy_b=res_b.label,
                              alpha=alpha, rows=tuple(rows))


REPORT_FORMAT = "curricula-report"
REPORT_VERSION = 1


def report_to_dict(report: RunReport) -> dict:
    return {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "config_hash": report.config_hash,
        "master_seed": report.master_seed,
        "n_seeds": report.n_seeds,
        "alpha": report.alpha,
        "total_train_hours": report.total_train_hours,
        "test_ids": list(report.test_ids),
        "strategies": [
            {
                "label": res.label,
                "kind": res.kind,
                "paced": res.paced,
                "valid_wer_mean": res.valid_wer_mean,
                "valid_wer_std": res.valid_wer_std,
                "valid_cer_mean": res.valid_cer_mean,
                "valid_cer_std": res.valid_cer_std,
                "test_wer_mean": res.test_wer_mean,
                "test_wer_std": res.test_wer_std,
                "test_cer_mean": res.test_cer_mean,
                "test_cer_std": res.test_cer_std,
                "hours_seen_expected": res.hours_seen_expected,
                "hours_seen_actual_mean": res.hours_seen_actual_mean,
                "overhead": {
                    "padded_seconds": res.overhead.padded_seconds,
                    "actual_seconds": res.overhead.actual_seconds,
                    "padding_overhead": res.overhead.padding_overhead,
                    "wall_cost": res.overhead.wall_cost,
                    "overhead_vs_baseline": res.overhead.overhead_vs_baseline,
                },
                "seeds": [
                    {
                        "seed_index": s.seed_index,
                        "completed": s.completed,
                        "error": s.error,
                        "untrained_valid_wer": s.untrained_valid_wer,
                        "untrained_valid_cer": s.untrained_valid_cer,
                        "test_wer": s.test_wer,
                        "test_cer": s.test_cer,
                        "test_errors": s.test_errors,
                        "plans_valid": s.plans_valid,
                        "epochs": [
                            {
                                "epoch": e.epoch,
                                "train_loss": e.train_loss,
                                "valid_loss": e.valid_loss,
                                "valid_wer": e.valid_wer,
                                "valid_cer": e.valid_cer,
                                "subset_size": e.subset_size,
                                "subset_hours": e.subset_hours,
                                "plan_digest": e.plan_digest,
                            }
                            for e in s.epochs
                        ],
                    }
                    for s in res.seeds
                ],
            }
            for res in report.strategies
        ],
        "significance": [
            {
                "strategy_a": row.strategy_a,
                "strategy_b": row.strategy_b,
                "seed_index": row.seed_index,
                "z": row.z,
                "p": row.p,
                "significant": row.significant,
            }
            for row in report.significance
        ],
    }


def report_from_dict(doc: dict) -> RunReport:
    if doc.get("format") != REPORT_FORMAT:
        raise ValueError(f"not a {REPORT_FORMAT} document")
    if doc.get("version") != REPORT_VERSION:
        raise ValueError(f"unsupported report version {doc.get('version')}")
    strategies = []
    for res in doc["strategies"]:
        seeds = tuple(
            SeedResult(
                seed_index=s["seed_index"],
                completed=s["completed"],
                error=s["error"],
                untrained_valid_wer=s["untrained_valid_wer"],
                untrained_valid_cer=s["untrained_valid_cer"],
                epochs=tuple(
                    EpochStats(
                        epoch=e["epoch"],
                        train_loss=e["train_loss"],
                        valid_loss=e["valid_loss"],
                        valid_wer=e["valid_wer"],
                        valid_cer=e["valid_cer"],
                        subset_size=e["subset_size"],
                        subset_hours=e["subset_hours"],
                        plan_digest=e["plan_digest"],
                    )
                    for e in s["epochs"]
                ),
                test_wer=s["test_wer"],
                test_cer=s["test_cer"],
                test_errors=s["test_errors"],
                plans_valid=s["plans_valid"],
            )
            for s in res["seeds"]
        )
        ov = res["overhead"]
        strategies.append(
            StrategyResult(
                label=res["label"],
                kind=res["kind"],
                paced=res["paced"],
                seeds=seeds,
                valid_wer_mean=res["valid_wer_mean"],
                valid_wer_std=res["valid_wer_std"],
                valid_cer_mean=res["valid_cer_mean"],
                valid_cer_std=res["valid_cer_std"],
                test_wer_mean=res["test_wer_mean"],
                test_wer_std=res["test_wer_std"],
                test_cer_mean=res["test_cer_mean"],
                test_cer_std=res["test_cer_std"],
                hours_seen_expected=res["hours_seen_expected"],
                hours_seen_actual_mean=res["hours_seen_actual_mean"],
                overhead=OverheadReport(
                    padded_seconds=ov["padded_seconds"],
                    actual_seconds=ov["actual_seconds"],
                    padding_overhead=ov["padding_overhead"],
                    wall_cost=ov["wall_cost"],
                    overhead_vs_baseline=ov["overhead_vs_baseline"],
                ),
            )
        )
    significance = tuple(
        SignificanceRow(
            strategy_a=row["strategy_a"],
            strategy_b=row["strategy_b"],
            seed_index=row["seed_index"],
            z=row["z"],
            p=row["p"],
            significant=row["significant"],
        )
        for row in doc["significance"]
    )
    return RunReport(
        config_hash=doc["config_hash"],
        master_seed=doc["master_seed"],
        n_seeds=doc["n_seeds"],
        alpha=doc["alpha"],
        total_train_hours=doc["total_train_hours"],
        test_ids=tuple(doc["test_ids"]),
        strategies=tuple(strategies),
        significance=significance,
    )


def load_report(path: str | Path) -> RunReport:
    return report_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def emit_report(report: RunReport, out_dir: str | Path) -> list[Path]:
    """Write the report files; emission is deterministic byte-for-byte.

    results.csv     strategy x split x {CER, WER} means and stddevs
    curves.csv      per-epoch train/valid loss and valid WER, per seed
    overhead.csv    wall-cost overhead vs the duration baseline, percent
    hours_seen.csv  expected and realized cumulative hours presented
    significance.csv pairwise MAPSSWE verdicts per seed
    report.json     the full report (machine-readable, re-emittable)
    run_manifest.json seeds, config hash and the emitted file list
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "results.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["strategy", "split", "cer_mean", "cer_std", "wer_mean", "wer_std"])
        for res in report.strategies:
            writer.writerow([res.label, "valid", repr(res.valid_cer_mean),
                             repr(res.valid_cer_std), repr(res.valid_wer_mean),
                             repr(res.valid_wer_std)])
            writer.writerow([res.label, "test", repr(res.test_cer_mean),
                             repr(res.test_cer_std), repr(res.test_wer_mean),
                             repr(res.test_wer_std)])
    written.append(path)

    path = out / "curves.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["strategy", "seed", "epoch", "train_loss", "valid_loss", "valid_wer"])
        for res in report.strategies:
            for seed in res.seeds:
                for e in seed.epochs:
                    writer.writerow([res.label, seed.seed_index, e.epoch,
                                     repr(e.train_loss), repr(e.valid_loss),
                                     repr(e.valid_wer)])
    written.append(path)

    path = out / "overhead.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["strategy", "overhead_pct"])
        for res in report.strategies:
            ov = res.overhead.overhead_vs_baseline
            writer.writerow([res.label, "" if ov is None else repr(100.0 * ov)])
    written.append(path)

    path = out / "hours_seen.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["strategy", "hours_seen_expected", "hours_seen_actual"])
        for res in report.strategies:
            writer.writerow([res.label, repr(res.hours_seen_expected),
                             repr(res.hours_seen_actual_mean)])
    written.append(path)

    path = out / "significance.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["strategy_a", "strategy_b", "seed", "z", "p", "significant"])
        for row in report.significance:
            writer.writerow([row.strategy_a, row.strategy_b, row.seed_index,
                             repr(row.z), repr(row.p), row.significant])
    written.append(path)

    path = out / "report.json"
    path.write_text(json.dumps(report_to_dict(report), sort_keys=True, indent=1),
                    encoding="utf-8")
    written.append(path)

    manifest = {
        "format": "curricula-run-manifest",
        "version": 1,
        "config_hash": report.config_hash,
        "master_seed": report.master_seed,
        "n_seeds": report.n_seeds,
        "alpha": report.alpha,
        "strategies": [res.label for res in report.strategies],
        "seeds": list(range(report.n_seeds)),
        "incomplete": [
            {"strategy": res.label, "seed": s.seed_index, "error": s.error}
            for res in report.strategies
            for s in res.seeds
            if not s.completed
        ],
        "files": sorted(p.name for p in written) + ["run_manifest.json"],
    }
    path = out / "run_manifest.json"
    path.write_text(json.dumps(manifest, sort_keys=True, indent=1), encoding="utf-8")
    written.append(path)
    return written


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse an experiment config file (JSON; keys documented in the README)."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return config_from_dict(doc)


def config_from_dict(doc: dict) -> ExperimentConfig:
    corpus_spec = None
    if "corpus" in doc:
        c = doc["corpus"]
        corpus_spec = CorpusSpec(
            n_utterances=c["n_utterances"],
            vocab_size=c["vocab_size"],
            feature_dim=c["feature_dim"],
            token_length_range=tuple(c.get("token_length_range", (4, 12))),
            noise_sigma_range=tuple(c.get("noise_sigma_range", (0.0, 0.5))),
            frame_seconds=c.get("frame_seconds", 0.5),
            prototype_scale=c.get("prototype_scale", 3.0),
        )
    train_doc = doc.get("train", {})
    train = TrainConfig(
        learning_rate=train_doc.get("learning_rate", 0.5),
        n_epochs=train_doc.get("n_epochs", 10),
        micro_batch=train_doc.get("micro_batch", 8),
        accumulation_steps=train_doc.get("accumulation_steps", 4),
        seed=train_doc.get("seed", 0),
    )
    pacing_doc = doc.get("pacing", {})
    paced_defaults = PacingParams(
        start_fraction=pacing_doc.get("start_fraction", 0.2),
        growth_factor=pacing_doc.get("growth_factor", 1.71),
        growth_step=pacing_doc.get("growth_step", 5.0),
        refresh_every=pacing_doc.get("refresh_every", 1),
        enabled=True,
    )
    runs = []
    for s in doc.get("strategies", []):
        strategy = parse_strategy(
            s["kind"],
            mixing_fraction=s.get("mixing_fraction", 0.2),
            reshuffle_each_epoch=s.get("reshuffle_each_epoch", False),
        )
        pacing = paced_defaults if s.get("paced", False) else DISABLED_PACING
        runs.append(StrategyRun(strategy=strategy, pacing=pacing, label=s.get("label")))
    cost_doc = doc.get("cost", {})
    cost = CostParams(
        batch_size=cost_doc.get("batch_size", train.effective_batch),
        per_second_train_cost=cost_doc.get("per_second_train_cost", 1.0),
        decode_cost_ratio=cost_doc.get("decode_cost_ratio", 0.1),
        teacher_inference_cost_ratio=cost_doc.get("teacher_inference_cost_ratio", 0.05),
    )
    return ExperimentConfig(
        corpus_spec=corpus_spec,
        manifest_path=doc.get("manifest"),
        strategies=tuple(runs),
        train=train,
        n_seeds=doc.get("n_seeds", 3),
        master_seed=doc.get("master_seed", 0),
        valid_fraction=doc.get("valid_fraction", 0.1),
        test_fraction=doc.get("test_fraction", 0.1),
        init_scale=doc.get("init_scale", 0.01),
        alpha=doc.get("alpha", 0.001),
        cost=cost,
        out_dir=doc.get("out_dir"),
    )
