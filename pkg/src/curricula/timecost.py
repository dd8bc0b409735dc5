"""Padding and wall-time cost model.

Batches pad every member to the longest duration in the batch, so the order
utterances are presented in directly controls how many padded seconds a GPU
would chew through. Duration-sorted orders minimize padding; shuffled or
score-sorted orders pay for it. Costs are abstract units calibrated for
ratios only — the interesting output is each strategy's overhead relative
to the duration-sorted baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .corpus import Corpus
from .pacing import PacingSchedule, build_schedule, DISABLED_PACING
from .scoring import EpochPlan, Strategy, StrategyKind, METRIC_KINDS, uniform_mix
from .seeding import derive_rng, derive_seed


@dataclass(frozen=True)
class CostParams:
    """Cost knobs. Ratios are relative to a unit per-second train cost:
    decode_cost_ratio is the extra cost per actual second of a metric decode
    pass, teacher_inference_cost_ratio the one-time transfer scoring pass."""

    batch_size: int = 32
    per_second_train_cost: float = 1.0
    decode_cost_ratio: float = 0.1
    teacher_inference_cost_ratio: float = 0.05

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.per_second_train_cost <= 0:
            raise ValueError("per_second_train_cost must be positive")
        if self.decode_cost_ratio < 0 or self.teacher_inference_cost_ratio < 0:
            raise ValueError("cost ratios must be >= 0")


@dataclass(frozen=True)
class OverheadReport:
    """Padding accounting for one order (or one whole strategy run).

    padding_overhead = padded/actual - 1. wall_cost and overhead_vs_baseline
    are filled by the wall-time model; plain padding_cost leaves them None.
    """

    padded_seconds: float
    actual_seconds: float
    padding_overhead: float
    wall_cost: float | None = None
    overhead_vs_baseline: float | None = None

    def __post_init__(self) -> None:
        if self.padded_seconds < self.actual_seconds - 1e-9:
            raise ValueError("padded seconds cannot undercut actual seconds")


def _padded_seconds(durations: np.ndarray, batch_size: int) -> float:
    """Sum over consecutive batches of batch_len * max duration in batch."""
    n = len(durations)
    full = (n // batch_size) * batch_size
    total = 0.0
    if full:
        total += float(durations[:full].reshape(-1, batch_size).max(axis=1).sum()) * batch_size
    if full < n:
        tail = durations[full:]
        total += float(tail.max()) * len(tail)
    return total


def padding_cost(
    order: EpochPlan | Sequence[str],
    durations: Mapping[str, float],
    batch_size: int,
) -> OverheadReport:
    """Padding accounting for one presentation order.

    The order is cut into consecutive batches of `batch_size` (the last may
    be smaller); each batch costs its length times its longest duration.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    ids = list(order.ordered_ids if isinstance(order, EpochPlan) else order)
    if not ids:
        raise ValueError("cannot cost an empty order")
    durs = np.asarray([durations[i] for i in ids], dtype=np.float64)
    padded = _padded_seconds(durs, batch_size)
    actual = float(durs.sum())
    return OverheadReport(
        padded_seconds=padded,
        actual_seconds=actual,
        padding_overhead=padded / actual - 1.0,
    )


def _surrogate_order(
    kind: StrategyKind,
    subset_ids: list[str],
    durations: Mapping[str, float],
    epoch: int,
    seed: int,
) -> list[str]:
    """A representative epoch order for cost purposes.

    Adaptive scores depend on training feedback the cost model does not have,
    so score-driven orders (epoch 2 onward, and transfer orders) are modeled
    as seeded permutations — i.e. uncorrelated with duration. The duration
    baseline sorts; random shuffling is a fixed seeded permutation.
    """
    by_duration = sorted(subset_ids, key=lambda i: (durations[i], i))
    if kind is StrategyKind.DURATION_BASELINE:
        return by_duration
    if kind is StrategyKind.RANDOM_SHUFFLE:
        rng = derive_rng(seed, "cost-shuffle")
        return [subset_ids[i] for i in rng.permutation(len(subset_ids))]
    if kind in (StrategyKind.TRANSFER_WER_MIXED, StrategyKind.TRANSFER_LOSS_MIXED):
        rng = derive_rng(seed, "cost-teacher-scores")
        return [subset_ids[i] for i in rng.permutation(len(subset_ids))]
    # Adaptive loss/metric kinds: duration order on epoch 1, score order after.
    if epoch == 1:
        return by_duration
    rng = derive_rng(seed, "cost-scores", epoch)
    return [subset_ids[i] for i in rng.permutation(len(subset_ids))]


def wall_cost(
    strategy: Strategy,
    schedule: PacingSchedule,
    corpus: Corpus,
    params: CostParams,
    seed: int = 0,
) -> OverheadReport:
    """Estimated total training cost of a strategy under a pacing schedule.

    cost = padded train seconds * per_second_train_cost
         + (metric kinds) decode_cost_ratio * actual seconds, every epoch
         + (transfer kinds) teacher_inference_cost_ratio * full-corpus
           seconds, once.

    overhead_vs_baseline compares against the unpaced duration baseline over
    the same number of epochs.
    """
    report = _wall_cost(strategy, schedule, corpus, params, seed)
    baseline = Strategy(kind=StrategyKind.DURATION_BASELINE)
    if strategy.kind is StrategyKind.DURATION_BASELINE and all(
        e.fraction == 1.0 for e in schedule.entries
    ):
        base_cost = report.wall_cost
    else:
        base_cost = _wall_cost(
            baseline, build_schedule(schedule.n_epochs, DISABLED_PACING), corpus,
            params, seed,
        ).wall_cost
    assert base_cost is not None and report.wall_cost is not None
    return replace(report, overhead_vs_baseline=report.wall_cost / base_cost - 1.0)


def _wall_cost(
    strategy: Strategy,
    schedule: PacingSchedule,
    corpus: Corpus,
    params: CostParams,
    seed: int,
) -> OverheadReport:
    if not corpus.records:
        raise ValueError("cannot cost an empty corpus")
    durations = {r.id: r.duration_s for r in corpus.records}
    all_ids = [r.id for r in corpus.records]
    total_seconds = float(sum(durations.values()))

    padded = 0.0
    actual = 0.0
    decode_cost = 0.0
    subset_ids: list[str] = []
    for entry in schedule.entries:
        if entry.refresh or not subset_ids:
            size = math.ceil(entry.fraction * len(all_ids))
            rng = derive_rng(seed, "cost-subset", entry.epoch)
            picked = rng.choice(len(all_ids), size=size, replace=False)
            subset_ids = [all_ids[i] for i in sorted(picked)]
        order = _surrogate_order(strategy.kind, subset_ids, durations, entry.epoch, seed)
        if strategy.is_mixed:
            plan = uniform_mix(
                EpochPlan(epoch=entry.epoch, ordered_ids=tuple(order)),
                strategy.mixing_fraction,
                derive_seed(seed, "cost-mix") if strategy.is_transfer
                else derive_seed(seed, "cost-mix", entry.epoch),
            )
            order = list(plan.ordered_ids)
        durs = np.asarray([durations[i] for i in order], dtype=np.float64)
        padded += _padded_seconds(durs, params.batch_size)
        epoch_actual = float(durs.sum())
        actual += epoch_actual
        if strategy.kind in METRIC_KINDS and not strategy.is_transfer:
            decode_cost += params.decode_cost_ratio * epoch_actual

    teacher_cost = 0.0
    if strategy.is_transfer:
        teacher_cost = params.teacher_inference_cost_ratio * total_seconds

    total = padded * params.per_second_train_cost + decode_cost + teacher_cost
    return OverheadReport(
        padded_seconds=padded,
        actual_seconds=actual,
        padding_overhead=padded / actual - 1.0,
        wall_cost=total,
    )


def overhead_table(
    runs: Sequence[tuple[str, Strategy, PacingSchedule]],
    corpus: Corpus,
    params: CostParams,
    seed: int = 0,
) -> list[tuple[str, float]]:
    """(label, overhead_vs_baseline) rows for a set of strategy runs."""
    rows = []
    for label, strategy, schedule in runs:
        report = wall_cost(strategy, schedule, corpus, params, seed)
        assert report.overhead_vs_baseline is not None
        rows.append((label, report.overhead_vs_baseline))
    return rows
