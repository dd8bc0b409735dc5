"""Pacing: per-epoch data fractions with refresh-every-M-epochs semantics.

The paced fraction grows geometrically, fraction(i) = start * factor^(i/step)
clamped at 1.0. Subsets are resampled (and rescored) only at refresh epochs;
in between, the previous refresh's subset is reused. The final epoch is
always a refresh at fraction 1.0, so the model sees the whole training set
in at least one epoch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .corpus import Corpus, UtteranceRecord
from .scoring import EpochPlan, ScoreTable, Strategy, epoch_order
from .seeding import derive_rng


@dataclass(frozen=True)
class PacingParams:
    start_fraction: float = 0.2
    growth_factor: float = 1.71
    growth_step: float = 5.0
    refresh_every: int = 1
    enabled: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.start_fraction <= 1.0:
            raise ValueError("start_fraction must be in (0, 1]")
        if self.growth_factor < 1.0:
            raise ValueError("growth_factor must be >= 1 (fractions may not shrink)")
        if self.growth_step <= 0:
            raise ValueError("growth_step must be positive")
        if self.refresh_every < 1:
            raise ValueError("refresh_every must be >= 1")


DISABLED_PACING = PacingParams(enabled=False)


def pacing_fraction(epoch: int, params: PacingParams) -> float:
    """fraction(i) = min(1, start_fraction * growth_factor^(i/step))."""
    if epoch < 1:
        raise ValueError(f"epoch must be >= 1, got {epoch}")
    return min(1.0, params.start_fraction
               * params.growth_factor ** (epoch / params.growth_step))


@dataclass(frozen=True)
class PacingEntry:
    epoch: int
    fraction: float
    refresh: bool


@dataclass(frozen=True)
class PacingSchedule:
    """Per-epoch (fraction, refresh) pairs for an n_epochs training run."""

    n_epochs: int
    entries: tuple[PacingEntry, ...]

    def __post_init__(self) -> None:
        if self.n_epochs != len(self.entries):
            raise ValueError("schedule length disagrees with n_epochs")
        if not self.entries:
            raise ValueError("schedule must cover at least one epoch")
        if not self.entries[0].refresh:
            raise ValueError("epoch 1 must be a refresh epoch")
        if not self.entries[-1].refresh:
            raise ValueError("the last epoch must be a refresh epoch")
        if self.entries[-1].fraction != 1.0:
            raise ValueError("the final refresh must use the whole training set")
        fracs = [e.fraction for e in self.entries]
        if any(b < a for a, b in zip(fracs, fracs[1:])):
            raise ValueError("fractions must be nondecreasing")
        if any(not 0.0 < f <= 1.0 for f in fracs):
            raise ValueError("fractions must lie in (0, 1]")

    @property
    def refresh_epochs(self) -> tuple[int, ...]:
        return tuple(e.epoch for e in self.entries if e.refresh)


def build_schedule(n_epochs: int, params: PacingParams) -> PacingSchedule:
    """Refresh at epochs 1, M, 2M, ... and always at the last epoch.

    Non-refresh epochs reuse the previous refresh's fraction (and, in the
    runner, its subset). The final fraction is forced to 1.0. With pacing
    disabled every epoch is a full-data refresh.
    """
    if n_epochs < 1:
        raise ValueError("n_epochs must be >= 1")
    if not params.enabled:
        entries = tuple(PacingEntry(epoch=i, fraction=1.0, refresh=True)
                        for i in range(1, n_epochs + 1))
        return PacingSchedule(n_epochs=n_epochs, entries=entries)

    refresh = {1, n_epochs}
    refresh.update(range(params.refresh_every, n_epochs + 1, params.refresh_every))
    entries = []
    current = pacing_fraction(1, params)
    for i in range(1, n_epochs + 1):
        if i in refresh:
            current = 1.0 if i == n_epochs else pacing_fraction(i, params)
        entries.append(PacingEntry(epoch=i, fraction=current, refresh=i in refresh))
    return PacingSchedule(n_epochs=n_epochs, entries=tuple(entries))


@dataclass(frozen=True)
class ScoringContext:
    """What sample_subset needs to order the freshly sampled subset."""

    strategy: Strategy
    epoch: int
    prev_scores: ScoreTable | None = None
    order_seed: int = 0


def sample_subset(
    corpus: Corpus | Sequence[UtteranceRecord],
    fraction: float,
    seed: int,
    scoring_context: ScoringContext,
) -> tuple[list[str], EpochPlan]:
    """Sample ceil(fraction * n) distinct utterances, then order them.

    Sampling is uniform without replacement and seeded; ordering delegates to
    the active strategy's epoch_order, which places any never-scored
    newcomers at the tail in duration order.
    """
    records = list(corpus.records if isinstance(corpus, Corpus) else corpus)
    if not records:
        raise ValueError("cannot sample from an empty corpus")
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    size = math.ceil(fraction * len(records))
    rng = derive_rng(seed, "subset")
    picked = rng.choice(len(records), size=size, replace=False)
    subset = [records[i] for i in sorted(picked)]
    plan = epoch_order(
        scoring_context.strategy,
        subset,
        scoring_context.prev_scores,
        scoring_context.epoch,
        scoring_context.order_seed,
    )
    return [r.id for r in subset], plan


def hours_seen(schedule: PacingSchedule, corpus_total_hours: float) -> float:
    """Expected cumulative hours presented over the whole run.

    Subsets are sampled uniformly, so expected hours per epoch are
    proportional to the fraction; the exact per-run accounting is recorded
    separately by the experiment runner.
    """
    return sum(e.fraction for e in schedule.entries) * corpus_total_hours
