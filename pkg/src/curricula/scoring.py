"""Difficulty scoring, easy-to-hard ordering, uniform mixing, and the
per-strategy epoch-order dispatch.

A scoring function assigns each utterance a real difficulty score (lower is
easier); an epoch plan is the resulting presentation order. Adaptive
strategies re-score every epoch from the training model's own feedback;
transfer strategies score once with a separately trained teacher; the
duration baseline and random shuffling never look at feedback at all.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus, UtteranceRecord
from .seeding import derive_rng, derive_seed


class ScoringError(ValueError):
    """Raised for malformed score tables or impossible ordering requests."""


class UnsupportedStrategyError(ScoringError):
    """Raised when a strategy cannot run on the given corpus (e.g. no frames)."""


class StrategyKind(Enum):
    """The eight training strategies, named by their report abbreviations."""

    DURATION_BASELINE = "Baseline"
    RANDOM_SHUFFLE = "RS"
    SEQ2SEQ_LOSS = "S2S"
    WER_SCORE = "WS"
    WER_SCORE_MIXED = "WS-M"
    SEQ2SEQ_LOSS_MIXED = "S2S-M"
    TRANSFER_WER_MIXED = "T-WS-M"
    TRANSFER_LOSS_MIXED = "T-S2S-M"


MIXED_KINDS = frozenset(
    {
        StrategyKind.WER_SCORE_MIXED,
        StrategyKind.SEQ2SEQ_LOSS_MIXED,
        StrategyKind.TRANSFER_WER_MIXED,
        StrategyKind.TRANSFER_LOSS_MIXED,
    }
)
ADAPTIVE_KINDS = frozenset(
    {
        StrategyKind.SEQ2SEQ_LOSS,
        StrategyKind.WER_SCORE,
        StrategyKind.WER_SCORE_MIXED,
        StrategyKind.SEQ2SEQ_LOSS_MIXED,
    }
)
TRANSFER_KINDS = frozenset(
    {StrategyKind.TRANSFER_WER_MIXED, StrategyKind.TRANSFER_LOSS_MIXED}
)
# Strategies whose primary score is a decode WER (these pay for an extra
# decoding pass while training; the transfer variant pays it once, offline).
METRIC_KINDS = frozenset(
    {StrategyKind.WER_SCORE, StrategyKind.WER_SCORE_MIXED, StrategyKind.TRANSFER_WER_MIXED}
)


def score_kind_for(kind: StrategyKind) -> str:
    """What the primary score of a strategy measures."""
    if kind is StrategyKind.DURATION_BASELINE:
        return "duration"
    if kind in (StrategyKind.SEQ2SEQ_LOSS, StrategyKind.SEQ2SEQ_LOSS_MIXED,
                StrategyKind.TRANSFER_LOSS_MIXED):
        return "loss"
    if kind in METRIC_KINDS:
        return "wer"
    return "none"  # RANDOM_SHUFFLE


@dataclass(frozen=True)
class Strategy:
    """A strategy kind plus its knobs.

    `mixing_fraction` is the share of the easy section swapped outward by
    uniform mixing (only meaningful for the *-M kinds). `reshuffle_each_epoch`
    applies to RANDOM_SHUFFLE only: by default the shuffle is computed once
    before training and reused every epoch.
    """

    kind: StrategyKind
    mixing_fraction: float = 0.2
    reshuffle_each_epoch: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.mixing_fraction <= 1.0:
            raise ValueError(f"mixing_fraction must be in [0, 1], got {self.mixing_fraction}")
        if self.kind in MIXED_KINDS and self.mixing_fraction == 0.0:
            raise ValueError(f"{self.kind.value} requires mixing_fraction > 0")

    @property
    def label(self) -> str:
        return self.kind.value

    @property
    def is_adaptive(self) -> bool:
        return self.kind in ADAPTIVE_KINDS

    @property
    def is_transfer(self) -> bool:
        return self.kind in TRANSFER_KINDS

    @property
    def is_mixed(self) -> bool:
        return self.kind in MIXED_KINDS


def parse_strategy(name: str, mixing_fraction: float = 0.2,
                   reshuffle_each_epoch: bool = False) -> Strategy:
    """Build a Strategy from its abbreviation (e.g. "WS-M")."""
    try:
        kind = StrategyKind(name)
    except ValueError:
        known = ", ".join(k.value for k in StrategyKind)
        raise ValueError(f"unknown strategy {name!r}; known: {known}") from None
    return Strategy(kind=kind, mixing_fraction=mixing_fraction,
                    reshuffle_each_epoch=reshuffle_each_epoch)


@dataclass(frozen=True)
class ScoreEntry:
    """One utterance's difficulty score plus the tie-break keys."""

    utterance_id: str
    primary_score: float
    confidence: float | None
    duration_s: float


@dataclass(frozen=True)
class ScoreTable:
    """Per-utterance scores for one epoch.

    `score_kind` states what primary_score measures ("duration", "loss" or
    "wer") so the ordering dispatch can refuse mismatched feedback.
    """

    epoch: int
    entries: Mapping[str, ScoreEntry]
    score_kind: str

    def __post_init__(self) -> None:
        for utt_id, entry in self.entries.items():
            if utt_id != entry.utterance_id:
                raise ScoringError(f"entry keyed {utt_id!r} holds {entry.utterance_id!r}")

    def __len__(self) -> int:
        return len(self.entries)

    def subset(self, ids: Iterable[str]) -> "ScoreTable":
        kept = {i: self.entries[i] for i in ids if i in self.entries}
        return ScoreTable(epoch=self.epoch, entries=kept, score_kind=self.score_kind)


@dataclass(frozen=True)
class EpochPlan:
    """The presentation order for one epoch: a permutation of the active ids."""

    epoch: int
    ordered_ids: tuple[str, ...]
    warning: str | None = None

    def __post_init__(self) -> None:
        if len(set(self.ordered_ids)) != len(self.ordered_ids):
            raise ScoringError("epoch plan contains duplicate ids")

    def __len__(self) -> int:
        return len(self.ordered_ids)


class TieBreak(Enum):
    """Tie-break chains applied after the primary score (all end in id).

    ID: score, then id (enough when the score *is* the duration).
    DURATION: score, duration ascending, id — for loss-based scores.
    CONFIDENCE_DURATION: score, confidence descending, duration ascending,
    id — for metric-based scores.
    """

    ID = "id"
    DURATION = "duration"
    CONFIDENCE_DURATION = "confidence-duration"


def tiebreak_for(kind: StrategyKind) -> TieBreak:
    if kind in METRIC_KINDS:
        return TieBreak.CONFIDENCE_DURATION
    if kind is StrategyKind.DURATION_BASELINE:
        return TieBreak.ID
    return TieBreak.DURATION


def score_duration(records: Corpus | Sequence[UtteranceRecord]) -> ScoreTable:
    """Duration-based difficulty: shorter means easier."""
    recs = list(records)
    if not recs:
        raise ScoringError("cannot score an empty corpus")
    entries = {
        r.id: ScoreEntry(
            utterance_id=r.id, primary_score=r.duration_s, confidence=None,
            duration_s=r.duration_s,
        )
        for r in recs
    }
    return ScoreTable(epoch=0, entries=entries, score_kind="duration")


def order_by_scores(table: ScoreTable, tiebreak: TieBreak) -> EpochPlan:
    """Sort ascending by primary score; lower scores are presented first.

    The sort is stable and fully deterministic: equal scores fall through the
    tie-break chain and finally to lexicographic id order.
    """
    if not table.entries:
        raise ScoringError("cannot order an empty score table")
    for entry in table.entries.values():
        if math.isnan(entry.primary_score):
            raise ScoringError(f"NaN score for utterance {entry.utterance_id!r}")
        if tiebreak is TieBreak.CONFIDENCE_DURATION and entry.confidence is None:
            raise ScoringError(
                f"metric tie-break needs a confidence for utterance {entry.utterance_id!r}"
            )

    if tiebreak is TieBreak.ID:
        def key(e: ScoreEntry):
            return (e.primary_score, e.utterance_id)
    elif tiebreak is TieBreak.DURATION:
        def key(e: ScoreEntry):
            return (e.primary_score, e.duration_s, e.utterance_id)
    else:
        def key(e: ScoreEntry):
            return (e.primary_score, -e.confidence, e.duration_s, e.utterance_id)

    ordered = sorted(table.entries.values(), key=key)
    return EpochPlan(epoch=table.epoch, ordered_ids=tuple(e.utterance_id for e in ordered))


def mix_section_sizes(n: int) -> tuple[int, int, int]:
    """(easy, medium, hard) section sizes: ceil thirds, remainder to hard."""
    easy = math.ceil(n / 3)
    medium = math.ceil(n / 3)
    return easy, medium, n - easy - medium


def uniform_mix(plan: EpochPlan, fraction: float, seed: int) -> EpochPlan:
    """Swap a fraction of the easy section into the medium and hard sections.

    The ordered plan is cut into easy/medium/hard thirds; k = floor(fraction
    * |easy|) distinct easy positions are chosen uniformly and swapped
    pairwise, ceil(k/2) with distinct medium positions and floor(k/2) with
    distinct hard positions. The output is always a permutation of the input
    and exactly 2k positions change. Plans shorter than 3 are returned
    unchanged with a warning flag.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    n = len(plan.ordered_ids)
    if n < 3:
        return replace(plan, warning="plan too short to mix (n < 3)")
    easy_n, medium_n, hard_n = mix_section_sizes(n)
    k = math.floor(fraction * easy_n)
    if k == 0:
        return plan

    to_medium = math.ceil(k / 2)
    to_hard = k - to_medium
    if to_hard > hard_n:
        # Tiny plans can have an empty hard section; redirect the excess to
        # medium so exactly k easy positions still move.
        to_medium += to_hard - hard_n
        to_hard = hard_n

    rng = derive_rng(seed, "uniform-mix")
    easy_pos = rng.choice(easy_n, size=k, replace=False)
    medium_pos = easy_n + rng.choice(medium_n, size=to_medium, replace=False)
    hard_pos = easy_n + medium_n + rng.choice(hard_n, size=to_hard, replace=False)

    ids = list(plan.ordered_ids)
    partners = list(medium_pos) + list(hard_pos)
    for e_pos, p_pos in zip(easy_pos, partners):
        ids[e_pos], ids[p_pos] = ids[p_pos], ids[e_pos]
    return EpochPlan(epoch=plan.epoch, ordered_ids=tuple(ids))


def transfer_scores(teacher_model, records: Corpus | Sequence[UtteranceRecord],
                    kind: str) -> ScoreTable:
    """Score every utterance with a trained teacher in one inference pass.

    `kind` selects the primary score: "loss" (teacher per-example loss) or
    "wer" (teacher per-example decode WER). The table is a pure function of
    (teacher, corpus), so callers cache it and reuse it unchanged for every
    epoch — the curriculum is static.
    """
    if kind not in ("loss", "wer"):
        raise ValueError(f"kind must be 'loss' or 'wer', got {kind!r}")
    from . import learner  # deferred: learner imports this module's types

    if isinstance(records, Corpus):
        recs: Sequence[UtteranceRecord] = records.records
        namer = records.token_name
    else:
        recs = list(records)
        namer = str
    if not recs:
        raise ScoringError("cannot score an empty corpus")
    entries = {}
    for rec in recs:
        if rec.frames is None:
            raise UnsupportedStrategyError(
                f"transfer scoring needs feature frames; utterance {rec.id!r} "
                "is metadata-only"
            )
        fb = learner.example_feedback(teacher_model, rec, namer)
        entries[rec.id] = ScoreEntry(
            utterance_id=rec.id,
            primary_score=fb.loss if kind == "loss" else fb.wer,
            confidence=fb.confidence,
            duration_s=rec.duration_s,
        )
    return ScoreTable(epoch=0, entries=entries, score_kind=kind)


def _ordered_with_unscored_tail(
    records: Sequence[UtteranceRecord], table: ScoreTable, tiebreak: TieBreak
) -> tuple[str, ...]:
    """Scored records ordered by the table, unscored ones by duration after.

    Subset refreshes can pull in utterances the model has never visited;
    they go to the tail in duration order.
    """
    scored = [r for r in records if r.id in table.entries]
    unscored = [r for r in records if r.id not in table.entries]
    head: tuple[str, ...] = ()
    if scored:
        head = order_by_scores(table.subset(r.id for r in scored), tiebreak).ordered_ids
    tail: tuple[str, ...] = ()
    if unscored:
        tail = order_by_scores(score_duration(unscored), TieBreak.ID).ordered_ids
    return head + tail


def epoch_order(
    strategy: Strategy,
    records: Corpus | Sequence[UtteranceRecord],
    prev_scores: ScoreTable | None,
    epoch: int,
    seed: int,
) -> EpochPlan:
    """The presentation order of the given subset for one epoch.

    Dispatch:
      * Baseline     — duration ascending, every epoch.
      * RS           — one seeded shuffle, reused across epochs (unless
                       reshuffle_each_epoch).
      * S2S/WS (+M)  — epoch 1 falls back to duration order (no feedback
                       exists yet); later epochs order by `prev_scores` from
                       the previous epoch, then the mixed kinds apply
                       uniform mixing with an epoch-dependent seed.
      * T-*          — order by the cached teacher table, then uniform
                       mixing with an epoch-independent seed, so the plan is
                       identical at every epoch.
    """
    if epoch < 1:
        raise ValueError(f"epoch must be >= 1, got {epoch}")
    recs = list(records.records if isinstance(records, Corpus) else records)
    if not recs:
        raise ScoringError("cannot plan an epoch over an empty subset")
    kind = strategy.kind

    if kind is StrategyKind.DURATION_BASELINE:
        base = order_by_scores(score_duration(recs), TieBreak.ID)
        return EpochPlan(epoch=epoch, ordered_ids=base.ordered_ids)

    if kind is StrategyKind.RANDOM_SHUFFLE:
        ids = sorted(r.id for r in recs)
        if strategy.reshuffle_each_epoch:
            rng = derive_rng(seed, "shuffle", epoch)
        else:
            rng = derive_rng(seed, "shuffle")
        order = rng.permutation(len(ids))
        return EpochPlan(epoch=epoch, ordered_ids=tuple(ids[i] for i in order))

    tiebreak = tiebreak_for(kind)
    expected = score_kind_for(kind)

    if strategy.is_transfer:
        if prev_scores is None:
            raise ScoringError(f"{kind.value} needs a teacher score table")
        if prev_scores.score_kind != expected:
            raise ScoringError(
                f"{kind.value} expects {expected!r} scores, got {prev_scores.score_kind!r}"
            )
        ordered = _ordered_with_unscored_tail(recs, prev_scores, tiebreak)
        plan = EpochPlan(epoch=epoch, ordered_ids=ordered)
        return uniform_mix(plan, strategy.mixing_fraction, derive_seed(seed, "mix"))

    # Adaptive kinds.
    if epoch == 1:
        base = order_by_scores(score_duration(recs), TieBreak.DURATION)
        plan = EpochPlan(epoch=epoch, ordered_ids=base.ordered_ids)
    else:
        if prev_scores is None:
            raise ScoringError(
                f"{kind.value} at epoch {epoch} needs scores from epoch {epoch - 1}"
            )
        if prev_scores.score_kind != expected:
            raise ScoringError(
                f"{kind.value} expects {expected!r} scores, got {prev_scores.score_kind!r}"
            )
        ordered = _ordered_with_unscored_tail(recs, prev_scores, tiebreak)
        plan = EpochPlan(epoch=epoch, ordered_ids=ordered)
    if strategy.is_mixed:
        plan = uniform_mix(plan, strategy.mixing_fraction, derive_seed(seed, "mix", epoch))
    return plan


SCORE_CACHE_HEADER = ("epoch", "utterance_id", "primary_score", "confidence",
                      "duration_s", "strategy")


def write_score_cache(path: str | Path, table: ScoreTable, strategy_label: str,
                      append: bool = False) -> None:
    """Append one epoch's scores to a CSV cache file.

    Row format: epoch,utterance_id,primary_score,confidence,duration_s,strategy
    with an empty confidence field when none was recorded. Rows are written
    in id order.
    """
    path = Path(path)
    write_header = not (append and path.exists())
    mode = "a" if append else "w"
    with path.open(mode, newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if write_header:
            writer.writerow(SCORE_CACHE_HEADER)
        for utt_id in sorted(table.entries):
            e = table.entries[utt_id]
            conf = "" if e.confidence is None else repr(e.confidence)
            writer.writerow(
                [table.epoch, utt_id, repr(e.primary_score), conf,
                 repr(e.duration_s), strategy_label]
            )


def read_score_cache(path: str | Path) -> dict[tuple[str, int], ScoreTable]:
    """Read a score cache back as {(strategy_label, epoch): ScoreTable}."""
    path = Path(path)
    grouped: dict[tuple[str, int], dict[str, ScoreEntry]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != SCORE_CACHE_HEADER:
            raise ScoringError(f"{path}: not a score cache file")
        for row in reader:
            epoch_s, utt_id, score_s, conf_s, dur_s, label = row
            key = (label, int(epoch_s))
            grouped.setdefault(key, {})[utt_id] = ScoreEntry(
                utterance_id=utt_id,
                primary_score=float(score_s),
                confidence=None if conf_s == "" else float(conf_s),
                duration_s=float(dur_s),
            )
    tables = {}
    for (label, epoch), entries in grouped.items():
        try:
            score_kind = score_kind_for(StrategyKind(label))
        except ValueError:
            score_kind = "loss"
        tables[(label, epoch)] = ScoreTable(epoch=epoch, entries=entries,
                                            score_kind=score_kind)
    return tables
