"""Edit-distance error rates and matched-pairs significance testing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class AlignmentCounts:
    """Substitution / deletion / insertion counts for one ref-hyp pair."""

    substitutions: int
    deletions: int
    insertions: int
    ref_len: int

    @property
    def distance(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def levenshtein(ref: Sequence, hyp: Sequence) -> int:
    """Minimal unit-cost edit distance, two-row dynamic programming."""
    if len(ref) < len(hyp):
        ref, hyp = hyp, ref
    prev = list(range(len(hyp) + 1))
    for i in range(1, len(ref) + 1):
        cur = [i] + [0] * len(hyp)
        r = ref[i - 1]
        for j in range(1, len(hyp) + 1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (r != hyp[j - 1]))
        prev = cur
    return prev[len(hyp)]


def edit_distance(ref: Sequence, hyp: Sequence) -> AlignmentCounts:
    """Align hyp against ref and return S/D/I counts.

    The distance is unique; the (S, D, I) decomposition is fixed by
    preferring substitutions over deletions over insertions among minimal
    alignments. Given the substitution count, D and I are forced by the
    length identity D - I = len(ref) - len(hyp), so the counts are fully
    deterministic and swap-symmetric (D and I trade places when the
    arguments swap).
    """
    m, n = len(ref), len(hyp)
    # Lexicographic DP state per cell: (cost, -substitutions).
    prev = [(j, 0) for j in range(n + 1)]
    for i in range(1, m + 1):
        cur = [(i, 0)] + [(0, 0)] * n
        r = ref[i - 1]
        for j in range(1, n + 1):
            diag_cost, diag_neg = prev[j - 1]
            if r == hyp[j - 1]:
                best = (diag_cost, diag_neg)
            else:
                best = (diag_cost + 1, diag_neg - 1)
            del_cost, del_neg = prev[j]
            cand = (del_cost + 1, del_neg)
            if cand < best:
                best = cand
            ins_cost, ins_neg = cur[j - 1]
            cand = (ins_cost + 1, ins_neg)
            if cand < best:
                best = cand
            cur[j] = best
        prev = cur
    cost, neg_subs = prev[n]
    subs = -neg_subs
    deletions = (cost - subs + m - n) // 2
    insertions = cost - subs - deletions
    return AlignmentCounts(
        substitutions=subs, deletions=deletions, insertions=insertions, ref_len=m
    )


def wer(ref: Sequence, hyp: Sequence) -> float:
    """Word error rate: edit distance over reference length."""
    if len(ref) == 0:
        raise ValueError("wer undefined for an empty reference")
    return levenshtein(ref, hyp) / len(ref)


def cer(ref_chars: Sequence, hyp_chars: Sequence) -> float:
    """Character error rate over already-expanded character sequences."""
    if len(ref_chars) == 0:
        raise ValueError("cer undefined for an empty reference")
    return levenshtein(ref_chars, hyp_chars) / len(ref_chars)


def expand_chars(token_names: Sequence[str]) -> str:
    """Character expansion for CER: token names joined without separators."""
    return "".join(token_names)


def corpus_error_rate(pairs: Sequence[tuple[Sequence, Sequence]]) -> float:
    """Corpus-level rate: total edit distance over total reference length.

    This is not the mean of per-utterance rates; short utterances weigh less.
    """
    total_dist = 0
    total_ref = 0
    for ref, hyp in pairs:
        total_dist += levenshtein(ref, hyp)
        total_ref += len(ref)
    if total_ref == 0:
        raise ValueError("corpus error rate undefined for empty references")
    return total_dist / total_ref


@dataclass(frozen=True)
class PairedErrorSample:
    """Per-utterance error counts of two systems on a shared test set."""

    utterance_ids: tuple[str, ...]
    errors_a: tuple[int, ...]
    errors_b: tuple[int, ...]

    def __post_init__(self) -> None:
        if not (len(self.utterance_ids) == len(self.errors_a) == len(self.errors_b)):
            raise ValueError("mismatched sample lengths")

    @classmethod
    def from_dicts(cls, errors_a: Mapping[str, int], errors_b: Mapping[str, int]) -> "PairedErrorSample":
        if set(errors_a) != set(errors_b):
            raise ValueError("the two systems cover different utterance sets")
        ids = tuple(sorted(errors_a))
        return cls(
            utterance_ids=ids,
            errors_a=tuple(errors_a[i] for i in ids),
            errors_b=tuple(errors_b[i] for i in ids),
        )

    def swapped(self) -> "PairedErrorSample":
        return PairedErrorSample(self.utterance_ids, self.errors_b, self.errors_a)


@dataclass(frozen=True)
class MapssweResult:
    z: float
    p_two_sided: float
    n: int
    mean_diff: float
    sd_diff: float

    @property
    def significant(self) -> bool:
        # Convenience at the conventional strict threshold; callers with a
        # different alpha compare p_two_sided themselves.
        return self.p_two_sided < 0.001


def mapsswe(sample: PairedErrorSample) -> MapssweResult:
    """Matched Pairs Sentence-Segment Word Error test (normal approximation).

    Each utterance is one segment. With d_i the per-segment error-count
    difference between systems A and B, the statistic is
    z = mean(d) / (sd(d) / sqrt(n)) with the n-1 sample standard deviation,
    and the p-value is the two-sided standard-normal tail. Degenerate
    samples: sd = 0 with zero mean gives (z=0, p=1); sd = 0 with nonzero
    mean gives a signed-infinity sentinel and p = 0.
    """
    n = len(sample.utterance_ids)
    if n < 2:
        raise ValueError(f"mapsswe needs at least 2 utterances, got {n}")
    d = np.asarray(sample.errors_a, dtype=np.float64) - np.asarray(
        sample.errors_b, dtype=np.float64
    )
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return MapssweResult(z=0.0, p_two_sided=1.0, n=n, mean_diff=0.0, sd_diff=0.0)
        return MapssweResult(
            z=math.copysign(math.inf, mean), p_two_sided=0.0, n=n, mean_diff=mean, sd_diff=0.0
        )
    z = mean / (sd / math.sqrt(n))
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return MapssweResult(z=z, p_two_sided=p, n=n, mean_diff=mean, sd_diff=sd)
