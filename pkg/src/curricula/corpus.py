"""Synthetic corpora, manifest ingestion, and duration-based segmentation.

A corpus is an immutable collection of utterance records. Generated corpora
carry per-token feature frames built from a fixed set of class prototypes
plus Gaussian noise, so a linear per-frame classifier can actually learn
them. Manifest-loaded corpora carry metadata only (id, duration, transcript)
and support duration-based scheduling but not training.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .seeding import derive_rng


class ManifestError(ValueError):
    """Raised when a manifest file cannot be parsed into a corpus."""


@dataclass(frozen=True, eq=False)
class UtteranceRecord:
    """One training example.

    `frames` is a (len(tokens), feature_dim) float array, one feature vector
    per reference token, or None for metadata-only records. `noise_sigma` is
    the generation noise level and is None for ingested manifests.
    """

    id: str
    duration_s: float
    tokens: tuple[int, ...]
    frames: np.ndarray | None = None
    noise_sigma: float | None = None

    def __post_init__(self) -> None:
        if self.duration_s <= 0:
            raise ValueError(f"utterance {self.id!r}: duration_s must be positive")
        if self.frames is not None and len(self.frames) != len(self.tokens):
            raise ValueError(
                f"utterance {self.id!r}: {len(self.frames)} frames for "
                f"{len(self.tokens)} tokens"
            )
        if self.noise_sigma is not None and self.noise_sigma < 0:
            raise ValueError(f"utterance {self.id!r}: noise_sigma must be >= 0")


@dataclass(frozen=True, eq=False)
class Corpus:
    """An immutable set of utterance records plus vocabulary metadata.

    `frame_seconds` and `feature_dim` are None for metadata-only corpora
    (manifest ingestion); generated corpora always set both, and every
    generated record satisfies duration_s == len(tokens) * frame_seconds.
    """

    records: tuple[UtteranceRecord, ...]
    vocab_size: int
    feature_dim: int | None = None
    frame_seconds: float | None = None
    token_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for rec in self.records:
            if rec.id in seen:
                raise ValueError(f"duplicate utterance id {rec.id!r}")
            seen.add(rec.id)
            if rec.tokens and (min(rec.tokens) < 0 or max(rec.tokens) >= self.vocab_size):
                raise ValueError(
                    f"utterance {rec.id!r}: token id outside [0, {self.vocab_size})"
                )
            if rec.frames is not None:
                if self.feature_dim is None:
                    raise ValueError("corpus with frames needs a feature_dim")
                if rec.frames.shape[1] != self.feature_dim:
                    raise ValueError(
                        f"utterance {rec.id!r}: frame dim {rec.frames.shape[1]} "
                        f"!= corpus feature_dim {self.feature_dim}"
                    )
        if self.records and self.vocab_size < 1:
            raise ValueError("vocab_size must be positive for a nonempty corpus")
        if self.frame_seconds is not None and self.frame_seconds <= 0:
            raise ValueError("frame_seconds must be positive")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[UtteranceRecord]:
        return iter(self.records)

    @cached_property
    def by_id(self) -> dict[str, UtteranceRecord]:
        return {rec.id: rec for rec in self.records}

    @property
    def has_frames(self) -> bool:
        return bool(self.records) and all(r.frames is not None for r in self.records)

    @property
    def total_duration_s(self) -> float:
        return float(sum(r.duration_s for r in self.records))

    @property
    def total_hours(self) -> float:
        return self.total_duration_s / 3600.0

    def token_name(self, token_id: int) -> str:
        if self.token_names is not None:
            return self.token_names[token_id]
        return str(token_id)

    def subset(self, ids: Sequence[str]) -> "Corpus":
        """A new corpus holding the given utterances, in corpus order."""
        wanted = set(ids)
        missing = wanted - set(self.by_id)
        if missing:
            raise KeyError(f"unknown utterance ids: {sorted(missing)[:5]}")
        return Corpus(
            records=tuple(r for r in self.records if r.id in wanted),
            vocab_size=self.vocab_size,
            feature_dim=self.feature_dim,
            frame_seconds=self.frame_seconds,
            token_names=self.token_names,
        )


@dataclass(frozen=True)
class CorpusSpec:
    """Parameters for synthetic corpus generation."""

    n_utterances: int
    vocab_size: int
    feature_dim: int
    token_length_range: tuple[int, int] = (4, 12)
    noise_sigma_range: tuple[float, float] = (0.0, 0.5)
    frame_seconds: float = 0.5
    prototype_scale: float = 3.0

    def __post_init__(self) -> None:
        lo, hi = self.token_length_range
        slo, shi = self.noise_sigma_range
        if self.n_utterances < 0:
            raise ValueError("n_utterances must be >= 0")
        if self.vocab_size < 1 or self.feature_dim < 1:
            raise ValueError("vocab_size and feature_dim must be positive")
        if lo < 1 or hi < lo:
            raise ValueError(f"bad token_length_range {self.token_length_range}")
        if slo < 0 or shi < slo:
            raise ValueError(f"bad noise_sigma_range {self.noise_sigma_range}")
        if self.frame_seconds <= 0:
            raise ValueError("frame_seconds must be positive")
        if self.prototype_scale <= 0:
            raise ValueError("prototype_scale must be positive")


def class_prototypes(spec: CorpusSpec, seed: int) -> np.ndarray:
    """The (vocab_size, feature_dim) prototype matrix a generation seed implies.

    Rows are unit-norm Gaussian directions scaled by `prototype_scale`; in
    moderate dimension they are nearly orthogonal, so the classes are
    separable at low noise.
    """
    rng = derive_rng(seed, "prototypes")
    protos = rng.standard_normal((spec.vocab_size, spec.feature_dim))
    protos /= np.linalg.norm(protos, axis=1, keepdims=True)
    protos *= spec.prototype_scale
    protos.setflags(write=False)
    return protos


def generate_corpus(spec: CorpusSpec, seed: int) -> Corpus:
    """Generate a synthetic corpus, a pure function of (spec, seed).

    Token lengths are uniform over token_length_range, per-record noise
    levels uniform over noise_sigma_range, token ids uniform over the
    vocabulary, and frame t = prototype(token_t) + N(0, sigma^2 I).
    """
    protos = class_prototypes(spec, seed)
    rng = derive_rng(seed, "records")
    lo, hi = spec.token_length_range
    slo, shi = spec.noise_sigma_range
    records = []
    for i in range(spec.n_utterances):
        length = int(rng.integers(lo, hi + 1))
        sigma = float(rng.uniform(slo, shi))
        tokens = tuple(int(t) for t in rng.integers(0, spec.vocab_size, size=length))
        frames = protos[list(tokens)] + rng.standard_normal((length, spec.feature_dim)) * sigma
        frames.setflags(write=False)
        records.append(
            UtteranceRecord(
                id=f"utt-{i:06d}",
                duration_s=length * spec.frame_seconds,
                tokens=tokens,
                frames=frames,
                noise_sigma=sigma,
            )
        )
    return Corpus(
        records=tuple(records),
        vocab_size=spec.vocab_size,
        feature_dim=spec.feature_dim,
        frame_seconds=spec.frame_seconds,
    )


def segment_utterance(record: UtteranceRecord, max_duration_s: float) -> list[UtteranceRecord]:
    """Cut a record into consecutive chunks of at most `max_duration_s`.

    Chunk durations conserve the original duration exactly (their exact sum,
    math.fsum, reproduces duration_s bit-for-bit: the chunk layout is derived
    in rational arithmetic and only the remainder chunk is rounded once).
    Tokens (and frames) are split proportionally to chunk duration using
    cumulative rounding, so the total token count is conserved exactly and
    remainder tokens land in the last chunk. A record already short enough is
    returned unchanged in a singleton list. Chunk ids are `<parent id>-<k>`,
    1-based.
    """
    if max_duration_s <= 0:
        raise ValueError("max_duration_s must be positive")
    if record.duration_s <= max_duration_s:
        return [record]

    n_full = int(Fraction(record.duration_s) / Fraction(max_duration_s))
    remainder = float(Fraction(record.duration_s) - n_full * Fraction(max_duration_s))
    durations = [max_duration_s] * n_full
    if remainder > 0.0:
        durations.append(remainder)

    n_tokens = len(record.tokens)
    bounds = [0]
    cum = 0.0
    for dur in durations[:-1]:
        cum += dur
        cut = round(n_tokens * cum / record.duration_s)
        bounds.append(max(cut, bounds[-1]))
    bounds.append(n_tokens)

    chunks = []
    for k, (start, stop) in enumerate(zip(bounds, bounds[1:]), start=1):
        chunks.append(
            UtteranceRecord(
                id=f"{record.id}-{k}",
                duration_s=durations[k - 1],
                tokens=record.tokens[start:stop],
                frames=None if record.frames is None else record.frames[start:stop],
                noise_sigma=record.noise_sigma,
            )
        )
    return chunks


def segment_corpus(corpus: Corpus, max_duration_s: float) -> Corpus:
    """Apply segment_utterance to every record."""
    records: list[UtteranceRecord] = []
    for rec in corpus.records:
        records.extend(segment_utterance(rec, max_duration_s))
    return Corpus(
        records=tuple(records),
        vocab_size=corpus.vocab_size,
        feature_dim=corpus.feature_dim,
        frame_seconds=corpus.frame_seconds,
        token_names=corpus.token_names,
    )


MANIFEST_HEADER = ("id", "duration_s", "transcript")


def load_manifest(path: str | Path) -> Corpus:
    """Load a metadata-only corpus from a CSV manifest.

    Format: UTF-8 CSV with header `id,duration_s,transcript`; the transcript
    is a whitespace-separated sequence of token names. Token names are mapped
    to ids in sorted order. The resulting records have no frames.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ManifestError(f"{path}: empty file, expected header "
                                f"{','.join(MANIFEST_HEADER)}") from None
        if tuple(h.strip() for h in header) != MANIFEST_HEADER:
            raise ManifestError(
                f"{path}: bad header {header!r}, expected {','.join(MANIFEST_HEADER)}"
            )
        rows = []
        seen: set[str] = set()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ManifestError(f"{path}: row {lineno}: expected 3 fields, got {len(row)}")
            utt_id, dur_text, transcript = row
            if utt_id in seen:
                raise ManifestError(f"{path}: row {lineno}: duplicate id {utt_id!r}")
            seen.add(utt_id)
            try:
                duration = float(dur_text)
            except ValueError:
                raise ManifestError(
                    f"{path}: row {lineno}: unparseable duration {dur_text!r}"
                ) from None
            if not math.isfinite(duration) or duration <= 0:
                raise ManifestError(
                    f"{path}: row {lineno}: duration must be positive, got {dur_text!r}"
                )
            names = transcript.split()
            if not names:
                raise ManifestError(f"{path}: row {lineno}: empty transcript")
            rows.append((utt_id, duration, names))

    vocab = sorted({name for _, _, names in rows for name in names})
    index = {name: i for i, name in enumerate(vocab)}
    records = tuple(
        UtteranceRecord(
            id=utt_id,
            duration_s=duration,
            tokens=tuple(index[name] for name in names),
        )
        for utt_id, duration, names in rows
    )
    return Corpus(
        records=records,
        vocab_size=len(vocab),
        token_names=tuple(vocab) if vocab else None,
    )


def save_manifest(corpus: Corpus, path: str | Path) -> None:
    """Write the corpus metadata as a CSV manifest (frames are dropped)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for rec in corpus.records:
            transcript = " ".join(corpus.token_name(t) for t in rec.tokens)
            writer.writerow([rec.id, repr(rec.duration_s), transcript])


CORPUS_FORMAT = "curricula-corpus"
CORPUS_VERSION = 1


def save_corpus(
    corpus: Corpus,
    path: str | Path,
    spec: CorpusSpec | None = None,
    seed: int | None = None,
) -> None:
    """Persist a corpus (including frames) as JSON.

    Schema v1: top-level keys `format`, `version`, `spec`, `seed`,
    `vocab_size`, `feature_dim`, `frame_seconds`, `token_names`, `records`;
    each record has `id`, `duration_s`, `tokens`, `noise_sigma`, `frames`.
    Floats round-trip bit-exactly through JSON.
    """
    doc = {
        "format": CORPUS_FORMAT,
        "version": CORPUS_VERSION,
        "spec": None if spec is None else {
            "n_utterances": spec.n_utterances,
            "vocab_size": spec.vocab_size,
            "feature_dim": spec.feature_dim,
            "token_length_range": list(spec.token_length_range),
            "noise_sigma_range": list(spec.noise_sigma_range),
            "frame_seconds": spec.frame_seconds,
            "prototype_scale": spec.prototype_scale,
        },
        "seed": seed,
        "vocab_size": corpus.vocab_size,
        "feature_dim": corpus.feature_dim,
        "frame_seconds": corpus.frame_seconds,
        "token_names": None if corpus.token_names is None else list(corpus.token_names),
        "records": [
            {
                "id": rec.id,
                "duration_s": rec.duration_s,
                "tokens": list(rec.tokens),
                "noise_sigma": rec.noise_sigma,
                "frames": None if rec.frames is None else rec.frames.tolist(),
            }
            for rec in corpus.records
        ],
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")


def load_corpus(path: str | Path) -> Corpus:
    """Load a corpus persisted by save_corpus."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != CORPUS_FORMAT:
        raise ValueError(f"{path}: not a {CORPUS_FORMAT} file")
    if doc.get("version") != CORPUS_VERSION:
        raise ValueError(f"{path}: unsupported version {doc.get('version')}")
    records = []
    for row in doc["records"]:
        frames = row["frames"]
        if frames is not None:
            frames = np.asarray(frames, dtype=np.float64)
            if frames.size == 0:
                frames = frames.reshape(0, doc["feature_dim"] or 0)
            frames.setflags(write=False)
        records.append(
            UtteranceRecord(
                id=row["id"],
                duration_s=row["duration_s"],
                tokens=tuple(row["tokens"]),
                frames=frames,
                noise_sigma=row["noise_sigma"],
            )
        )
    names = doc.get("token_names")
    return Corpus(
        records=tuple(records),
        vocab_size=doc["vocab_size"],
        feature_dim=doc["feature_dim"],
        frame_seconds=doc["frame_seconds"],
        token_names=None if names is None else tuple(names),
    )
