"""A deterministic toy sequence learner trained by SGD with gradient
accumulation.

The model is a linear per-frame softmax classifier: frame t gets logits
W @ x_t + b and the example loss is the mean per-frame negative log
likelihood of the reference tokens. It exists to supply the feedback signal
the adaptive curricula consume (per-example losses, decode WERs and
confidences), and being convex it makes every numerical property exactly
checkable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Literal, Sequence

import numpy as np

from .corpus import Corpus, UtteranceRecord
from .metrics import expand_chars, levenshtein
from .scoring import EpochPlan, ScoreEntry, ScoreTable


class NonFiniteLossError(RuntimeError):
    """Raised when training hits a NaN/inf loss; names the utterance."""


@dataclass(frozen=True, eq=False)
class ToyModel:
    """Per-token class weights (vocab_size, feature_dim) and bias (vocab_size,)."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self) -> None:
        if self.weights.ndim != 2 or self.bias.ndim != 1:
            raise ValueError("weights must be 2-D and bias 1-D")
        if self.weights.shape[0] != self.bias.shape[0]:
            raise ValueError("weights and bias disagree on vocab size")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise ValueError("model parameters must be finite")

    @property
    def vocab_size(self) -> int:
        return self.weights.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.weights.shape[1]

    @classmethod
    def zeros(cls, vocab_size: int, feature_dim: int) -> "ToyModel":
        return cls(weights=np.zeros((vocab_size, feature_dim)),
                   bias=np.zeros(vocab_size))

    @classmethod
    def random(cls, vocab_size: int, feature_dim: int, seed: int,
               scale: float = 0.01) -> "ToyModel":
        rng = np.random.default_rng(seed)
        return cls(weights=rng.standard_normal((vocab_size, feature_dim)) * scale,
                   bias=rng.standard_normal(vocab_size) * scale)


@dataclass(frozen=True)
class Gradients:
    """Model-shaped tangent: d(loss)/dW and d(loss)/db."""

    weights: np.ndarray
    bias: np.ndarray


@dataclass(frozen=True)
class TrainConfig:
    """SGD settings. micro_batch * accumulation_steps is the effective batch
    (32 with the defaults): gradients accumulate over accumulation_steps
    micro-batches and a single update applies their mean."""

    learning_rate: float
    n_epochs: int
    micro_batch: int = 8
    accumulation_steps: int = 4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.n_epochs < 1 or self.micro_batch < 1 or self.accumulation_steps < 1:
            raise ValueError("n_epochs, micro_batch and accumulation_steps must be >= 1")

    @property
    def effective_batch(self) -> int:
        return self.micro_batch * self.accumulation_steps


@dataclass(frozen=True)
class ExampleFeedback:
    """Per-example training feedback. wer/cer/confidence are None when the
    epoch collected losses only."""

    utterance_id: str
    loss: float
    wer: float | None = None
    cer: float | None = None
    confidence: float | None = None


def _log_probs(weights: np.ndarray, bias: np.ndarray, frames: np.ndarray) -> np.ndarray:
    """Row-wise log-softmax of the per-frame logits, numerically stable."""
    logits = frames @ weights.T + bias
    shift = logits.max(axis=1, keepdims=True)
    lse = np.log(np.exp(logits - shift).sum(axis=1, keepdims=True)) + shift
    return logits - lse


def _mean_nll(logp: np.ndarray, tokens: Sequence[int]) -> float:
    nll = -logp[np.arange(len(tokens)), list(tokens)]
    # Mean taken relative to the first frame: uniform per-frame losses (the
    # zero model gives ln(vocab) on every frame) reproduce that value
    # bit-exactly instead of drifting an ulp in the division.
    return float(nll[0] + np.mean(nll - nll[0]))


def _check_record(model: ToyModel, record: UtteranceRecord) -> np.ndarray:
    if record.frames is None:
        raise ValueError(f"utterance {record.id!r} has no feature frames")
    if not record.tokens:
        raise ValueError(f"utterance {record.id!r} has no tokens")
    if record.frames.shape[1] != model.feature_dim:
        raise ValueError(
            f"utterance {record.id!r}: frame dim {record.frames.shape[1]} "
            f"!= model feature_dim {model.feature_dim}"
        )
    if max(record.tokens) >= model.vocab_size:
        raise ValueError(f"utterance {record.id!r}: token id outside the model vocabulary")
    return record.frames


def example_loss(model: ToyModel, record: UtteranceRecord) -> tuple[float, Gradients]:
    """Mean per-frame NLL of the reference tokens plus its exact gradient.

    loss = -(1/T) sum_t log softmax(W x_t + b)[y_t]; the gradient in the
    logits is (softmax - onehot)/T, pushed through the linear map.
    """
    frames = _check_record(model, record)
    logp = _log_probs(model.weights, model.bias, frames)
    loss = _mean_nll(logp, record.tokens)
    g = np.exp(logp)
    g[np.arange(len(record.tokens)), list(record.tokens)] -= 1.0
    g /= len(record.tokens)
    return loss, Gradients(weights=g.T @ frames, bias=g.sum(axis=0))


@dataclass(frozen=True)
class DecodeResult:
    tokens: tuple[int, ...]
    confidence: float


def decode(model: ToyModel, record: UtteranceRecord) -> DecodeResult:
    """Greedy per-frame argmax decode.

    Ties break toward the lower token id. The confidence is the geometric
    mean of the decoded tokens' probabilities, always in (0, 1].
    """
    frames = _check_record(model, record)
    logp = _log_probs(model.weights, model.bias, frames)
    return _decode_from_logp(logp)


def _decode_from_logp(logp: np.ndarray) -> DecodeResult:
    hyp = logp.argmax(axis=1)
    conf = float(np.exp(np.mean(logp[np.arange(len(hyp)), hyp])))
    return DecodeResult(tokens=tuple(int(t) for t in hyp), confidence=conf)


def example_feedback(model: ToyModel, record: UtteranceRecord,
                     token_namer: Callable[[int], str] = str) -> ExampleFeedback:
    """Loss, decode WER/CER and confidence for one record (no gradient)."""
    frames = _check_record(model, record)
    logp = _log_probs(model.weights, model.bias, frames)
    dec = _decode_from_logp(logp)
    ref_chars = expand_chars([token_namer(t) for t in record.tokens])
    hyp_chars = expand_chars([token_namer(t) for t in dec.tokens])
    return ExampleFeedback(
        utterance_id=record.id,
        loss=_mean_nll(logp, record.tokens),
        wer=levenshtein(record.tokens, dec.tokens) / len(record.tokens),
        cer=levenshtein(ref_chars, hyp_chars) / len(ref_chars),
        confidence=dec.confidence,
    )


CollectMode = Literal["loss-only", "loss+metric"]


def train_epoch(
    model: ToyModel,
    plan: EpochPlan,
    corpus: Corpus,
    config: TrainConfig,
    collect: CollectMode = "loss-only",
) -> tuple[ToyModel, ScoreTable, list[ExampleFeedback]]:
    """One pass over the plan in micro-batches with gradient accumulation.

    Parameters stay frozen across each accumulation window (accumulation_steps
    micro-batches); one SGD step then applies the mean example gradient of
    the window. Each example's loss — and with collect="loss+metric" its
    decode WER/CER/confidence — is recorded as measured when visited, i.e.
    against the parameters in effect at that moment.

    Returns the updated model, the score table the scoring module consumes
    for the next epoch (primary score: loss, or WER when metrics were
    collected), and the per-example feedback in visit order.
    """
    missing = [i for i in plan.ordered_ids if i not in corpus.by_id]
    if missing:
        raise ValueError(f"plan references unknown utterances: {missing[:5]}")
    weights = model.weights.copy()
    bias = model.bias.copy()
    window = config.micro_batch * config.accumulation_steps
    with_metric = collect == "loss+metric"

    feedback: list[ExampleFeedback] = []
    entries: dict[str, ScoreEntry] = {}
    for start in range(0, len(plan.ordered_ids), window):
        sum_dw = np.zeros_like(weights)
        sum_db = np.zeros_like(bias)
        count = 0
        for utt_id in plan.ordered_ids[start:start + window]:
            rec = corpus.by_id[utt_id]
            frames = _check_record(model, rec)
            logp = _log_probs(weights, bias, frames)
            loss = _mean_nll(logp, rec.tokens)
            if not math.isfinite(loss):
                raise NonFiniteLossError(
                    f"non-finite loss for utterance {utt_id!r} at epoch {plan.epoch}"
                )
            g = np.exp(logp)
            g[np.arange(len(rec.tokens)), list(rec.tokens)] -= 1.0
            g /= len(rec.tokens)
            sum_dw += g.T @ frames
            sum_db += g.sum(axis=0)
            count += 1

            if with_metric:
                dec = _decode_from_logp(logp)
                ref_chars = expand_chars([corpus.token_name(t) for t in rec.tokens])
                hyp_chars = expand_chars([corpus.token_name(t) for t in dec.tokens])
                fb = ExampleFeedback(
                    utterance_id=utt_id,
                    loss=loss,
                    wer=levenshtein(rec.tokens, dec.tokens) / len(rec.tokens),
                    cer=levenshtein(ref_chars, hyp_chars) / len(ref_chars),
                    confidence=dec.confidence,
                )
            else:
                fb = ExampleFeedback(utterance_id=utt_id, loss=loss)
            feedback.append(fb)
            entries[utt_id] = ScoreEntry(
                utterance_id=utt_id,
                primary_score=fb.wer if with_metric else fb.loss,
                confidence=fb.confidence,
                duration_s=rec.duration_s,
            )
        weights -= config.learning_rate * (sum_dw / count)
        bias -= config.learning_rate * (sum_db / count)

    table = ScoreTable(epoch=plan.epoch, entries=entries,
                       score_kind="wer" if with_metric else "loss")
    return ToyModel(weights=weights, bias=bias), table, feedback


@dataclass(frozen=True)
class EvalResult:
    """Corpus-level error rates: total edit distance over total reference
    length (not the mean of per-utterance rates)."""

    wer: float
    cer: float
    per_example: tuple[ExampleFeedback, ...]

    @property
    def mean_loss(self) -> float:
        return float(np.mean([fb.loss for fb in self.per_example]))


def evaluate(model: ToyModel, corpus: Corpus) -> EvalResult:
    """Decode every record and aggregate WER/CER at the corpus level."""
    if not corpus.records:
        raise ValueError("cannot evaluate on an empty corpus")
    word_dist = word_total = char_dist = char_total = 0
    per_example = []
    for rec in corpus.records:
        frames = _check_record(model, rec)
        logp = _log_probs(model.weights, model.bias, frames)
        dec = _decode_from_logp(logp)
        ref_chars = expand_chars([corpus.token_name(t) for t in rec.tokens])
        hyp_chars = expand_chars([corpus.token_name(t) for t in dec.tokens])
        w = levenshtein(rec.tokens, dec.tokens)
        c = levenshtein(ref_chars, hyp_chars)
        word_dist += w
        word_total += len(rec.tokens)
        char_dist += c
        char_total += len(ref_chars)
        per_example.append(
            ExampleFeedback(
                utterance_id=rec.id,
                loss=_mean_nll(logp, rec.tokens),
                wer=w / len(rec.tokens),
                cer=c / len(ref_chars),
                confidence=dec.confidence,
            )
        )
    return EvalResult(wer=word_dist / word_total, cer=char_dist / char_total,
                      per_example=tuple(per_example))


def word_errors(model: ToyModel, corpus: Corpus) -> dict[str, int]:
    """Per-utterance word edit distances, the unit MAPSSWE compares."""
    out = {}
    for rec in corpus.records:
        frames = _check_record(model, rec)
        logp = _log_probs(model.weights, model.bias, frames)
        dec = _decode_from_logp(logp)
        out[rec.id] = levenshtein(rec.tokens, dec.tokens)
    return out


def train_teacher(corpus: Corpus, config: TrainConfig) -> ToyModel:
    """Train a duration-baseline model to serve as the transfer teacher.

    Starts from zero weights and presents the corpus in duration order for
    config.n_epochs; fully deterministic in (corpus, config).
    """
    from .scoring import Strategy, StrategyKind, epoch_order

    if not corpus.has_frames:
        raise ValueError("teacher training needs a corpus with feature frames")
    strategy = Strategy(kind=StrategyKind.DURATION_BASELINE)
    model = ToyModel.zeros(corpus.vocab_size, corpus.feature_dim)
    for epoch in range(1, config.n_epochs + 1):
        plan = epoch_order(strategy, corpus, None, epoch, config.seed)
        model, _, _ = train_epoch(model, plan, corpus, config, "loss-only")
    return model


MODEL_FORMAT = "curricula-model"
MODEL_VERSION = 1


def save_model(model: ToyModel, path: str | Path) -> None:
    """Write a versioned checkpoint; weights stored row-major at full
    precision (JSON floats round-trip bit-exactly)."""
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "vocab_size": model.vocab_size,
        "feature_dim": model.feature_dim,
        "weights": [float(v) for v in model.weights.reshape(-1)],
        "bias": [float(v) for v in model.bias],
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")


def load_model(path: str | Path) -> ToyModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a {MODEL_FORMAT} file")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported version {doc.get('version')}")
    vocab, dim = doc["vocab_size"], doc["feature_dim"]
    weights = np.asarray(doc["weights"], dtype=np.float64).reshape(vocab, dim)
    bias = np.asarray(doc["bias"], dtype=np.float64)
    return ToyModel(weights=weights, bias=bias)
