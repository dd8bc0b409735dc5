"""Acceptance suite: one test per release criterion, each printing a
pass/fail line (run with `pytest tests/test_acceptance.py -v -s`).

Numbers anchored to external references are direction or bracket checks;
everything else is verified against independent oracles computed here
(series summation, exhaustive edit-script search, central finite
differences, permutation counting).
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from curricula import (
    CorpusSpec,
    Corpus,
    CostParams,
    EpochPlan,
    ExperimentConfig,
    PacingParams,
    PairedErrorSample,
    Strategy,
    StrategyKind,
    StrategyRun,
    ToyModel,
    TrainConfig,
    UtteranceRecord,
    build_schedule,
    edit_distance,
    example_loss,
    hours_seen,
    mapsswe,
    padding_cost,
    run_experiment,
    segment_utterance,
    uniform_mix,
    wall_cost,
)
from curricula.learner import Gradients
from curricula.pacing import DISABLED_PACING
from curricula.scoring import mix_section_sizes


def _report_pass(criterion: int, description: str, started: float) -> None:
    print(f"[acceptance] criterion {criterion}: PASS "
          f"({time.perf_counter() - started:.2f}s) - {description}")


# --- criterion 1: pacing arithmetic -----------------------------------------

def test_criterion_1_pacing_hours_ratio():
    started = time.perf_counter()
    schedule = build_schedule(15, PacingParams())  # 0.2, 1.71, step 5, M=1
    ratio = hours_seen(schedule, 1.0) / hours_seen(build_schedule(15, DISABLED_PACING), 1.0)
    # oracle: direct summation of the clamped geometric series, final epoch full
    oracle = (sum(min(1.0, 0.2 * 1.71 ** (i / 5)) for i in range(1, 15)) + 1.0) / 15.0
    assert abs(ratio - oracle) < 1e-12
    assert 0.46 <= ratio <= 0.62
    _report_pass(1, f"15-epoch paced hours ratio {ratio:.4f} in [0.46, 0.62]", started)


# --- criterion 2: sorted-order padding optimality ----------------------------

def test_criterion_2_sorted_padding_is_optimal():
    started = time.perf_counter()
    rng = np.random.default_rng(2024)
    for corpus_index in range(20):
        durations = {f"u{i:03d}": float(d)
                     for i, d in enumerate(rng.uniform(0.3, 12.0, size=512))}
        ids_sorted = sorted(durations, key=lambda i: durations[i])
        best = padding_cost(ids_sorted, durations, batch_size=32)
        overheads = []
        for _ in range(200):
            perm = [ids_sorted[i] for i in rng.permutation(512)]
            report = padding_cost(perm, durations, batch_size=32)
            assert best.padded_seconds <= report.padded_seconds
            assert report.padding_overhead >= 0.0
            overheads.append(report.padded_seconds / best.padded_seconds - 1.0)
        assert np.mean(overheads) > 0.0
    _report_pass(2, "duration-sorted padding minimal over 20x200 sampled orders; "
                    "shuffle overhead positive", started)


# --- criterion 3: paced wall-cost direction ----------------------------------

def test_criterion_3_paced_wall_cost_negative():
    started = time.perf_counter()
    # a segmented corpus: long recordings cut at 10 s, so most chunks sit at
    # the cap with a short remainder tail (the realistic duration shape)
    rng = np.random.default_rng(77)
    records = []
    for i, d in enumerate(rng.uniform(8.0, 35.0, size=160)):
        parent = UtteranceRecord(id=f"u{i:03d}", duration_s=float(d),
                                 tokens=(0,) * max(1, int(d)))
        records.extend(segment_utterance(parent, 10.0))
    corpus = Corpus(records=tuple(records), vocab_size=1)
    paced = build_schedule(15, PacingParams())
    params = CostParams(batch_size=32)
    ws_m = wall_cost(Strategy(StrategyKind.WER_SCORE_MIXED), paced, corpus, params)
    t_ws_m = wall_cost(Strategy(StrategyKind.TRANSFER_WER_MIXED), paced, corpus, params)
    assert ws_m.overhead_vs_baseline < 0.0
    assert t_ws_m.overhead_vs_baseline < 0.0
    _report_pass(3, f"paced WS-M {100 * ws_m.overhead_vs_baseline:.1f}% / paced T-WS-M "
                    f"{100 * t_ws_m.overhead_vs_baseline:.1f}% vs baseline", started)


# --- criterion 4: edit-distance oracle equivalence ---------------------------

def _brute_force_distance(ref, hyp) -> int:
    def explore(i, j):
        if i == len(ref) and j == len(hyp):
            return 0
        best = math.inf
        if i < len(ref) and j < len(hyp):
            best = min(best, explore(i + 1, j + 1) + (ref[i] != hyp[j]))
        if i < len(ref):
            best = min(best, explore(i + 1, j) + 1)
        if j < len(hyp):
            best = min(best, explore(i, j + 1) + 1)
        return best

    return explore(0, 0)


def test_criterion_4_edit_distance_matches_brute_force():
    started = time.perf_counter()
    rng = np.random.default_rng(4)
    for _ in range(500):
        ref = list(rng.integers(0, 3, size=rng.integers(0, 7)))
        hyp = list(rng.integers(0, 3, size=rng.integers(0, 7)))
        counts = edit_distance(ref, hyp)
        assert counts.distance == _brute_force_distance(ref, hyp)
        assert counts.substitutions + counts.deletions + counts.insertions == counts.distance
    _report_pass(4, "500 random pairs match exhaustive edit-script search", started)


# --- criterion 5: gradient check ---------------------------------------------

def _fd_gradients(model: ToyModel, record: UtteranceRecord, h: float) -> Gradients:
    def loss_at(weights, bias):
        return example_loss(ToyModel(weights=weights, bias=bias), record)[0]

    dw = np.zeros_like(model.weights)
    for i in range(model.vocab_size):
        for j in range(model.feature_dim):
            up, down = model.weights.copy(), model.weights.copy()
            up[i, j] += h
            down[i, j] -= h
            dw[i, j] = (loss_at(up, model.bias) - loss_at(down, model.bias)) / (2 * h)
    db = np.zeros_like(model.bias)
    for i in range(model.vocab_size):
        up, down = model.bias.copy(), model.bias.copy()
        up[i] += h
        down[i] -= h
        db[i] = (loss_at(model.weights, up) - loss_at(model.weights, down)) / (2 * h)
    return Gradients(weights=dw, bias=db)


def test_criterion_5_gradients_match_finite_differences():
    started = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = 0.0
    for case in range(100):
        vocab = int(rng.integers(2, 6))
        dim = int(rng.integers(2, 6))
        length = int(rng.integers(1, 8))
        model = ToyModel(weights=rng.standard_normal((vocab, dim)) * 0.5,
                         bias=rng.standard_normal(vocab) * 0.5)
        record = UtteranceRecord(
            id=f"g{case}", duration_s=1.0,
            tokens=tuple(int(t) for t in rng.integers(0, vocab, size=length)),
            frames=rng.standard_normal((length, dim)),
        )
        _, analytic = example_loss(model, record)
        fd = _fd_gradients(model, record, h=1e-5)
        num = max(np.abs(analytic.weights - fd.weights).max(),
                  np.abs(analytic.bias - fd.bias).max())
        den = max(np.abs(analytic.weights).max(), np.abs(fd.weights).max(),
                  np.abs(analytic.bias).max(), np.abs(fd.bias).max())
        worst = max(worst, num / den)
    assert worst < 1e-5
    _report_pass(5, f"100 random cases, max relative error {worst:.2e} < 1e-5", started)


# --- criterion 6: mixing invariants ------------------------------------------

def test_criterion_6_mixing_invariants():
    started = time.perf_counter()
    rng = np.random.default_rng(6)
    for _ in range(1000):
        n = int(rng.integers(3, 300))
        seed = int(rng.integers(1 << 62))
        plan = EpochPlan(epoch=1, ordered_ids=tuple(f"u{i:04d}" for i in range(n)))
        mixed = uniform_mix(plan, 0.2, seed)
        assert sorted(mixed.ordered_ids) == sorted(plan.ordered_ids)
        easy_n = mix_section_sizes(n)[0]
        k = math.floor(0.2 * easy_n)
        moved = [i for i, (a, b) in enumerate(zip(plan.ordered_ids, mixed.ordered_ids))
                 if a != b]
        assert len([i for i in moved if i < easy_n]) == k
        assert len(moved) == 2 * k
        # every displaced id travelled between easy and medium/hard: no
        # medium<->hard trades
        position = {uid: i for i, uid in enumerate(plan.ordered_ids)}
        for dst, uid in enumerate(mixed.ordered_ids):
            src = position[uid]
            if src != dst:
                assert src < easy_n or dst < easy_n
        assert uniform_mix(plan, 0.0, seed).ordered_ids == plan.ordered_ids
    _report_pass(6, "1000 cases: permutation, floor(0.2*ceil(n/3)) easy moves, "
                    "no medium/hard trades, zero-fraction identity", started)


# --- criterion 7: MAPSSWE ----------------------------------------------------

def test_criterion_7_mapsswe():
    started = time.perf_counter()
    ids = ("a", "b", "c", "d")
    zero = mapsswe(PairedErrorSample(ids, (1, 2, 0, 3), (1, 2, 0, 3)))
    assert zero.z == 0.0 and zero.p_two_sided == 1.0
    sample = PairedErrorSample(ids, (1, 2, 3, 4), (0, 0, 0, 0))
    fwd = mapsswe(sample)
    rev = mapsswe(sample.swapped())
    assert rev.z == -fwd.z and rev.p_two_sided == fwd.p_two_sided
    assert abs(fwd.z - 3.873) < 1e-3
    _report_pass(7, f"zero-diff (0, 1), antisymmetry, z = {fwd.z:.4f} ~ 3.873", started)


# --- criteria 8 and 9: end-to-end experiment and determinism -----------------

SMOKE_SPEC = CorpusSpec(
    n_utterances=2000,
    vocab_size=12,
    feature_dim=16,
    token_length_range=(4, 12),
    noise_sigma_range=(0.0, 0.6),
    frame_seconds=0.5,
    prototype_scale=3.0,
)

SMOKE_STRATEGIES = (
    StrategyRun(Strategy(StrategyKind.DURATION_BASELINE)),
    StrategyRun(Strategy(StrategyKind.RANDOM_SHUFFLE)),
    StrategyRun(Strategy(StrategyKind.WER_SCORE_MIXED)),
    StrategyRun(Strategy(StrategyKind.WER_SCORE_MIXED), pacing=PacingParams()),
)

REPORT_FILES = ("results.csv", "curves.csv", "overhead.csv", "hours_seen.csv",
                "significance.csv", "report.json", "run_manifest.json")


def _smoke_config(out_dir: Path) -> ExperimentConfig:
    return ExperimentConfig(
        corpus_spec=SMOKE_SPEC,
        strategies=SMOKE_STRATEGIES,
        train=TrainConfig(learning_rate=0.5, n_epochs=10),
        n_seeds=3,
        master_seed=20260810,
        out_dir=str(out_dir),
    )


@pytest.fixture(scope="module")
def smoke_runs(tmp_path_factory):
    """The criterion-8 experiment, run twice with the same master seed."""
    base = tmp_path_factory.mktemp("smoke")
    elapsed = []
    reports = []
    for name in ("first", "second"):
        out = base / name
        t0 = time.perf_counter()
        reports.append(run_experiment(_smoke_config(out)))
        elapsed.append(time.perf_counter() - t0)
    return base, reports, elapsed


def test_criterion_8_end_to_end_smoke(smoke_runs):
    started = time.perf_counter()
    base, (report, _), elapsed = smoke_runs
    # one CPU core drives 12 (strategy, seed) runs; well under 5 min per seed
    assert elapsed[0] < 300.0

    out = base / "first"
    for name in REPORT_FILES:
        assert (out / name).exists(), f"missing report file {name}"
    curve_rows = (out / "curves.csv").read_text().strip().splitlines()
    assert len(curve_rows) - 1 == 4 * 3 * 10

    labels = [res.label for res in report.strategies]
    assert labels == ["Baseline", "RS", "WS-M", "(Paced) WS-M"]
    for res in report.strategies:
        for seed in res.seeds:
            assert seed.completed, f"{res.label} seed {seed.seed_index}: {seed.error}"
            assert seed.plans_valid
            assert len(seed.epochs) == 10
        untrained = np.mean([s.untrained_valid_wer for s in res.seeds])
        assert res.valid_wer_mean < untrained, res.label

    # adaptive curricula actually adapt after the first epoch
    for label in ("WS-M", "(Paced) WS-M"):
        for seed in report.strategy(label).seeds:
            assert seed.epochs[0].plan_digest != seed.epochs[1].plan_digest

    # transfer curricula are static: same plan at every epoch
    transfer_config = ExperimentConfig(
        corpus_spec=CorpusSpec(n_utterances=300, vocab_size=8, feature_dim=10,
                               token_length_range=(3, 9),
                               noise_sigma_range=(0.0, 0.5)),
        strategies=(StrategyRun(Strategy(StrategyKind.TRANSFER_WER_MIXED)),),
        train=TrainConfig(learning_rate=0.5, n_epochs=4),
        n_seeds=1,
        master_seed=20260810,
    )
    transfer_report = run_experiment(transfer_config)
    transfer_seed = transfer_report.strategies[0].seeds[0]
    assert transfer_seed.completed
    assert len({e.plan_digest for e in transfer_seed.epochs}) == 1

    _report_pass(8, f"3 seeds x 4 strategies in {elapsed[0]:.1f}s; files emitted, "
                    "plans valid, adaptive plans change, transfer plans static, "
                    "all final WERs beat the untrained model", started)


def test_criterion_9_reruns_are_byte_identical(smoke_runs):
    started = time.perf_counter()
    base, _, _ = smoke_runs
    first, second = base / "first", base / "second"
    names = sorted(p.name for p in first.iterdir() if p.is_file())
    assert set(REPORT_FILES) <= set(names)
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
    score_names = sorted(p.name for p in (first / "scores").iterdir())
    for name in score_names:
        assert ((first / "scores" / name).read_bytes()
                == (second / "scores" / name).read_bytes()), name
    _report_pass(9, f"{len(names) + len(score_names)} emitted files byte-identical "
                    "across reruns", started)
