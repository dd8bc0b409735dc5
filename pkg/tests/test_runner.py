import json
import math

import numpy as np
import pytest

from curricula import (
    CorpusSpec,
    ExperimentConfig,
    PacingParams,
    Strategy,
    StrategyKind,
    StrategyRun,
    TrainConfig,
    compare_strategies,
    emit_report,
    load_config,
    load_report,
    run_experiment,
)
from curricula.runner import (
    EpochStats,
    RunReport,
    SeedResult,
    StrategyResult,
    config_from_dict,
    report_from_dict,
    report_to_dict,
    split_corpus,
)
from curricula.scoring import read_score_cache
from curricula.timecost import OverheadReport
from curricula import generate_corpus


SMALL_SPEC = CorpusSpec(n_utterances=120, vocab_size=8, feature_dim=10,
                        token_length_range=(3, 9), noise_sigma_range=(0.0, 0.5))


def small_config(**overrides):
    base = dict(
        corpus_spec=SMALL_SPEC,
        strategies=(StrategyRun(Strategy(StrategyKind.DURATION_BASELINE)),),
        train=TrainConfig(learning_rate=0.5, n_epochs=2),
        n_seeds=1,
        master_seed=5,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_split_is_disjoint_and_seeded():
    corpus = generate_corpus(SMALL_SPEC, seed=1)
    train, valid, test = split_corpus(corpus, 0.1, 0.1, seed=3)
    ids = [set(r.id for r in c) for c in (train, valid, test)]
    assert not (ids[0] & ids[1]) and not (ids[0] & ids[2]) and not (ids[1] & ids[2])
    assert len(train) + len(valid) + len(test) == len(corpus)
    train2, _, test2 = split_corpus(corpus, 0.1, 0.1, seed=3)
    assert [r.id for r in train2] == [r.id for r in train]
    assert [r.id for r in test2] == [r.id for r in test]


def test_null_training_smoke_case():
    # n_seeds=1, one epoch, full data, lr=0: valid WER equals the untrained
    # model's WER and the report is well-formed.
    config = small_config(train=TrainConfig(learning_rate=0.0, n_epochs=1))
    report = run_experiment(config)
    res = report.strategies[0]
    seed = res.seeds[0]
    assert seed.completed
    assert seed.epochs[0].valid_wer == seed.untrained_valid_wer
    assert res.valid_wer_std == 0.0  # single seed reports zero spread
    assert len(seed.epochs) == 1
    assert report.n_seeds == 1


def test_experiment_is_deterministic_in_memory():
    config = small_config(
        strategies=(
            StrategyRun(Strategy(StrategyKind.DURATION_BASELINE)),
            StrategyRun(Strategy(StrategyKind.SEQ2SEQ_LOSS_MIXED)),
        ),
        n_seeds=2,
    )
    a = run_experiment(config)
    b = run_experiment(config)
    assert report_to_dict(a) == report_to_dict(b)


def test_emitted_files_are_byte_identical(tmp_path):
    def run_into(out):
        config = small_config(
            strategies=(
                StrategyRun(Strategy(StrategyKind.DURATION_BASELINE)),
                StrategyRun(Strategy(StrategyKind.WER_SCORE_MIXED)),
            ),
            n_seeds=2,
            out_dir=str(out),
        )
        run_experiment(config)

    run_into(tmp_path / "a")
    run_into(tmp_path / "b")
    names = sorted(p.name for p in (tmp_path / "a").iterdir() if p.is_file())
    assert names == ["curves.csv", "hours_seen.csv", "overhead.csv", "report.json",
                     "results.csv", "run_manifest.json", "significance.csv"]
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    score_files = sorted(p.name for p in (tmp_path / "a" / "scores").iterdir())
    for name in score_files:
        assert ((tmp_path / "a" / "scores" / name).read_bytes()
                == (tmp_path / "b" / "scores" / name).read_bytes())


def test_adaptive_plans_change_after_epoch_one():
    config = small_config(
        strategies=(StrategyRun(Strategy(StrategyKind.WER_SCORE_MIXED)),),
        train=TrainConfig(learning_rate=0.5, n_epochs=3),
    )
    report = run_experiment(config)
    digests = [e.plan_digest for e in report.strategies[0].seeds[0].epochs]
    assert digests[0] != digests[1]


def test_transfer_plans_are_epoch_invariant():
    config = small_config(
        strategies=(StrategyRun(Strategy(StrategyKind.TRANSFER_WER_MIXED)),),
        train=TrainConfig(learning_rate=0.5, n_epochs=3),
    )
    report = run_experiment(config)
    digests = [e.plan_digest for e in report.strategies[0].seeds[0].epochs]
    assert len(set(digests)) == 1


def test_static_strategies_keep_one_plan():
    config = small_config(
        strategies=(
            StrategyRun(Strategy(StrategyKind.DURATION_BASELINE)),
            StrategyRun(Strategy(StrategyKind.RANDOM_SHUFFLE)),
        ),
        train=TrainConfig(learning_rate=0.5, n_epochs=3),
    )
    report = run_experiment(config)
    for res in report.strategies:
        digests = {e.plan_digest for e in res.seeds[0].epochs}
        assert len(digests) == 1


def test_paced_run_sees_fewer_hours():
    config = small_config(
        strategies=(
            StrategyRun(Strategy(StrategyKind.DURATION_BASELINE)),
            StrategyRun(Strategy(StrategyKind.DURATION_BASELINE),
                        pacing=PacingParams()),
        ),
        train=TrainConfig(learning_rate=0.5, n_epochs=6),
    )
    report = run_experiment(config)
    unpaced, paced = report.strategies
    assert paced.label == "(Paced) Baseline"
    assert paced.hours_seen_expected < unpaced.hours_seen_expected
    assert paced.hours_seen_actual_mean < unpaced.hours_seen_actual_mean
    assert paced.seeds[0].epochs[0].subset_size < len(
        unpaced.seeds[0].epochs[0].plan_digest
    ) or paced.seeds[0].epochs[0].subset_size < unpaced.seeds[0].epochs[0].subset_size
    # last epoch always sees the whole training set
    assert paced.seeds[0].epochs[-1].subset_size == unpaced.seeds[0].epochs[-1].subset_size


def test_every_dispatch_path_in_one_experiment():
    # all eight kinds plus the reshuffle and sparse-refresh variants, checked
    # by their plan-evolution signatures
    config = small_config(
        strategies=(
            StrategyRun(Strategy(StrategyKind.DURATION_BASELINE)),
            StrategyRun(Strategy(StrategyKind.RANDOM_SHUFFLE)),
            StrategyRun(Strategy(StrategyKind.RANDOM_SHUFFLE, reshuffle_each_epoch=True),
                        label="RS-reshuffle"),
            StrategyRun(Strategy(StrategyKind.SEQ2SEQ_LOSS)),
            StrategyRun(Strategy(StrategyKind.WER_SCORE)),
            StrategyRun(Strategy(StrategyKind.SEQ2SEQ_LOSS_MIXED)),
            StrategyRun(Strategy(StrategyKind.TRANSFER_WER_MIXED)),
            StrategyRun(Strategy(StrategyKind.TRANSFER_LOSS_MIXED),
                        pacing=PacingParams(refresh_every=3)),
        ),
        train=TrainConfig(learning_rate=0.5, n_epochs=5),
    )
    report = run_experiment(config)
    assert all(s.completed for r in report.strategies for s in r.seeds)
    digests = {r.label: [e.plan_digest for e in r.seeds[0].epochs]
               for r in report.strategies}
    # static plans for the baseline, plain RS and unpaced transfer
    for label in ("Baseline", "RS", "T-WS-M"):
        assert len(set(digests[label])) == 1, label
    # reshuffling and adaptive feedback change the plan every epoch
    for label in ("RS-reshuffle", "S2S", "WS", "S2S-M"):
        assert len(set(digests[label])) == 5, label
    # epoch 1 of the unmixed adaptive kinds falls back to the duration order
    assert digests["S2S"][0] == digests["Baseline"][0]
    assert digests["WS"][0] == digests["Baseline"][0]
    # paced transfer with M=3 reuses the subset (and plan) between refreshes
    paced = digests["(Paced) T-S2S-M"]
    assert paced[0] == paced[1] and paced[2] == paced[3]
    assert paced[1] != paced[2] and paced[3] != paced[4]


def test_incomplete_seed_is_recorded_not_fatal():
    # an absurd learning rate overflows the logits and aborts the seed
    config = small_config(
        train=TrainConfig(learning_rate=1e308, n_epochs=3),
        strategies=(StrategyRun(Strategy(StrategyKind.DURATION_BASELINE)),),
    )
    with np.errstate(all="ignore"):
        report = run_experiment(config)
    seed = report.strategies[0].seeds[0]
    assert not seed.completed
    assert "NonFiniteLossError" in seed.error
    assert math.isnan(report.strategies[0].valid_wer_mean)


def test_significance_rows_cover_strategy_pairs():
    config = small_config(
        strategies=(
            StrategyRun(Strategy(StrategyKind.DURATION_BASELINE)),
            StrategyRun(Strategy(StrategyKind.RANDOM_SHUFFLE)),
            StrategyRun(Strategy(StrategyKind.SEQ2SEQ_LOSS)),
        ),
        n_seeds=2,
    )
    report = run_experiment(config)
    pairs = {(r.strategy_a, r.strategy_b) for r in report.significance}
    assert pairs == {("Baseline", "RS"), ("Baseline", "S2S"), ("RS", "S2S")}
    assert len(report.significance) == 3 * 2  # pairs x seeds
    for row in report.significance:
        assert 0.0 <= row.p <= 1.0


def test_compare_report_to_itself_gives_p_one():
    config = small_config(n_seeds=2)
    report = run_experiment(config)
    comparison = compare_strategies(report, report)
    assert len(comparison.rows) == 2
    assert all(r.p == 1.0 and r.z == 0.0 for r in comparison.rows)
    assert not comparison.significant


def make_fake_report(label, test_errors_by_seed, test_ids, alpha=0.001):
    seeds = tuple(
        SeedResult(
            seed_index=k,
            completed=True,
            untrained_valid_wer=1.0,
            untrained_valid_cer=1.0,
            epochs=(EpochStats(1, 1.0, 1.0, 0.5, 0.5, len(test_ids), 1.0, "d"),),
            test_wer=0.5,
            test_cer=0.5,
            test_errors=errors,
            plans_valid=True,
        )
        for k, errors in enumerate(test_errors_by_seed)
    )
    result = StrategyResult(
        label=label, kind=label, paced=False, seeds=seeds,
        valid_wer_mean=0.5, valid_wer_std=0.0, valid_cer_mean=0.5, valid_cer_std=0.0,
        test_wer_mean=0.5, test_wer_std=0.0, test_cer_mean=0.5, test_cer_std=0.0,
        hours_seen_expected=1.0, hours_seen_actual_mean=1.0,
        overhead=OverheadReport(1.0, 1.0, 0.0),
    )
    return RunReport(
        config_hash="x", master_seed=0, n_seeds=len(test_errors_by_seed),
        alpha=alpha, total_train_hours=1.0, test_ids=test_ids,
        strategies=(result,), significance=(),
    )


def test_systematic_one_error_difference_is_significant():
    ids = tuple(f"u{i}" for i in range(40))
    rng = np.random.default_rng(0)
    base = {i: int(e) for i, e in zip(ids, rng.integers(0, 4, size=len(ids)))}
    worse = {i: e + 1 for i, e in base.items()}
    report_a = make_fake_report("A", [worse], ids)
    report_b = make_fake_report("B", [base], ids)
    comparison = compare_strategies(report_a, report_b)
    assert comparison.significant
    assert all(r.p < 0.001 and r.z > 0 for r in comparison.rows)
    flipped = compare_strategies(report_b, report_a)
    assert [r.z for r in flipped.rows] == [-r.z for r in comparison.rows]


def test_compare_rejects_mismatched_test_sets():
    a = make_fake_report("A", [{"u1": 0, "u2": 1}], ("u1", "u2"))
    b = make_fake_report("B", [{"u3": 0, "u4": 1}], ("u3", "u4"))
    with pytest.raises(ValueError, match="test set"):
        compare_strategies(a, b)


def test_emit_report_handles_empty_strategy_list(tmp_path):
    report = RunReport(
        config_hash="h", master_seed=0, n_seeds=0, alpha=0.001,
        total_train_hours=0.0, test_ids=(), strategies=(), significance=(),
    )
    files = emit_report(report, tmp_path)
    results = (tmp_path / "results.csv").read_text().strip().splitlines()
    assert results == ["strategy,split,cer_mean,cer_std,wer_mean,wer_std"]
    curves = (tmp_path / "curves.csv").read_text().strip().splitlines()
    assert len(curves) == 1
    assert {f.name for f in files} == {
        "results.csv", "curves.csv", "overhead.csv", "hours_seen.csv",
        "significance.csv", "report.json", "run_manifest.json",
    }


def test_curves_row_count_matches_seeds_times_epochs(tmp_path):
    epochs = tuple(
        EpochStats(e, 1.0, 1.0, 0.5, 0.5, 10, 1.0, f"d{e}") for e in range(1, 6)
    )
    seeds = tuple(
        SeedResult(seed_index=k, completed=True, untrained_valid_wer=1.0,
                   untrained_valid_cer=1.0, epochs=epochs, test_wer=0.1,
                   test_cer=0.1, test_errors={}, plans_valid=True)
        for k in range(3)
    )
    result = StrategyResult(
        label="X", kind="X", paced=False, seeds=seeds,
        valid_wer_mean=0.5, valid_wer_std=0.0, valid_cer_mean=0.5,
        valid_cer_std=0.0, test_wer_mean=0.1, test_wer_std=0.0,
        test_cer_mean=0.1, test_cer_std=0.0, hours_seen_expected=1.0,
        hours_seen_actual_mean=1.0, overhead=OverheadReport(1.0, 1.0, 0.0),
    )
    report = RunReport(config_hash="h", master_seed=0, n_seeds=3, alpha=0.001,
                       total_train_hours=1.0, test_ids=(), strategies=(result,),
                       significance=())
    emit_report(report, tmp_path)
    rows = (tmp_path / "curves.csv").read_text().strip().splitlines()
    assert len(rows) - 1 == 15  # 1 strategy x 3 seeds x 5 epochs


def test_report_json_round_trip(tmp_path):
    config = small_config(n_seeds=2, out_dir=str(tmp_path))
    report = run_experiment(config)
    loaded = load_report(tmp_path / "report.json")
    assert report_to_dict(loaded) == report_to_dict(report)
    # re-emission is byte-identical
    emit_report(loaded, tmp_path / "again")
    for name in ("results.csv", "curves.csv", "report.json"):
        assert ((tmp_path / name).read_bytes()
                == (tmp_path / "again" / name).read_bytes())


def test_score_cache_written_per_epoch(tmp_path):
    config = small_config(
        strategies=(StrategyRun(Strategy(StrategyKind.SEQ2SEQ_LOSS)),),
        train=TrainConfig(learning_rate=0.5, n_epochs=3),
        out_dir=str(tmp_path),
    )
    run_experiment(config)
    cache_files = list((tmp_path / "scores").glob("*.csv"))
    assert len(cache_files) == 1
    cached = read_score_cache(cache_files[0])
    assert {epoch for _, epoch in cached} == {1, 2, 3}
    assert all(label == "S2S" for label, _ in cached)


def test_manifest_corpus_cannot_train(tmp_path):
    manifest = tmp_path / "data.csv"
    manifest.write_text("id,duration_s,transcript\nu1,1.0,a b\nu2,2.0,b c\n")
    config = ExperimentConfig(
        manifest_path=str(manifest),
        strategies=(StrategyRun(Strategy(StrategyKind.DURATION_BASELINE)),),
        train=TrainConfig(learning_rate=0.5, n_epochs=1),
        n_seeds=1,
    )
    with pytest.raises(ValueError, match="metadata-only"):
        run_experiment(config)


def test_config_validation():
    with pytest.raises(ValueError, match="exactly one"):
        ExperimentConfig(corpus_spec=None, manifest_path=None)
    with pytest.raises(ValueError, match="below 1"):
        small_config(valid_fraction=0.5, test_fraction=0.5)
    with pytest.raises(ValueError):
        small_config(n_seeds=0)


def test_config_file_round_trip(tmp_path):
    doc = {
        "master_seed": 9,
        "n_seeds": 2,
        "corpus": {"n_utterances": 50, "vocab_size": 5, "feature_dim": 6},
        "train": {"learning_rate": 0.3, "n_epochs": 4},
        "pacing": {"start_fraction": 0.3, "growth_factor": 2.0},
        "strategies": [
            {"kind": "Baseline"},
            {"kind": "WS-M", "paced": True, "mixing_fraction": 0.25},
            {"kind": "RS", "reshuffle_each_epoch": True},
        ],
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    config = load_config(path)
    assert config.master_seed == 9
    assert config.train.n_epochs == 4
    assert len(config.strategies) == 3
    ws_m = config.strategies[1]
    assert ws_m.strategy.kind is StrategyKind.WER_SCORE_MIXED
    assert ws_m.strategy.mixing_fraction == 0.25
    assert ws_m.pacing.enabled
    assert ws_m.pacing.start_fraction == 0.3
    assert ws_m.resolved_label == "(Paced) WS-M"
    assert config.strategies[2].strategy.reshuffle_each_epoch
    # hashing is stable on the parsed form
    assert config.config_hash() == config_from_dict(doc).config_hash()


def test_config_hash_changes_with_content():
    a = small_config()
    b = small_config(master_seed=6)
    assert a.config_hash() != b.config_hash()


def test_report_from_dict_rejects_foreign_documents():
    with pytest.raises(ValueError):
        report_from_dict({"format": "something-else"})
