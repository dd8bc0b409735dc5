import numpy as np
import pytest

from curricula import (
    Corpus,
    CostParams,
    PacingParams,
    Strategy,
    StrategyKind,
    UtteranceRecord,
    build_schedule,
    overhead_table,
    padding_cost,
    wall_cost,
)
from curricula.pacing import DISABLED_PACING


def duration_corpus(durations, seed=0):
    records = tuple(
        UtteranceRecord(id=f"u{i:04d}", duration_s=float(d), tokens=(0,))
        for i, d in enumerate(durations)
    )
    return Corpus(records=records, vocab_size=1)


DURS4 = {"a": 1.0, "b": 2.0, "c": 3.0, "d": 4.0}


def test_padding_sorted_order_hand_computation():
    report = padding_cost(["a", "b", "c", "d"], DURS4, batch_size=2)
    assert report.padded_seconds == 12.0  # 2*2 + 2*4
    assert report.actual_seconds == 10.0
    assert report.padding_overhead == pytest.approx(0.2)


def test_padding_interleaved_order_hand_computation():
    report = padding_cost(["a", "c", "b", "d"], DURS4, batch_size=2)
    assert report.padded_seconds == 14.0  # 2*3 + 2*4
    assert report.padding_overhead == pytest.approx(0.4)


def test_padding_batch_size_one_has_no_overhead():
    for order in (["a", "b", "c", "d"], ["d", "a", "c", "b"]):
        report = padding_cost(order, DURS4, batch_size=1)
        assert report.padding_overhead == 0.0


def test_padding_partial_last_batch():
    report = padding_cost(["a", "b", "c"], DURS4, batch_size=2)
    assert report.padded_seconds == 2 * 2.0 + 1 * 3.0


def test_padding_empty_order_rejected():
    with pytest.raises(ValueError):
        padding_cost([], DURS4, batch_size=2)


def test_padding_accepts_epoch_plans():
    from curricula import EpochPlan

    plan = EpochPlan(epoch=1, ordered_ids=("a", "b", "c", "d"))
    assert (padding_cost(plan, DURS4, 2).padded_seconds
            == padding_cost(["a", "b", "c", "d"], DURS4, 2).padded_seconds)


def test_padding_overhead_zero_iff_full_batches_have_equal_durations():
    # equal durations within each full batch -> exactly zero overhead
    durs = {"a": 2.0, "b": 2.0, "c": 5.0, "d": 5.0}
    report = padding_cost(["a", "b", "c", "d"], durs, batch_size=2)
    assert report.padding_overhead == 0.0
    # any unequal pair inside a full batch -> strictly positive overhead
    report = padding_cost(["a", "c", "b", "d"], durs, batch_size=2)
    assert report.padding_overhead > 0.0


def test_sorted_order_minimizes_padding_sampled():
    rng = np.random.default_rng(99)
    durations = {f"u{i}": float(d) for i, d in enumerate(rng.uniform(1, 15, size=64))}
    ids = sorted(durations, key=lambda i: durations[i])
    best = padding_cost(ids, durations, batch_size=8).padded_seconds
    for _ in range(60):
        perm = [ids[i] for i in rng.permutation(len(ids))]
        assert padding_cost(perm, durations, batch_size=8).padded_seconds >= best


def test_shuffled_padding_overhead_is_nonnegative_with_positive_mean():
    rng = np.random.default_rng(3)
    durations = {f"u{i}": float(d) for i, d in enumerate(rng.lognormal(1.0, 0.6, size=128))}
    ids = sorted(durations, key=lambda i: durations[i])
    sorted_padded = padding_cost(ids, durations, batch_size=16).padded_seconds
    overheads = []
    for _ in range(100):
        perm = [ids[i] for i in rng.permutation(len(ids))]
        report = padding_cost(perm, durations, batch_size=16)
        assert report.padding_overhead >= 0.0
        overheads.append(report.padded_seconds / sorted_padded - 1.0)
    assert np.mean(overheads) > 0.0


@pytest.fixture(scope="module")
def spread_corpus():
    rng = np.random.default_rng(17)
    return duration_corpus(rng.uniform(0.5, 12.0, size=256))


def test_wall_cost_baseline_vs_itself_is_zero(spread_corpus):
    schedule = build_schedule(5, DISABLED_PACING)
    report = wall_cost(Strategy(StrategyKind.DURATION_BASELINE), schedule,
                       spread_corpus, CostParams(batch_size=32))
    assert report.overhead_vs_baseline == 0.0


def test_wall_cost_random_shuffle_direction_positive(spread_corpus):
    schedule = build_schedule(5, DISABLED_PACING)
    report = wall_cost(Strategy(StrategyKind.RANDOM_SHUFFLE), schedule,
                       spread_corpus, CostParams(batch_size=32))
    assert report.overhead_vs_baseline > 0.0


def test_wall_cost_paced_metric_direction_negative(spread_corpus):
    paced = build_schedule(15, PacingParams())
    report = wall_cost(Strategy(StrategyKind.WER_SCORE_MIXED), paced,
                       spread_corpus, CostParams(batch_size=32))
    assert report.overhead_vs_baseline < 0.0
    transfer = wall_cost(Strategy(StrategyKind.TRANSFER_WER_MIXED), paced,
                         spread_corpus, CostParams(batch_size=32))
    assert transfer.overhead_vs_baseline < 0.0


def test_wall_cost_monotone_in_decode_ratio(spread_corpus):
    schedule = build_schedule(4, DISABLED_PACING)
    metric_costs = []
    baseline_costs = []
    for ratio in (0.0, 0.1, 0.3, 0.8):
        params = CostParams(batch_size=32, decode_cost_ratio=ratio)
        metric_costs.append(
            wall_cost(Strategy(StrategyKind.WER_SCORE), schedule, spread_corpus,
                      params).wall_cost
        )
        baseline_costs.append(
            wall_cost(Strategy(StrategyKind.DURATION_BASELINE), schedule,
                      spread_corpus, params).wall_cost
        )
    assert all(b > a for a, b in zip(metric_costs, metric_costs[1:]))
    assert len(set(baseline_costs)) == 1


def test_transfer_pays_one_time_teacher_pass(spread_corpus):
    schedule = build_schedule(4, DISABLED_PACING)
    with_pass = wall_cost(
        Strategy(StrategyKind.TRANSFER_LOSS_MIXED), schedule, spread_corpus,
        CostParams(batch_size=32, teacher_inference_cost_ratio=0.1))
    without = wall_cost(
        Strategy(StrategyKind.TRANSFER_LOSS_MIXED), schedule, spread_corpus,
        CostParams(batch_size=32, teacher_inference_cost_ratio=0.0))
    expected_delta = 0.1 * spread_corpus.total_duration_s
    assert with_pass.wall_cost - without.wall_cost == pytest.approx(expected_delta)


def test_overhead_table_shape(spread_corpus):
    unpaced = build_schedule(5, DISABLED_PACING)
    paced = build_schedule(5, PacingParams())
    rows = overhead_table(
        [
            ("Baseline", Strategy(StrategyKind.DURATION_BASELINE), unpaced),
            ("RS", Strategy(StrategyKind.RANDOM_SHUFFLE), unpaced),
            ("(Paced) WS-M", Strategy(StrategyKind.WER_SCORE_MIXED), paced),
        ],
        spread_corpus,
        CostParams(batch_size=32),
    )
    assert [label for label, _ in rows] == ["Baseline", "RS", "(Paced) WS-M"]
    assert rows[0][1] == 0.0
    assert rows[1][1] > 0.0
    assert rows[2][1] < 0.0


def test_wall_cost_is_deterministic(spread_corpus):
    schedule = build_schedule(6, PacingParams())
    a = wall_cost(Strategy(StrategyKind.SEQ2SEQ_LOSS_MIXED), schedule,
                  spread_corpus, CostParams(batch_size=32), seed=5)
    b = wall_cost(Strategy(StrategyKind.SEQ2SEQ_LOSS_MIXED), schedule,
                  spread_corpus, CostParams(batch_size=32), seed=5)
    assert a.wall_cost == b.wall_cost
    assert a.padded_seconds == b.padded_seconds


def test_cost_params_validation():
    with pytest.raises(ValueError):
        CostParams(batch_size=0)
    with pytest.raises(ValueError):
        CostParams(per_second_train_cost=0.0)
    with pytest.raises(ValueError):
        CostParams(decode_cost_ratio=-0.1)


def test_overhead_report_validation():
    from curricula import OverheadReport

    with pytest.raises(ValueError):
        OverheadReport(padded_seconds=1.0, actual_seconds=2.0, padding_overhead=-0.5)
