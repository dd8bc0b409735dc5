"""
Padding overhead and the training-time cost model
=================================================

Batches pad every member to the longest duration in the batch. A
duration-sorted order packs similar lengths together and wastes almost
nothing; a shuffled or score-sorted order pays a real penalty. This prints
the padding arithmetic, then the per-strategy wall-cost table with and
without pacing.
"""

import numpy as np

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
    segment_utterance,
)
from curricula.pacing import DISABLED_PACING

# ---- padding on a four-utterance toy ----------------------------------------
durations = {"a": 1.0, "b": 2.0, "c": 3.0, "d": 4.0}
sorted_report = padding_cost(["a", "b", "c", "d"], durations, batch_size=2)
mixed_report = padding_cost(["a", "c", "b", "d"], durations, batch_size=2)
print("durations 1..4 s, batches of 2:")
print(f"  sorted order  : padded {sorted_report.padded_seconds:.0f} s for "
      f"{sorted_report.actual_seconds:.0f} s of audio "
      f"({sorted_report.padding_overhead:+.0%} overhead)")
print(f"  a,c | b,d     : padded {mixed_report.padded_seconds:.0f} s "
      f"({mixed_report.padding_overhead:+.0%} overhead)")

# ---- a segmented corpus: the realistic duration shape -----------------------
rng = np.random.default_rng(5)
records = []
for i, d in enumerate(rng.uniform(8.0, 35.0, size=200)):
    parent = UtteranceRecord(id=f"u{i:03d}", duration_s=float(d),
                             tokens=(0,) * max(1, int(d)))
    records.extend(segment_utterance(parent, 10.0))
corpus = Corpus(records=tuple(records), vocab_size=1)
print()
print(f"segmented corpus: {len(corpus)} chunks, "
      f"{corpus.total_duration_s / 3600:.2f} h")

ids = sorted((r.id for r in corpus), key=lambda i: corpus.by_id[i].duration_s)
best = padding_cost(ids, {r.id: r.duration_s for r in corpus}, batch_size=32)
perm = [ids[i] for i in rng.permutation(len(ids))]
shuffled = padding_cost(perm, {r.id: r.duration_s for r in corpus}, batch_size=32)
print(f"  sorted padding overhead   : {best.padding_overhead:+.1%}")
print(f"  shuffled padding overhead : {shuffled.padding_overhead:+.1%}")

# ---- full wall-cost model ----------------------------------------------------
# Metric strategies add a decode pass per epoch; transfer strategies pay a
# one-time teacher inference pass; pacing shrinks every epoch's subset.
EPOCHS = 15
unpaced = build_schedule(EPOCHS, DISABLED_PACING)
paced = build_schedule(EPOCHS, PacingParams())
params = CostParams(batch_size=32, decode_cost_ratio=0.1,
                    teacher_inference_cost_ratio=0.05)
rows = overhead_table(
    [
        ("Baseline", Strategy(StrategyKind.DURATION_BASELINE), unpaced),
        ("RS", Strategy(StrategyKind.RANDOM_SHUFFLE), unpaced),
        ("WS-M", Strategy(StrategyKind.WER_SCORE_MIXED), unpaced),
        ("T-WS-M", Strategy(StrategyKind.TRANSFER_WER_MIXED), unpaced),
        ("T-S2S-M", Strategy(StrategyKind.TRANSFER_LOSS_MIXED), unpaced),
        ("(Paced) WS-M", Strategy(StrategyKind.WER_SCORE_MIXED), paced),
        ("(Paced) T-WS-M", Strategy(StrategyKind.TRANSFER_WER_MIXED), paced),
    ],
    corpus,
    params,
)
print()
print("wall-cost overhead vs the duration baseline:")
print("  strategy          overhead")
for label, overhead in rows:
    print(f"  {label:16s} {overhead:+8.1%}")
print()
print("shuffling and per-epoch decoding cost extra; transfer scoring is almost")
print("free; pacing more than pays for the curriculum it schedules.")
