"""
Difficulty scoring, easy-to-hard ordering, and uniform mixing
=============================================================

Walks through the scoring pipeline: score a corpus by duration, order it
easiest-first, let a partially trained model re-score it by loss and by
decode WER, and finally regularize the order with uniform mixing.
"""

import numpy as np

from curricula import (
    CorpusSpec,
    Strategy,
    StrategyKind,
    ToyModel,
    TrainConfig,
    epoch_order,
    generate_corpus,
    score_duration,
    train_epoch,
    uniform_mix,
)
from curricula.scoring import TieBreak, order_by_scores

corpus = generate_corpus(
    CorpusSpec(n_utterances=15, vocab_size=6, feature_dim=10,
               token_length_range=(2, 14), noise_sigma_range=(0.1, 0.8)),
    seed=7,
)

# ---- duration scoring: shorter = easier -------------------------------------
table = score_duration(corpus)
plan = order_by_scores(table, TieBreak.ID)
print("duration order (easiest first):")
print(" ", " ".join(f"{corpus.by_id[i].duration_s:.1f}" for i in plan.ordered_ids))

# ---- adaptive scoring: the model's own feedback re-ranks the data -----------
model = ToyModel.random(corpus.vocab_size, corpus.feature_dim, seed=0, scale=0.01)
config = TrainConfig(learning_rate=0.5, n_epochs=1, micro_batch=4, accumulation_steps=2)

strategy = Strategy(StrategyKind.WER_SCORE_MIXED, mixing_fraction=0.2)
plan1 = epoch_order(strategy, corpus, None, epoch=1, seed=3)
model, feedback_table, _ = train_epoch(model, plan1, corpus, config,
                                       collect="loss+metric")
plan2 = epoch_order(strategy, corpus, feedback_table, epoch=2, seed=3)

print()
print("WS-M epoch 1 (duration fallback, mixed):")
print(" ", " ".join(plan1.ordered_ids))
print("WS-M epoch 2 (ordered by epoch-1 decode WER, mixed):")
print(" ", " ".join(plan2.ordered_ids))
print("  scores:", " ".join(
    f"{feedback_table.entries[i].primary_score:.2f}" for i in plan2.ordered_ids))

# ---- uniform mixing in isolation ---------------------------------------------
# Cut the ordered plan into easy/medium/hard thirds and swap 20% of the easy
# section out into the other two, so early batches are not uniformly trivial.
base = order_by_scores(score_duration(corpus), TieBreak.ID)
mixed = uniform_mix(base, fraction=0.2, seed=11)
moved = [i for i, (a, b) in enumerate(zip(base.ordered_ids, mixed.ordered_ids)) if a != b]
print()
print(f"uniform mixing displaced positions {moved} "
      f"(sections of {int(np.ceil(len(base) / 3))})")
print("  before:", " ".join(base.ordered_ids))
print("  after :", " ".join(mixed.ordered_ids))
print("  same multiset:", sorted(base.ordered_ids) == sorted(mixed.ordered_ids))
