"""
Matched-pairs significance testing between two systems
======================================================

WER/CER tell you which system scored better; the matched-pairs test
(MAPSSWE) tells you whether the difference is real. Each shared test
utterance contributes one error-count difference d_i; the statistic is a z
on mean(d), so consistent small wins across many utterances can be highly
significant while a big win on three utterances is noise.
"""

import numpy as np

from curricula import PairedErrorSample, edit_distance, mapsswe, wer

# ---- from token sequences to per-utterance error counts ----------------------
refs = {
    "u1": "the cat sat on the mat".split(),
    "u2": "a stitch in time saves nine".split(),
    "u3": "how now brown cow".split(),
}
system_a = {
    "u1": "the cat sat on a mat".split(),
    "u2": "a stitch in time saves nine".split(),
    "u3": "how now brown cow".split(),
}
system_b = {
    "u1": "the cat sat on the mat".split(),
    "u2": "stitch in time saves mine".split(),
    "u3": "how how brown cow".split(),
}

print("per-utterance alignment counts:")
errors_a, errors_b = {}, {}
for utt_id, ref in refs.items():
    counts_a = edit_distance(ref, system_a[utt_id])
    counts_b = edit_distance(ref, system_b[utt_id])
    errors_a[utt_id] = counts_a.distance
    errors_b[utt_id] = counts_b.distance
    print(f"  {utt_id}: A S/D/I = {counts_a.substitutions}/{counts_a.deletions}/"
          f"{counts_a.insertions}  B S/D/I = {counts_b.substitutions}/"
          f"{counts_b.deletions}/{counts_b.insertions}")
    print(f"       WER A {wer(ref, system_a[utt_id]):.2f}  "
          f"B {wer(ref, system_b[utt_id]):.2f}")

result = mapsswe(PairedErrorSample.from_dicts(errors_a, errors_b))
print(f"\nthree utterances: z = {result.z:.3f}, p = {result.p_two_sided:.3f}"
      "  (nowhere near significant)")

# ---- consistency beats magnitude ---------------------------------------------
# System A makes one or two extra errors on every one of 50 utterances.
ids = tuple(f"utt{i:02d}" for i in range(50))
rng = np.random.default_rng(0)
base = {i: int(e) for i, e in zip(ids, rng.integers(0, 4, size=50))}
worse = {i: e + 1 + int(rng.random() < 0.2) for i, e in base.items()}
consistent = mapsswe(PairedErrorSample.from_dicts(worse, base))
print(f"+1..2 errors on all 50 utterances: z = {consistent.z:.1f}, "
      f"p = {consistent.p_two_sided:.2e}  (significant at alpha = 0.001)")

# The same total error surplus concentrated on two utterances is not.
spiky = dict(base)
spiky[ids[0]] += 25
spiky[ids[1]] += 25
concentrated = mapsswe(PairedErrorSample.from_dicts(spiky, base))
print(f"+50 errors on two utterances : z = {concentrated.z:.2f}, "
      f"p = {concentrated.p_two_sided:.3f}  (not significant)")

# Degenerate edge: identical outputs give the no-difference verdict exactly.
same = mapsswe(PairedErrorSample.from_dicts(base, base))
print(f"identical systems            : z = {same.z}, p = {same.p_two_sided}")
