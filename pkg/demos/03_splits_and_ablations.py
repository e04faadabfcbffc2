"""Train/dev/test splitting, the leakage filter and ablation subsets.

    python demos/03_splits_and_ablations.py
"""

import random

from indic_mteval.core import DEFAULT_DIRECTIONS, Domain, FoldedSegment, LanguagePair, Origin, length_bucket
from indic_mteval.datasets import ablate, split

rng = random.Random(3)
segments = []
for src, tgt in sorted(DEFAULT_DIRECTIONS):
    pair = LanguagePair(src, tgt)
    for i in range(rng.randint(300, 900)):
        source = f"{pair} source {i // 5}"
        # a few systems produce the same output for a source
        hypothesis = f"output {i // 5}-{rng.randint(0, 3)}"
        segments.append(FoldedSegment(pair, source, hypothesis, list(Origin)[i % 10], list(Domain)[i % 3],
                                      length_bucket(source), "reference", 3, 3, 60.0, 0.0, rng.random()))

assignment = split(segments, seed=3)
print("split sizes:", assignment.counts())
print(f"dropped from dev/test because the same text is in train: {len(assignment.dropped)}")

print("\nvolume ablation (train only, dev/test untouched):")
for pct in (10, 25, 50, 75, 100):
    sub = ablate(assignment, f"volume={pct}", seed=3)
    print(f"  {pct:>3}%  {sub.counts()}")

print("\nattribute ablations (all three splits filtered):")
for spec in ("quality=good", "quality=bad", "quality=neutral", "domain=health", "direction=hi-il",
             "family=dravidian", "subfamily=ia-east", "target=urd"):
    print(f"  {spec:<18} {ablate(assignment, spec).counts()}")
