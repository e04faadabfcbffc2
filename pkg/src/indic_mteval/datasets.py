"""Train/dev/test splitting, train-to-test leakage filtering and ablation subsets."""

from __future__ import annotations

import logging
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from indic_mteval.core import (
    FAMILIES,
    SUBFAMILIES,
    Domain,
    FoldedSegment,
    QualityClass,
    family_of,
)

log = logging.getLogger(__name__)

SPLITS = ("train", "dev", "test")
DEFAULT_RATIOS = (0.9, 0.05, 0.05)
MIN_SPLITTABLE = 20
VOLUME_PERCENTS = (10, 25, 50, 75, 100)


@dataclass
class SplitAssignment:
    splits: dict[str, list[FoldedSegment]] = field(default_factory=lambda: {s: [] for s in SPLITS})
    # (segment, split it was dropped from)
    dropped: list[tuple[FoldedSegment, str]] = field(default_factory=list)

    @property
    def train(self) -> list[FoldedSegment]:
        return self.splits["train"]

    @property
    def dev(self) -> list[FoldedSegment]:
        return self.splits["dev"]

    @property
    def test(self) -> list[FoldedSegment]:
        return self.splits["test"]

    def counts(self) -> dict[str, int]:
        return {s: len(v) for s, v in self.splits.items()}


def allocate(n: int, ratios: Sequence[float]) -> list[int]:
    """Split ``n`` into integer parts proportional to ``ratios`` (largest remainder).

    Remainder ties go to the earlier part.
    """
    quotas = [n * Fraction(r).limit_denominator(10**6) for r in ratios]
    counts = [math.floor(q) for q in quotas]
    short = n - sum(counts)
    order = sorted(range(len(ratios)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:short]:
        counts[i] += 1
    return counts


def _sorted(segments: Iterable[FoldedSegment]) -> list[FoldedSegment]:
    return sorted(segments, key=lambda s: (s.key, s.origin.value))


def split(
    segments: Iterable[FoldedSegment],
    ratios: Sequence[float] = DEFAULT_RATIOS,
    seed: int = 0,
    filter_leakage: bool = True,
) -> SplitAssignment:
    """Per-language-pair random split followed by :func:`leakage_filter`.

    Pairs with fewer than 20 segments go entirely to train.
    """
    if len(ratios) != 3 or abs(sum(ratios) - 1.0) > 1e-9 or min(ratios) < 0:
        raise ValueError(f"ratios must be three non-negative numbers summing to 1, got {ratios}")
    by_pair: dict = defaultdict(list)
    for seg in segments:
        by_pair[seg.pair].append(seg)
    out = SplitAssignment()
    for pair in sorted(by_pair):
        segs = _sorted(by_pair[pair])
        if len(segs) < MIN_SPLITTABLE:
            log.warning("%s has only %d segments; assigning all to train", pair, len(segs))
            out.train.extend(segs)
            continue
        random.Random(f"{seed}:{pair}").shuffle(segs)
        n_train, n_dev, _ = allocate(len(segs), ratios)
        out.train.extend(segs[:n_train])
        out.dev.extend(segs[n_train : n_train + n_dev])
        out.test.extend(segs[n_train + n_dev :])
    for name in SPLITS:
        out.splits[name] = _sorted(out.splits[name])
    return leakage_filter(out) if filter_leakage else out


def leakage_filter(assignment: SplitAssignment) -> SplitAssignment:
    """Drop dev/test segments whose (source, hypothesis) text also occurs in train.

    A source may still appear in several splits with different hypotheses.
    Dropped segments are recorded in ``assignment.dropped``.
    """
    seen = {(s.source, s.hypothesis) for s in assignment.train}
    out = SplitAssignment({"train": list(assignment.train)}, list(assignment.dropped))
    for name in ("dev", "test"):
        kept = []
        for seg in assignment.splits[name]:
            if (seg.source, seg.hypothesis) in seen:
                out.dropped.append((seg, name))
            else:
                kept.append(seg)
        out.splits[name] = kept
    return out


@dataclass(frozen=True)
class AblationSpec:
    key: str
    value: str

    @classmethod
    def parse(cls, text: str) -> "AblationSpec":
        key, sep, value = text.partition("=")
        if not sep:
            raise ValueError(f"ablation must look like key=value, got {text!r}")
        spec = cls(key.strip(), value.strip().rstrip("%"))
        spec.predicate()
        return spec

    def __str__(self) -> str:
        return f"{self.key}={self.value}"

    def predicate(self):
        """Segment filter for attribute ablations, ``None`` for volume."""
        k, v = self.key, self.value
        if k == "volume":
            if not v.isdigit() or int(v) not in VOLUME_PERCENTS:
                raise ValueError(f"volume must be one of {VOLUME_PERCENTS}, got {v!r}")
            return None
        if k == "quality":
            q = QualityClass(v)
            return lambda s: s.quality is q
        if k == "domain":
            if v not in (Domain.GOVERNANCE.value, Domain.HEALTH.value):
                raise ValueError(f"domain ablation supports governance or health, got {v!r}")
            return lambda s: s.domain.value == v
        if k == "direction":
            src = {"en-il": "eng", "hi-il": "hin"}.get(v)
            if src is None:
                raise ValueError(f"direction must be en-il or hi-il, got {v!r}")
            return lambda s: s.pair.src == src
        if k == "family":
            if v not in FAMILIES:
                raise ValueError(f"unknown family {v!r}")
            return lambda s: family_of(s.pair.tgt).family == v
        if k == "subfamily":
            if v not in SUBFAMILIES:
                raise ValueError(f"unknown subfamily {v!r}")
            return lambda s: family_of(s.pair.tgt).subfamily == v
        if k == "target":
            family_of(v)
            return lambda s: s.pair.tgt == v
        raise ValueError(f"unknown ablation {k!r}")


def ablate(
    assignment: SplitAssignment,
    spec: AblationSpec | str,
    seed: int = 0,
    nested: bool = False,
) -> SplitAssignment:
    """Subset a split for one ablation experiment.

    ``volume=P`` samples ``round(P% of train)`` train segments uniformly and
    leaves dev and test untouched. Every other key filters all three splits.
    Volume samples are drawn fresh per percentage unless ``nested`` is set,
    in which case smaller percentages are prefixes of one shuffled order.
    """
    if isinstance(spec, str):
        spec = AblationSpec.parse(spec)
    keep = spec.predicate()
    if keep is None:
        train = _sorted(assignment.train)
        # exact half-to-even rounding of the fractional count
        n = round(Fraction(len(train) * int(spec.value), 100))
        rng = random.Random(f"{seed}:volume" if nested else f"{seed}:volume:{spec.value}")
        if nested:
            rng.shuffle(train)
            sample = train[:n]
        else:
            sample = rng.sample(train, n)
        return SplitAssignment(
            {"train": _sorted(sample), "dev": list(assignment.dev), "test": list(assignment.test)},
            list(assignment.dropped),
        )
    return SplitAssignment(
        {name: [s for s in assignment.splits[name] if keep(s)] for name in SPLITS},
        [(s, name) for s, name in assignment.dropped if keep(s)],
    )
