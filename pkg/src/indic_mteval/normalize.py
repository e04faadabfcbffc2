"""Per-rater standardization, anchored min-max scaling and folding."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Iterable, Literal, Sequence

import numpy as np

from indic_mteval.core import FoldedSegment, RatingRecord, ValidationError


class AnchorError(ValueError):
    """No unanimous-minimum or unanimous-maximum items to anchor the scale."""


@dataclass(frozen=True)
class ScaleAnchors:
    z_min: float
    z_max: float
    method: str = "unanimous"

    def __post_init__(self) -> None:
        if not self.z_min < self.z_max:
            raise ValueError(f"anchors must satisfy z_min < z_max, got ({self.z_min}, {self.z_max})")


def zscore_by_rater(
    rs: Iterable[RatingRecord], ddof: int = 1, single: Literal["error", "zero"] = "error"
) -> list[RatingRecord]:
    """Attach z-scores computed per (language pair, rater).

    ``ddof=1`` uses the sample standard deviation, ``ddof=0`` the population
    one. Raters whose scores are all equal get ``z = 0``. A rater with a
    single rating raises unless ``single="zero"``.
    """
    records = list(rs)
    groups: dict[tuple, list[int]] = defaultdict(list)
    for i, rec in enumerate(records):
        groups[(rec.pair, rec.rater_id)].append(i)
    out = list(records)
    for (pair, rater), idx in groups.items():
        if len(idx) < 2 and single == "error":
            raise ValidationError(f"rater {rater} has a single rating in {pair}; filter before z-scoring")
        raw = np.array([records[i].raw_score for i in idx], dtype=float)
        sd = raw.std(ddof=ddof) if len(raw) > ddof else 0.0
        z = np.zeros_like(raw) if sd == 0 else (raw - raw.mean()) / sd
        for i, value in zip(idx, z):
            out[i] = replace(records[i], z=float(value), norm=None)
    return out


def compute_anchors(rs: Iterable[RatingRecord], low: int = 1, high: int = 100) -> ScaleAnchors:
    """Anchor the scale on items rated ``low`` (resp. ``high``) by every rater.

    The minimum anchor is the mean z over all ratings of unanimous-``low``
    items; the maximum anchor likewise for ``high``.
    """
    by_item: dict[tuple, list[RatingRecord]] = defaultdict(list)
    for rec in rs:
        if rec.z is None:
            raise ValidationError("compute_anchors needs z-scored records")
        by_item[rec.text_key].append(rec)
    low_z, high_z = [], []
    for recs in by_item.values():
        scores = {r.raw_score for r in recs}
        if scores == {low}:
            low_z.extend(r.z for r in recs)
        elif scores == {high}:
            high_z.extend(r.z for r in recs)
    if not low_z or not high_z:
        which = "minimum" if not low_z else "maximum"
        raise AnchorError(
            f"no item rated {low if not low_z else high} by all its raters to anchor the {which}; "
            "use observed_anchors() (plain min-max over observed z) instead"
        )
    return ScaleAnchors(float(np.mean(low_z)), float(np.mean(high_z)))


def observed_anchors(rs: Iterable[RatingRecord]) -> ScaleAnchors:
    """Fallback anchors: the observed minimum and maximum z."""
    z = [rec.z for rec in rs]
    if any(v is None for v in z) or not z:
        raise ValidationError("observed_anchors needs z-scored records")
    return ScaleAnchors(min(z), max(z), method="observed")


def minmax_clip(z: float, anchors: ScaleAnchors) -> float:
    scaled = (z - anchors.z_min) / (anchors.z_max - anchors.z_min)
    if math.isnan(scaled):
        raise ValueError("cannot scale NaN")
    return min(1.0, max(0.0, scaled))


def apply_minmax(rs: Iterable[RatingRecord], anchors: ScaleAnchors) -> list[RatingRecord]:
    return [replace(rec, norm=minmax_clip(rec.z, anchors)) for rec in rs]


def fold(rs: Iterable[RatingRecord], on_conflict: Literal["error", "by_origin"] = "error") -> list[FoldedSegment]:
    """Collapse ratings into one segment per unique (pair, source, hypothesis).

    Records that share text but disagree on origin, domain or reference raise
    :class:`ValidationError` by default. With ``on_conflict="by_origin"`` the
    origin becomes part of the grouping key, so identical outputs of different
    systems stay separate segments.

    Output is sorted by segment key (then origin).
    """
    groups: dict[tuple, list[RatingRecord]] = defaultdict(list)
    for rec in rs:
        key = rec.text_key + ((rec.origin,) if on_conflict == "by_origin" else ())
        groups[key].append(rec)

    segments, offenders = [], []
    for recs in groups.values():
        head = recs[0]
        meta = {(r.origin, r.domain, r.reference) for r in recs}
        if len(meta) > 1:
            offenders.append(f"{head.pair} {head.source[:30]!r} -> {head.hypothesis[:30]!r}")
            continue
        if head.reference is None or head.z is None or head.norm is None:
            raise ValidationError("fold needs records with reference, z and norm attached")
        segments.append(
            FoldedSegment(
                pair=head.pair,
                source=head.source,
                hypothesis=head.hypothesis,
                origin=head.origin,
                domain=head.domain,
                bucket=head.bucket,
                reference=head.reference,
                n_ratings=len(recs),
                n_raters=len({r.rater_id for r in recs}),
                raw_mean=_mean([r.raw_score for r in recs]),
                z_mean=_mean([r.z for r in recs]),
                norm_score=_mean([r.norm for r in recs]),
            )
        )
    if offenders:
        raise ValidationError(
            f"{len(offenders)} segment(s) with conflicting metadata: " + "; ".join(sorted(offenders)[:10])
        )
    segments.sort(key=lambda s: (s.key, s.origin.value))
    return segments


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)
