"""Segment-level Kendall correlation between metric scores and human scores."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping, Sequence

from indic_mteval.core import FoldedSegment, LanguagePair
from indic_mteval.qcstats import TTestResult, paired_t_test

Scores = Mapping[str, Mapping[str, float]]


def _tie_pairs(values: Sequence) -> int:
    counts: dict = defaultdict(int)
    for v in values:
        counts[v] += 1
    return sum(c * (c - 1) // 2 for c in counts.values())


def _count_discordant(x: Sequence[float], y: Sequence[float]) -> int:
    """Pairs with x strictly increasing and y strictly decreasing (Fenwick tree)."""
    order = sorted(range(len(x)), key=lambda i: (x[i], y[i]))
    ranks = {v: r for r, v in enumerate(sorted(set(y)), start=1)}
    size = len(ranks)
    tree = [0] * (size + 1)
    seen = 0
    discordant = 0
    for i in order:
        r = ranks[y[i]]
        # seen elements with rank <= r
        le, j = 0, r
        while j > 0:
            le += tree[j]
            j -= j & -j
        discordant += seen - le
        j = r
        while j <= size:
            tree[j] += 1
            j += j & -j
        seen += 1
    return discordant


def concordance_counts(x: Sequence[float], y: Sequence[float]) -> tuple[int, int, int, int]:
    """Return (concordant, discordant, ties only in x, ties only in y)."""
    n = len(x)
    n0 = n * (n - 1) // 2
    tx = _tie_pairs(x)
    ty = _tie_pairs(y)
    txy = _tie_pairs(list(zip(x, y)))
    disc = _count_discordant(x, y)
    conc = n0 - tx - ty + txy - disc
    return conc, disc, tx - txy, ty - txy


def kendall_tau(x: Sequence[float], y: Sequence[float], variant: Literal["b", "a"] = "b") -> float | None:
    """Kendall's tau-b (default) or tau-a; ``None`` when undefined.

    tau-b is undefined when either argument is constant.
    """
    if len(x) != len(y):
        raise ValueError(f"length mismatch ({len(x)} vs {len(y)})")
    n = len(x)
    if n < 2:
        raise ValueError("kendall_tau needs at least 2 observations")
    x, y = list(x), list(y)
    if any(isinstance(v, float) and math.isnan(v) for v in x + y):
        raise ValueError("kendall_tau got NaN")
    conc, disc, only_x, only_y = concordance_counts(x, y)
    if variant == "a":
        return (conc - disc) / (n * (n - 1) // 2)
    left, right = conc + disc + only_x, conc + disc + only_y
    if left == 0 or right == 0:
        return None
    return (conc - disc) / math.sqrt(left * right)


@dataclass
class PairRow:
    pair: LanguagePair
    count: int
    taus: dict[str, float | None] = field(default_factory=dict)


@dataclass
class CorrelationReport:
    rows: list[PairRow]
    metrics: list[str]
    unjoined: dict[str, int] = field(default_factory=dict)
    unscored: dict[str, int] = field(default_factory=dict)

    @property
    def total_count(self) -> int:
        return sum(r.count for r in self.rows)

    def row(self, pair: LanguagePair | str) -> PairRow:
        pair = LanguagePair.parse(pair) if isinstance(pair, str) else pair
        for r in self.rows:
            if r.pair == pair:
                return r
        raise KeyError(str(pair))

    def taus(self, metric: str) -> dict[LanguagePair, float | None]:
        return {r.pair: r.taus.get(metric) for r in self.rows}

    def simple_avg(self, metric: str) -> float | None:
        vals = [r.taus[metric] for r in self.rows if r.taus.get(metric) is not None]
        return math.fsum(vals) / len(vals) if vals else None

    def weighted_avg(self, metric: str) -> float | None:
        """Count-weighted mean over rows with a defined tau."""
        rows = [r for r in self.rows if r.taus.get(metric) is not None]
        total = sum(r.count for r in rows)
        if not total:
            return None
        return math.fsum(r.count * r.taus[metric] for r in rows) / total

    @classmethod
    def from_table(cls, table: Mapping[str, tuple[int, Mapping[str, float | None]]]) -> "CorrelationReport":
        """Build a report from ``{"src-tgt": (count, {metric: tau})}``."""
        metrics: list[str] = []
        rows = []
        for pair, (count, taus) in table.items():
            for m in taus:
                if m not in metrics:
                    metrics.append(m)
            rows.append(PairRow(LanguagePair.parse(pair), count, dict(taus)))
        rows.sort(key=lambda r: r.pair)
        return cls(rows, metrics)


class JoinError(ValueError):
    pass


def correlate(
    segments: Iterable[FoldedSegment],
    scores: Scores,
    strict: bool = False,
    variant: Literal["b", "a"] = "b",
) -> CorrelationReport:
    """Per-pair Kendall tau of each metric against ``norm_score``.

    ``scores`` maps metric name to ``{segment_key: score}``. Score keys with no
    gold segment are counted in ``report.unjoined`` (an error when
    ``strict``); gold segments without a score are left out of that metric's
    tau and counted in ``report.unscored``.
    """
    by_pair: dict[LanguagePair, list[FoldedSegment]] = defaultdict(list)
    gold_keys = set()
    for seg in segments:
        by_pair[seg.pair].append(seg)
        gold_keys.add(seg.key)
    metrics = sorted(scores)
    unjoined = {m: len(set(scores[m]) - gold_keys) for m in metrics}
    if strict and any(unjoined.values()):
        detail = ", ".join(f"{m}: {n}" for m, n in unjoined.items() if n)
        raise JoinError(f"scores without a gold segment ({detail})")

    rows, unscored = [], dict.fromkeys(metrics, 0)
    for pair in sorted(by_pair):
        segs = sorted(by_pair[pair], key=lambda s: (s.key, s.origin.value))
        row = PairRow(pair, len(segs))
        keys = [s.key for s in segs]
        for m in metrics:
            table = scores[m]
            xs = [table[k] for k in keys if k in table]
            ys = [s.norm_score for s, k in zip(segs, keys) if k in table]
            unscored[m] += len(segs) - len(xs)
            row.taus[m] = kendall_tau(xs, ys, variant) if len(xs) >= 2 else None
        rows.append(row)
    return CorrelationReport(rows, metrics, unjoined, unscored)


def paired_metric_significance(
    report_a: CorrelationReport,
    report_b: CorrelationReport,
    metric_a: str | None = None,
    metric_b: str | None = None,
) -> TTestResult:
    """Paired t-test over the per-pair taus of two metrics."""

    def pick(report: CorrelationReport, name: str | None) -> str:
        if name is not None:
            return name
        if len(report.metrics) != 1:
            raise ValueError(f"report has metrics {report.metrics}; name the one to compare")
        return report.metrics[0]

    ma, mb = pick(report_a, metric_a), pick(report_b, metric_b)
    ta, tb = report_a.taus(ma), report_b.taus(mb)
    common = sorted(p for p in ta if ta[p] is not None and tb.get(p) is not None)
    if len(common) < 2:
        raise ValueError("need at least 2 language pairs with taus in both reports")
    return paired_t_test([ta[p] for p in common], [tb[p] for p in common])


@dataclass(frozen=True)
class ChallengeCell:
    count: int
    correct: int

    @property
    def tau(self) -> float:
        # ties count as wrong
        return (2 * self.correct - self.count) / self.count


def challenge_eval(items, scores: Scores, by: Sequence[str] = ("pair", "phenomenon")) -> dict:
    """Pairwise discrimination on a challenge set.

    Returns ``{metric: {grouping: {group: ChallengeCell}}}`` where grouping is
    ``"pair"`` or ``"phenomenon"``. An item counts as correct only when the
    good translation scores strictly higher than the incorrect one.
    """
    items = list(items)
    if not items:
        raise ValueError("challenge set is empty")
    out: dict = {}
    for metric in sorted(scores):
        table = scores[metric]
        tallies: dict[str, dict[str, list[int]]] = {g: defaultdict(lambda: [0, 0]) for g in by}
        for item in items:
            good_key, bad_key = item.keys()
            if good_key not in table or bad_key not in table:
                raise ValueError(f"{metric}: missing score for challenge item {item.pair} {item.phenomenon}")
            hit = table[good_key] > table[bad_key]
            for grouping in by:
                cell = tallies[grouping][getattr(item, grouping)]
                cell[0] += 1
                cell[1] += hit
        out[metric] = {
            g: {name: ChallengeCell(n, c) for name, (n, c) in sorted(t.items())} for g, t in tallies.items()
        }
    return out
