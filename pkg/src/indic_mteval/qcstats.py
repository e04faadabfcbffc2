"""Student-t tests and rater quality control.

Two tests run per rater on their quality-control (QC) items:

* consistency: paired t-test of scores on the *bad* QC originals against their
  repeats. A significant difference marks the rater inconsistent.
* discernment: two-sample t-test of scores on *good* against *bad* QC
  originals. A significant difference marks the rater discerning.

Raters working into very low-resource targets (kas, snd, doi) are never
removed for failing discernment.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import betainc

from indic_mteval.core import LOW_RESOURCE_TARGETS, QCRole, QualityClass, RatingRecord

DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    df: float
    p_two_tailed: float
    n_a: int
    n_b: int


def student_t_sf(t: float, df: float) -> float:
    """Two-tailed tail probability ``P(|T_df| >= |t|)``.

    Uses the identity ``P = I_x(df/2, 1/2)`` with ``x = df / (df + t^2)``.
    """
    if not (math.isfinite(t) and math.isfinite(df)):
        raise ValueError("t and df must be finite")
    if df <= 0:
        raise ValueError("df must be positive")
    if t == 0:
        return 1.0
    x = df / (df + t * t)
    return float(betainc(df / 2.0, 0.5, x))


def _degenerate(mean_diff: float, n_a: int, n_b: int, df: float) -> TTestResult:
    # zero spread: identical groups carry no evidence, a constant offset is certain
    if mean_diff == 0:
        return TTestResult(0.0, df, 1.0, n_a, n_b)
    return TTestResult(math.copysign(math.inf, mean_diff), df, 0.0, n_a, n_b)


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    if len(a) != len(b):
        raise ValueError(f"paired samples differ in length ({len(a)} vs {len(b)})")
    n = len(a)
    if n < 2:
        raise ValueError("paired t-test needs at least 2 pairs")
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    df = n - 1
    if sd == 0:
        return _degenerate(mean, n, n, df)
    t = mean / (sd / math.sqrt(n))
    return TTestResult(t, df, student_t_sf(t, df), n, n)


def independent_t_test(a: Sequence[float], b: Sequence[float], equal_var: bool = True) -> TTestResult:
    """Two-sample t-test; pooled variance by default, Welch when ``equal_var=False``."""
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise ValueError("independent t-test needs at least 2 observations per group")
    xa = np.asarray(a, dtype=float)
    xb = np.asarray(b, dtype=float)
    diff = float(xa.mean() - xb.mean())
    va, vb = float(xa.var(ddof=1)), float(xb.var(ddof=1))
    if equal_var:
        df = float(na + nb - 2)
        pooled = ((na - 1) * va + (nb - 1) * vb) / df
        se = math.sqrt(pooled * (1.0 / na + 1.0 / nb))
    else:
        qa, qb = va / na, vb / nb
        se = math.sqrt(qa + qb)
        df = (qa + qb) ** 2 / (qa**2 / (na - 1) + qb**2 / (nb - 1)) if se > 0 else float(na + nb - 2)
    if se == 0:
        return _degenerate(diff, na, nb, df)
    t = diff / se
    return TTestResult(t, df, student_t_sf(t, df), na, nb)


@dataclass(frozen=True)
class RaterVerdict:
    rater_id: str
    consistent: bool
    discerning: bool
    exempt_discernment: bool
    p_consistency: float
    p_discernment: float
    n_qc_items: dict[str, int]
    consistency_testable: bool = True
    discernment_testable: bool = True

    @property
    def passes(self) -> bool:
        return self.consistent and self.discerning


def _qc_scores(records: Iterable[RatingRecord]):
    originals: dict[tuple, int] = {}
    repeats: dict[tuple, int] = {}
    good, bad = [], []
    for rec in records:
        if rec.qc_role is QCRole.NONE:
            continue
        match_key = (rec.task_id, rec.item_id, rec.qc_quality)
        if rec.qc_role is QCRole.QC_ORIGINAL:
            originals[match_key] = rec.raw_score
            (good if rec.qc_quality is QualityClass.GOOD else bad).append(rec.raw_score)
        else:
            repeats[match_key] = rec.raw_score
    bad_pairs = [
        (score, repeats[k]) for k, score in sorted(originals.items(), key=lambda kv: str(kv[0]))
        if k[2] is QualityClass.BAD and k in repeats
    ]
    return good, bad, bad_pairs


def rater_verdict(rater_id: str, records: Sequence[RatingRecord], alpha: float = DEFAULT_ALPHA,
                  equal_var: bool = True) -> RaterVerdict:
    good, bad, bad_pairs = _qc_scores(records)
    exempt = bool(records) and all(rec.pair.tgt in LOW_RESOURCE_TARGETS for rec in records)

    if len(bad_pairs) >= 2:
        res = paired_t_test([p[0] for p in bad_pairs], [p[1] for p in bad_pairs])
        p_cons, consistent, cons_ok = res.p_two_tailed, not res.p_two_tailed < alpha, True
    else:
        p_cons, consistent, cons_ok = math.nan, True, False

    if len(good) >= 2 and len(bad) >= 2:
        res = independent_t_test(good, bad, equal_var=equal_var)
        p_disc, discerning, disc_ok = res.p_two_tailed, res.p_two_tailed < alpha, True
    else:
        p_disc, discerning, disc_ok = math.nan, True, False

    return RaterVerdict(
        rater_id=rater_id,
        consistent=consistent,
        discerning=discerning or exempt,
        exempt_discernment=exempt,
        p_consistency=p_cons,
        p_discernment=p_disc,
        n_qc_items={"good": len(good), "bad": len(bad), "bad_pairs": len(bad_pairs)},
        consistency_testable=cons_ok,
        discernment_testable=disc_ok,
    )


def rater_verdicts(rs: Iterable[RatingRecord], alpha: float = DEFAULT_ALPHA,
                   equal_var: bool = True) -> list[RaterVerdict]:
    """One verdict per rater, sorted by rater id.

    QC repeats are matched to originals by ``(task_id, item_id)``; unmatched
    repeats are ignored. Raters with fewer than two observations for a test
    are kept and flagged as untestable for it.
    """
    by_rater: dict[str, list[RatingRecord]] = defaultdict(list)
    for rec in rs:
        by_rater[rec.rater_id].append(rec)
    return [rater_verdict(r, by_rater[r], alpha, equal_var) for r in sorted(by_rater)]


@dataclass(frozen=True)
class AuditStage:
    stage: str
    raters_removed: int
    items_removed: int
    pct_of_input: float


@dataclass
class AuditReport:
    records_in: int
    records_out: int
    stages: list[AuditStage] = field(default_factory=list)


def filter_ratings(rs: Iterable[RatingRecord], verdicts: Iterable[RaterVerdict],
                   min_ratings: int = 2) -> tuple[list[RatingRecord], AuditReport]:
    """Drop inconsistent raters, then non-discerning raters, then sparse items.

    ``items_removed`` in the audit counts rating records; percentages are
    relative to the input size.
    """
    records = list(rs)
    verdict_of = {v.rater_id: v for v in verdicts}
    missing = {rec.rater_id for rec in records} - verdict_of.keys()
    if missing:
        raise ValueError(f"no verdict for raters: {', '.join(sorted(missing))}")
    n_in = len(records)
    audit = AuditReport(n_in, n_in)

    def stage(name: str, keep) -> None:
        nonlocal records
        kept = [rec for rec in records if keep(rec)]
        raters = {r.rater_id for r in records} - {r.rater_id for r in kept}
        removed = len(records) - len(kept)
        audit.stages.append(AuditStage(name, len(raters), removed, 100.0 * removed / n_in if n_in else 0.0))
        records = kept

    stage("inconsistent", lambda rec: verdict_of[rec.rater_id].consistent)
    stage("non_discerning", lambda rec: verdict_of[rec.rater_id].discerning)
    counts: dict[tuple, int] = defaultdict(int)
    for rec in records:
        counts[rec.text_key] += 1
    stage("sparse_items", lambda rec: counts[rec.text_key] >= min_ratings)
    audit.records_out = len(records)
    return records, audit
