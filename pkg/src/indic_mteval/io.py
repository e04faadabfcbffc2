"""Readers and writers for every on-disk format used by the toolkit.

Formats
-------
ratings (JSONL)
    One :class:`~indic_mteval.core.RatingRecord` per line. Unknown keys are
    kept in ``record.extra`` and written back unchanged.
folded (JSONL)
    One :class:`~indic_mteval.core.FoldedSegment` per line plus its
    ``segment_key``.
scores (TSV)
    ``segment_key<TAB>metric<TAB>score`` with a header line.
challenge (JSONL)
    ``pair, phenomenon, source, good_translation, incorrect_translation,
    reference``.
lexicon (TSV)
    ``word<TAB>syn1|syn2|...``.
report (TSV)
    One row per language pair, one column per metric, then two footer rows
    ``all*`` (simple mean) and ``all†`` (count-weighted mean).
"""

from __future__ import annotations

import json
import logging
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping

from indic_mteval.core import (
    DEFAULT_DIRECTIONS,
    Domain,
    FoldedSegment,
    LanguagePair,
    LengthBucket,
    Origin,
    QCRole,
    QualityClass,
    RatingRecord,
    ValidationError,
    length_bucket,
    segment_key,
)
from indic_mteval.correlate import CorrelationReport, PairRow
from indic_mteval.perturb import Lexicon

log = logging.getLogger(__name__)

__all__ = [
    "ChallengeItem",
    "DropReport",
    "Rejection",
    "RatingSet",
    "attach_references",
    "emit_report",
    "load_challenge_set",
    "load_lexicon",
    "load_ratings",
    "read_folded",
    "read_report",
    "read_scores",
    "read_split_manifest",
    "record_from_dict",
    "record_to_dict",
    "segment_key",
    "write_audit",
    "write_folded",
    "write_ratings",
    "write_scores",
    "write_split_manifest",
]

RECORD_FIELDS = (
    "item_id",
    "pair",
    "source",
    "hypothesis",
    "origin",
    "domain",
    "bucket",
    "rater_id",
    "raw_score",
    "qc_role",
    "qc_quality",
    "task_id",
    "reference",
    "z",
    "norm",
)
REQUIRED_FIELDS = ("item_id", "pair", "source", "hypothesis", "origin", "domain", "rater_id", "raw_score")

DEFAULT_PHENOMENA = frozenset(
    {
        "addition",
        "copy-source",
        "hallucination-date-time",
        "hallucination-real-data-vs-synonym",
        "hallucination-unit-conversion-amount-matches-ref",
        "hallucination-unit-conversion-unit-matches-ref",
        "omission",
        "overly-literal-vs-synonym",
        "similar-language-high",
        "xnli-addition-contradiction",
        "xnli-addition-neutral",
        "xnli-omission-contradiction",
        "xnli-omission-neutral",
    }
)


@dataclass(frozen=True)
class Rejection:
    line: int
    reason: str


@dataclass
class RatingSet:
    records: list[RatingRecord] = field(default_factory=list)
    rejected: list[Rejection] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[RatingRecord]:
        return iter(self.records)


@dataclass
class DropReport:
    records_in: int
    records_dropped: int
    items_dropped: int
    conflicts: list[str] = field(default_factory=list)

    @property
    def pct_dropped(self) -> float:
        return 100.0 * self.records_dropped / self.records_in if self.records_in else 0.0


@dataclass(frozen=True)
class ChallengeItem:
    pair: str
    phenomenon: str
    source: str
    good_translation: str
    incorrect_translation: str
    reference: str

    def keys(self) -> tuple[str, str]:
        """Segment keys of the good and the incorrect translation."""
        lp = LanguagePair.parse(self.pair)
        return (
            segment_key(lp, self.source, self.good_translation),
            segment_key(lp, self.source, self.incorrect_translation),
        )


# -- ratings -----------------------------------------------------------------


def record_from_dict(
    obj: Mapping[str, Any], directions: Iterable[tuple[str, str]] | None = DEFAULT_DIRECTIONS
) -> RatingRecord:
    missing = [k for k in REQUIRED_FIELDS if k not in obj]
    if missing:
        raise ValidationError(f"missing fields: {', '.join(missing)}")
    pair = LanguagePair.parse(obj["pair"]) if isinstance(obj["pair"], str) else LanguagePair(**obj["pair"])
    pair.validate(directions)
    try:
        origin = Origin(obj["origin"])
        domain = Domain(obj["domain"])
        qc_role = QCRole(obj.get("qc_role") or "none")
        qc_quality = QualityClass(obj["qc_quality"]) if obj.get("qc_quality") is not None else None
        bucket = LengthBucket(obj["bucket"]) if obj.get("bucket") else length_bucket(obj["source"])
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    extra = {k: v for k, v in obj.items() if k not in RECORD_FIELDS}
    return RatingRecord(
        item_id=str(obj["item_id"]),
        pair=pair,
        source=obj["source"],
        hypothesis=obj["hypothesis"],
        origin=origin,
        domain=domain,
        bucket=bucket,
        rater_id=str(obj["rater_id"]),
        raw_score=obj["raw_score"],
        qc_role=qc_role,
        qc_quality=qc_quality,
        task_id=obj.get("task_id"),
        reference=obj.get("reference"),
        z=obj.get("z"),
        norm=obj.get("norm"),
        extra=extra,
    )


def record_to_dict(rec: RatingRecord) -> dict[str, Any]:
    out: dict[str, Any] = dict(rec.extra)
    out.update(
        item_id=rec.item_id,
        pair=str(rec.pair),
        source=rec.source,
        hypothesis=rec.hypothesis,
        origin=rec.origin.value,
        domain=rec.domain.value,
        bucket=rec.bucket.value,
        rater_id=rec.rater_id,
        raw_score=rec.raw_score,
        qc_role=rec.qc_role.value,
        qc_quality=rec.qc_quality.value if rec.qc_quality else None,
    )
    for name in ("task_id", "reference", "z", "norm"):
        value = getattr(rec, name)
        if value is not None:
            out[name] = value
    return out


def load_ratings(
    path: str | Path,
    strict: bool = True,
    directions: Iterable[tuple[str, str]] | None = DEFAULT_DIRECTIONS,
) -> RatingSet:
    """Read a ratings JSONL file.

    In strict mode the first invalid line raises :class:`ValidationError`
    naming its line number. In lenient mode invalid lines are collected in
    ``RatingSet.rejected`` and the rest are kept.
    """
    directions = frozenset(directions) if directions is not None else None
    rs = RatingSet()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValidationError("line is not a JSON object")
                rs.records.append(record_from_dict(obj, directions))
            except (json.JSONDecodeError, ValidationError, TypeError) as exc:
                if strict:
                    raise ValidationError(f"{path}:{lineno}: {exc}") from None
                rs.rejected.append(Rejection(lineno, str(exc)))
    if not rs.records and not rs.rejected:
        log.warning("%s contains no ratings", path)
    return rs


def write_ratings(records: Iterable[RatingRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_dict(rec), ensure_ascii=False, sort_keys=True) + "\n")


def attach_references(rs: RatingSet | list[RatingRecord]) -> tuple[RatingSet, DropReport]:
    """Give every record the gold hypothesis rated for the same source as reference.

    Records whose source has no gold-origin rating in the same language pair
    are dropped and counted.
    """
    records = list(rs)
    gold: dict[tuple[LanguagePair, str], set[str]] = defaultdict(set)
    for rec in records:
        if rec.origin is Origin.GOLD:
            gold[(rec.pair, rec.source)].add(rec.hypothesis)

    conflicts = []
    chosen: dict[tuple[LanguagePair, str], str] = {}
    for key, texts in gold.items():
        ordered = sorted(texts)
        if len(ordered) > 1:
            conflicts.append(f"{key[0]} {key[1][:40]!r}: {len(ordered)} distinct gold texts")
        chosen[key] = ordered[0]

    kept, dropped_items = [], set()
    for rec in records:
        ref = chosen.get((rec.pair, rec.source))
        if ref is None:
            dropped_items.add(rec.text_key)
            continue
        kept.append(rec if rec.reference == ref else replace(rec, reference=ref))
    report = DropReport(len(records), len(records) - len(kept), len(dropped_items), conflicts)
    rejected = rs.rejected if isinstance(rs, RatingSet) else []
    return RatingSet(kept, list(rejected)), report


# -- folded segments -----------------------------------------------------------


def folded_to_dict(seg: FoldedSegment) -> dict[str, Any]:
    out = asdict(seg)
    out["pair"] = str(seg.pair)
    out["origin"] = seg.origin.value
    out["domain"] = seg.domain.value
    out["bucket"] = seg.bucket.value
    out["segment_key"] = seg.key
    return out


def folded_from_dict(obj: Mapping[str, Any]) -> FoldedSegment:
    return FoldedSegment(
        pair=LanguagePair.parse(obj["pair"]),
        source=obj["source"],
        hypothesis=obj["hypothesis"],
        origin=Origin(obj["origin"]),
        domain=Domain(obj["domain"]),
        bucket=LengthBucket(obj["bucket"]),
        reference=obj["reference"],
        n_ratings=int(obj["n_ratings"]),
        n_raters=int(obj["n_raters"]),
        raw_mean=float(obj["raw_mean"]),
        z_mean=float(obj["z_mean"]),
        norm_score=float(obj["norm_score"]),
    )


def write_folded(segments: Iterable[FoldedSegment], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for seg in segments:
            fh.write(json.dumps(folded_to_dict(seg), ensure_ascii=False, sort_keys=True) + "\n")


def read_folded(path: str | Path) -> list[FoldedSegment]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip():
                try:
                    out.append(folded_from_dict(json.loads(line)))
                except (KeyError, ValueError) as exc:
                    raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return out


# -- score files ---------------------------------------------------------------


def write_scores(rows: Iterable[tuple[str, str, float]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("segment_key\tmetric\tscore\n")
        for key, metric, score in rows:
            fh.write(f"{key}\t{metric}\t{score!r}\n")


def read_scores(path: str | Path) -> dict[str, dict[str, float]]:
    """Return ``{metric: {segment_key: score}}``."""
    scores: dict[str, dict[str, float]] = defaultdict(dict)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or (lineno == 1 and line.startswith("segment_key\t")):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValidationError(f"{path}:{lineno}: expected 3 tab-separated fields")
            key, metric, raw = parts
            try:
                value = float(raw)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: score {raw!r} is not a number") from None
            if not math.isfinite(value):
                raise ValidationError(f"{path}:{lineno}: score must be finite")
            if key in scores[metric]:
                raise ValidationError(f"{path}:{lineno}: duplicate score for {key} / {metric}")
            scores[metric][key] = value
    return dict(scores)


# -- challenge sets and lexicons -----------------------------------------------


def load_challenge_set(path: str | Path, phenomena: Iterable[str] | None = DEFAULT_PHENOMENA) -> list[ChallengeItem]:
    """Read a challenge JSONL file; ``phenomena=None`` accepts any label."""
    vocab = frozenset(phenomena) if phenomena is not None else None
    items = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            try:
                item = ChallengeItem(**{k: obj[k] for k in ChallengeItem.__dataclass_fields__})
            except KeyError as exc:
                raise ValidationError(f"{path}:{lineno}: missing field {exc}") from None
            if item.good_translation == item.incorrect_translation:
                raise ValidationError(f"{path}:{lineno}: good and incorrect translations are identical")
            if vocab is not None and item.phenomenon not in vocab:
                raise ValidationError(f"{path}:{lineno}: unknown phenomenon {item.phenomenon!r}")
            LanguagePair.parse(item.pair)
            items.append(item)
    return items


def load_lexicon(path: str | Path) -> Lexicon:
    entries: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            word, sep, syns = line.partition("\t")
            synonyms = [s for s in syns.split("|") if s and s != word]
            if not sep or not synonyms:
                raise ValidationError(f"{path}:{lineno}: expected 'word<TAB>syn1|syn2'")
            entries.setdefault(word, []).extend(s for s in synonyms if s not in entries.get(word, []))
    return Lexicon(entries)


# -- reports -------------------------------------------------------------------


def _fmt(value: float | None, precision: int) -> str:
    return "NA" if value is None else f"{value:.{precision}f}"


def emit_report(report: CorrelationReport, path: str | Path | None = None, precision: int = 2) -> str:
    """Render a correlation report as TSV; write it to ``path`` when given."""
    metrics = report.metrics
    lines = ["\t".join(["src", "tgt", "count", *metrics])]
    for row in report.rows:
        cells = [_fmt(row.taus.get(m), precision) for m in metrics]
        lines.append("\t".join([row.pair.src, row.pair.tgt, str(row.count), *cells]))
    total = str(report.total_count)
    lines.append("\t".join(["all*", "all", total, *(_fmt(report.simple_avg(m), precision) for m in metrics)]))
    lines.append("\t".join(["all†", "all", total, *(_fmt(report.weighted_avg(m), precision) for m in metrics)]))
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_report(path: str | Path) -> CorrelationReport:
    """Parse a report TSV back into a :class:`CorrelationReport` (footers are recomputed)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[:3] != ["src", "tgt", "count"]:
            raise ValidationError(f"{path}: not a report file")
        metrics = header[3:]
        rows = []
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            if not parts[0] or parts[0].startswith("all"):
                continue
            taus = {m: (None if v == "NA" else float(v)) for m, v in zip(metrics, parts[3:])}
            rows.append(PairRow(LanguagePair(parts[0], parts[1]), int(parts[2]), taus))
    return CorrelationReport(rows, metrics)


def write_audit(audit, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("stage\traters_removed\titems_removed\tpct_of_input\n")
        for stage in audit.stages:
            fh.write(f"{stage.stage}\t{stage.raters_removed}\t{stage.items_removed}\t{stage.pct_of_input:.4f}\n")


def write_split_manifest(assignment, path: str | Path) -> None:
    rows = []
    for split_name in ("train", "dev", "test"):
        rows.extend((seg.key, seg.origin.value, split_name) for seg in assignment.splits[split_name])
    rows.extend((seg.key, seg.origin.value, f"dropped:{split}") for seg, split in assignment.dropped)
    rows.sort()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("segment_key\torigin\tsplit\n")
        for row in rows:
            fh.write("\t".join(row) + "\n")


def read_split_manifest(path: str | Path) -> dict[tuple[str, str], str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            key, origin, split = line.rstrip("\n").split("\t")
            out[(key, origin)] = split
    return out
