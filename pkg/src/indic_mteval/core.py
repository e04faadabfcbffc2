"""Domain types shared by every stage of the ratings pipeline.

Records are frozen dataclasses; derived values (z-scores, normalized scores,
references) are attached with :func:`dataclasses.replace`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable


class Origin(str, Enum):
    """System (or procedure) that produced a translation hypothesis."""

    GPT35 = "GPT3.5"
    GOOGLE = "Google"
    INDICTRANS2 = "IndicTrans2"
    MS_BING = "MS_Bing"
    SEAMLESS = "Seamless"
    GOLD = "gold"
    OLDX = "oldX"
    PERTURB = "perturb"
    PERTURBED_MULTIPLE = "perturbed_multiple"
    VERSIONVN = "versionvN"


class QualityClass(str, Enum):
    GOOD = "good"
    BAD = "bad"
    NEUTRAL = "neutral"


class SamplingGroup(str, Enum):
    PRIMARY = "primary"
    DEGRADED = "degraded"
    LLM = "LLM"
    HUMAN = "human"


class Domain(str, Enum):
    GENERAL = "general"
    GOVERNANCE = "governance"
    HEALTH = "health"


class LengthBucket(str, Enum):
    B0_10 = "B0_10"
    B10_20 = "B10_20"
    B20_35 = "B20_35"
    B35_100 = "B35_100"


class QCRole(str, Enum):
    NONE = "none"
    QC_ORIGINAL = "qc_original"
    QC_REPEAT = "qc_repeat"


QUALITY_OF_ORIGIN: dict[Origin, QualityClass] = {
    Origin.VERSIONVN: QualityClass.GOOD,
    Origin.GOLD: QualityClass.GOOD,
    Origin.MS_BING: QualityClass.GOOD,
    Origin.GOOGLE: QualityClass.GOOD,
    Origin.PERTURB: QualityClass.BAD,
    Origin.OLDX: QualityClass.BAD,
    Origin.PERTURBED_MULTIPLE: QualityClass.BAD,
    Origin.GPT35: QualityClass.NEUTRAL,
    Origin.INDICTRANS2: QualityClass.NEUTRAL,
    Origin.SEAMLESS: QualityClass.NEUTRAL,
}

GROUP_OF_ORIGIN: dict[Origin, SamplingGroup] = {
    Origin.MS_BING: SamplingGroup.PRIMARY,
    Origin.GOOGLE: SamplingGroup.PRIMARY,
    Origin.SEAMLESS: SamplingGroup.PRIMARY,
    Origin.INDICTRANS2: SamplingGroup.PRIMARY,
    Origin.VERSIONVN: SamplingGroup.PRIMARY,
    Origin.OLDX: SamplingGroup.DEGRADED,
    Origin.PERTURB: SamplingGroup.DEGRADED,
    Origin.PERTURBED_MULTIPLE: SamplingGroup.DEGRADED,
    Origin.GPT35: SamplingGroup.LLM,
    Origin.GOLD: SamplingGroup.HUMAN,
}

SOURCE_LANGUAGES = frozenset({"eng", "hin"})
TARGET_LANGUAGES = frozenset(
    {"ban", "guj", "hin", "kan", "kas", "mar", "odi", "pan", "snd", "tam", "tel", "urd", "doi"}
)

# Directions retained in the released dataset (hin-tam excluded).
DEFAULT_DIRECTIONS: frozenset[tuple[str, str]] = frozenset(
    [("eng", t) for t in ("ban", "guj", "hin", "kan", "kas", "mar", "odi", "pan", "tam", "tel", "urd")]
    + [("hin", t) for t in ("ban", "doi", "guj", "kan", "mar", "odi", "pan", "snd", "tel", "urd")]
)

# Targets exempt from the discernment filter (very low-resource).
LOW_RESOURCE_TARGETS = frozenset({"kas", "snd", "doi"})

FAMILY_OF_TARGET: dict[str, tuple[str, str]] = {
    "doi": ("indo-aryan", "ia-north"),
    "pan": ("indo-aryan", "ia-north-west"),
    "snd": ("indo-aryan", "ia-north-west"),
    "mar": ("indo-aryan", "ia-south"),
    "ban": ("indo-aryan", "ia-east"),
    "odi": ("indo-aryan", "ia-east"),
    "guj": ("indo-aryan", "ia-west"),
    "hin": ("indo-aryan", "ia-central"),
    "urd": ("indo-aryan", "ia-central"),
    "kas": ("indo-aryan", "ia-dardic"),
    "tel": ("dravidian", "dv-south-central"),
    "tam": ("dravidian", "dv-south"),
    "kan": ("dravidian", "dv-south"),
}

FAMILIES = ("indo-aryan", "dravidian")
SUBFAMILIES = (
    "dv-south",
    "dv-south-central",
    "ia-central",
    "ia-dardic",
    "ia-east",
    "ia-north",
    "ia-north-west",
    "ia-south",
    "ia-west",
)

# (low, high] word-count limits per bucket
BUCKET_LIMITS: tuple[tuple[LengthBucket, int, int], ...] = (
    (LengthBucket.B0_10, 0, 10),
    (LengthBucket.B10_20, 10, 20),
    (LengthBucket.B20_35, 20, 35),
    (LengthBucket.B35_100, 35, 100),
)


class ValidationError(ValueError):
    """Raised when data violates a domain invariant."""


@dataclass(frozen=True, order=True)
class LanguagePair:
    src: str
    tgt: str

    def __str__(self) -> str:
        return f"{self.src}-{self.tgt}"

    @classmethod
    def parse(cls, text: str) -> "LanguagePair":
        src, sep, tgt = text.partition("-")
        if not sep or not src or not tgt:
            raise ValidationError(f"bad language pair {text!r}, expected 'src-tgt'")
        return cls(src, tgt)

    def validate(self, directions: Iterable[tuple[str, str]] | None = DEFAULT_DIRECTIONS) -> None:
        """Check the pair against an allow-list; ``None`` only checks the codes."""
        if self.src not in SOURCE_LANGUAGES:
            raise ValidationError(f"unknown source language {self.src!r}")
        if self.tgt not in TARGET_LANGUAGES:
            raise ValidationError(f"unknown target language {self.tgt!r}")
        if directions is not None and (self.src, self.tgt) not in set(directions):
            raise ValidationError(f"direction {self} is not in the allowed direction list")


@dataclass(frozen=True)
class FamilyTag:
    family: str
    subfamily: str


@dataclass(frozen=True)
class RatingRecord:
    """One rater's raw 0-100 judgment of one (source, hypothesis) item."""

    item_id: str
    pair: LanguagePair
    source: str
    hypothesis: str
    origin: Origin
    domain: Domain
    bucket: LengthBucket
    rater_id: str
    raw_score: int
    qc_role: QCRole = QCRole.NONE
    qc_quality: QualityClass | None = None
    task_id: str | None = None
    reference: str | None = None
    z: float | None = None
    norm: float | None = None
    extra: dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        if isinstance(self.raw_score, bool) or not isinstance(self.raw_score, int):
            raise ValidationError(f"raw_score must be an integer, got {self.raw_score!r}")
        if not 0 <= self.raw_score <= 100:
            raise ValidationError(f"raw_score {self.raw_score} outside [0, 100]")
        if (self.qc_quality is None) != (self.qc_role is QCRole.NONE):
            raise ValidationError("qc_quality must be set exactly when qc_role is not 'none'")
        if self.qc_quality is QualityClass.NEUTRAL:
            raise ValidationError("qc_quality must be 'good' or 'bad'")

    @property
    def key(self) -> str:
        return segment_key(self.pair, self.source, self.hypothesis)

    @property
    def text_key(self) -> tuple[LanguagePair, str, str]:
        return (self.pair, self.source, self.hypothesis)


@dataclass(frozen=True)
class FoldedSegment:
    """A unique (pair, source, hypothesis) with scores aggregated over raters."""

    pair: LanguagePair
    source: str
    hypothesis: str
    origin: Origin
    domain: Domain
    bucket: LengthBucket
    reference: str
    n_ratings: int
    n_raters: int
    raw_mean: float
    z_mean: float
    norm_score: float

    @property
    def key(self) -> str:
        return segment_key(self.pair, self.source, self.hypothesis)

    @property
    def quality(self) -> QualityClass:
        return classify_quality(self.origin)


def segment_key(pair: LanguagePair, source: str, hypothesis: str) -> str:
    """Stable join key: SHA-256 over src, tgt, source and hypothesis joined by 0x1F."""
    payload = "\x1f".join((pair.src, pair.tgt, source, hypothesis)).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def classify_quality(origin: Origin | str) -> QualityClass:
    return QUALITY_OF_ORIGIN[Origin(origin)]


def sampling_group(origin: Origin | str) -> SamplingGroup:
    return GROUP_OF_ORIGIN[Origin(origin)]


def word_count(text: str) -> int:
    return len(text.split())


def length_bucket(source: str) -> LengthBucket:
    """Bucket a source sentence by whitespace word count.

    Ranges are half-open on the left, so a 10-word sentence falls in
    ``B0_10`` and an 11-word sentence in ``B10_20``.
    """
    n = word_count(source)
    if n == 0:
        raise ValidationError("cannot bucket an empty sentence")
    for bucket, low, high in BUCKET_LIMITS:
        if low < n <= high:
            return bucket
    raise ValidationError(f"source has {n} words, above the 100-word limit")


def family_of(tgt: str) -> FamilyTag:
    try:
        family, subfamily = FAMILY_OF_TARGET[tgt]
    except KeyError:
        raise ValidationError(f"unknown target language {tgt!r}") from None
    return FamilyTag(family, subfamily)
