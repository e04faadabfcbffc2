import pytest
from hypothesis import given
from hypothesis import strategies as st

from indic_mteval.core import (
    DEFAULT_DIRECTIONS,
    FAMILIES,
    SUBFAMILIES,
    TARGET_LANGUAGES,
    LanguagePair,
    LengthBucket,
    Origin,
    QCRole,
    QualityClass,
    SamplingGroup,
    ValidationError,
    classify_quality,
    family_of,
    length_bucket,
    sampling_group,
    segment_key,
)
from conftest import make_record


def test_quality_examples():
    assert classify_quality(Origin.GOLD) is QualityClass.GOOD
    assert classify_quality("perturb") is QualityClass.BAD
    assert classify_quality(Origin.SEAMLESS) is QualityClass.NEUTRAL


def test_origin_maps_total_and_consistent():
    for origin in Origin:
        cls, group = classify_quality(origin), sampling_group(origin)
        if group is SamplingGroup.DEGRADED:
            assert cls is QualityClass.BAD
        if cls is QualityClass.BAD:
            assert group is SamplingGroup.DEGRADED
    assert sampling_group(Origin.GOLD) is SamplingGroup.HUMAN
    assert sampling_group(Origin.GPT35) is SamplingGroup.LLM
    assert sum(sampling_group(o) is SamplingGroup.PRIMARY for o in Origin) == 5


def test_unknown_origin():
    with pytest.raises(ValueError):
        classify_quality("DeepL")


@pytest.mark.parametrize(
    "n, bucket",
    [(1, LengthBucket.B0_10), (5, LengthBucket.B0_10), (10, LengthBucket.B0_10), (11, LengthBucket.B10_20),
     (20, LengthBucket.B10_20), (21, LengthBucket.B20_35), (35, LengthBucket.B20_35), (36, LengthBucket.B35_100),
     (100, LengthBucket.B35_100)],
)
def test_length_bucket_boundaries(n, bucket):
    assert length_bucket(" ".join(["w"] * n)) is bucket


def test_length_bucket_errors():
    with pytest.raises(ValidationError):
        length_bucket("   ")
    with pytest.raises(ValidationError):
        length_bucket(" ".join(["w"] * 101))


def test_length_bucket_unicode_whitespace():
    assert length_bucket("एक दो\tतीन　चार") is LengthBucket.B0_10


@given(st.integers(1, 99))
def test_length_bucket_monotone(n):
    order = list(LengthBucket)
    a = length_bucket(" ".join(["x"] * n))
    b = length_bucket(" ".join(["x"] * (n + 1)))
    assert order.index(a) <= order.index(b)


@pytest.mark.parametrize(
    "tgt, fam, sub",
    [("kas", "indo-aryan", "ia-dardic"), ("tel", "dravidian", "dv-south-central"), ("mar", "indo-aryan", "ia-south"),
     ("tam", "dravidian", "dv-south"), ("snd", "indo-aryan", "ia-north-west")],
)
def test_family_of(tgt, fam, sub):
    tag = family_of(tgt)
    assert (tag.family, tag.subfamily) == (fam, sub)


def test_family_tables_cover_targets():
    assert {family_of(t).family for t in TARGET_LANGUAGES} == set(FAMILIES)
    assert {family_of(t).subfamily for t in TARGET_LANGUAGES} == set(SUBFAMILIES)
    assert {t for t in TARGET_LANGUAGES if family_of(t).family == "dravidian"} == {"kan", "tel", "tam"}
    with pytest.raises(ValidationError):
        family_of("fra")


def test_language_pair():
    assert len(DEFAULT_DIRECTIONS) == 21
    p = LanguagePair.parse("hin-doi")
    assert str(p) == "hin-doi"
    p.validate()
    with pytest.raises(ValidationError):
        LanguagePair.parse("hin-tam").validate()
    LanguagePair.parse("hin-tam").validate(directions=None)
    with pytest.raises(ValidationError):
        LanguagePair("fra", "hin").validate(directions=None)
    with pytest.raises(ValidationError):
        LanguagePair.parse("enghin")


def test_rating_record_invariants():
    make_record(score=0)
    make_record(score=100)
    for bad in (-1, 101, 50.5, True):
        with pytest.raises(ValidationError):
            make_record(score=bad)
    with pytest.raises(ValidationError):
        make_record(qc_role=QCRole.QC_ORIGINAL)
    with pytest.raises(ValidationError):
        make_record(qc_quality=QualityClass.GOOD)
    with pytest.raises(ValidationError):
        make_record(qc_role=QCRole.QC_ORIGINAL, qc_quality=QualityClass.NEUTRAL)
    make_record(qc_role=QCRole.QC_REPEAT, qc_quality=QualityClass.BAD)


def test_segment_key_frozen():
    # sha256(b"eng\x1fhin\x1fa\x1fb")
    import hashlib

    expected = hashlib.sha256("eng\x1fhin\x1fa\x1fb".encode()).hexdigest()
    assert segment_key(LanguagePair("eng", "hin"), "a", "b") == expected
    assert segment_key(LanguagePair("eng", "hin"), "a", "b") != segment_key(LanguagePair("eng", "hin"), "ab", "")
    assert make_record().key == segment_key(make_record().pair, "the cat sat", "billi baithi")
