import pytest

from indic_mteval.core import Domain, LanguagePair, Origin, QCRole, RatingRecord, length_bucket

HIN = LanguagePair("eng", "hin")


def make_record(
    rater="r1",
    score=50,
    source="the cat sat",
    hypothesis="billi baithi",
    origin=Origin.GOOGLE,
    pair=HIN,
    item=None,
    **kw,
):
    return RatingRecord(
        item_id=item or f"{source}::{origin.value}",
        pair=pair,
        source=source,
        hypothesis=hypothesis,
        origin=origin,
        domain=kw.pop("domain", Domain.GENERAL),
        bucket=length_bucket(source),
        rater_id=rater,
        raw_score=score,
        qc_role=kw.pop("qc_role", QCRole.NONE),
        **kw,
    )


@pytest.fixture
def rec():
    return make_record


def make_segment(source="s", hypothesis="h", pair=HIN, origin=Origin.GOOGLE, domain=Domain.GENERAL, norm=0.5):
    from indic_mteval.core import FoldedSegment

    return FoldedSegment(
        pair=pair, source=source, hypothesis=hypothesis, origin=origin, domain=domain,
        bucket=length_bucket(source), reference="ref", n_ratings=2, n_raters=2,
        raw_mean=50.0, z_mean=0.0, norm_score=norm,
    )


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)
