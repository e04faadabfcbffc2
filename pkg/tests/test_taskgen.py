from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indic_mteval.core import GROUP_OF_ORIGIN, Origin, QCRole, QualityClass, SamplingGroup
from indic_mteval.taskgen import (
    MIN_REPEAT_GAP,
    InsufficientOriginsError,
    build_task_files,
    campaign_items,
    decode_meta,
    sample_hypotheses,
    task_rows,
    write_task_files,
)


def _sources(n):
    return [{"source_id": f"s{i}", "source": f"source {i}", "pair": "eng-hin", "domain": "general",
             "hypotheses": {o.value: f"{o.value} says {i}" for o in Origin}} for i in range(n)]


def test_sample_composition():
    chosen = sample_hypotheses("src", list(Origin), seed=1)
    groups = Counter(GROUP_OF_ORIGIN[o] for o in chosen)
    assert groups == {SamplingGroup.PRIMARY: 2, SamplingGroup.DEGRADED: 1, SamplingGroup.LLM: 1, SamplingGroup.HUMAN: 1}
    assert Origin.GOLD in chosen and len(set(chosen)) == 5


def test_sample_insufficient():
    with pytest.raises(InsufficientOriginsError, match="primary"):
        sample_hypotheses("src", [Origin.GOOGLE, Origin.PERTURB, Origin.GPT35, Origin.GOLD])
    with pytest.raises(InsufficientOriginsError, match="human"):
        sample_hypotheses("src", [o for o in Origin if o is not Origin.GOLD])


def test_sample_deterministic_but_seed_sensitive():
    runs = {tuple(sample_hypotheses(f"src{i}", list(Origin), seed=0)) for i in range(50)}
    assert len(runs) > 1
    assert sample_hypotheses("x", list(Origin), 3) == sample_hypotheses("x", list(Origin), 3)


def _check_file(task):
    roles = Counter(s.qc_role for s in task.slots)
    assert roles[QCRole.QC_ORIGINAL] == 2 and roles[QCRole.QC_REPEAT] == 2
    assert [s.slot for s in task.slots] == list(range(len(task)))
    for quality in (QualityClass.GOOD, QualityClass.BAD):
        qc = [s for s in task.slots if s.qc_quality is quality]
        orig = next(s for s in qc if s.qc_role is QCRole.QC_ORIGINAL)
        rep = next(s for s in qc if s.qc_role is QCRole.QC_REPEAT)
        assert orig.item is rep.item
        assert classify(orig.item) is quality
        if len(task) >= MIN_REPEAT_GAP + 2:
            assert rep.slot - orig.slot >= MIN_REPEAT_GAP


def classify(item):
    from indic_mteval.core import classify_quality

    return classify_quality(item["origin"])


def test_two_full_files():
    items = campaign_items(_sources(16))  # 80 items
    tasks = build_task_files(items, items, seed=0)
    assert [len(t) for t in tasks] == [44, 44]
    for t in tasks:
        _check_file(t)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 60), st.integers(0, 10**6))
def test_every_item_once(n_sources, seed):
    items = campaign_items(_sources(n_sources), seed=seed)
    tasks = build_task_files(items, items, seed=seed)
    regular = [s.item["item_id"] for t in tasks for s in t.slots if s.qc_role is QCRole.NONE]
    assert Counter(regular) == Counter(i["item_id"] for i in items)
    for t in tasks[:-1]:
        assert len(t) == 44
    for t in tasks:
        _check_file(t)


def test_seeds_change_order():
    items = campaign_items(_sources(20))
    orders = {tuple(s.item["item_id"] for s in build_task_files(items, items, seed=k)[0].slots) for k in range(20)}
    assert len(orders) == 20


def test_empty_pool():
    items = campaign_items(_sources(2))
    with pytest.raises(ValueError):
        build_task_files(items, [], seed=0)
    with pytest.raises(ValueError):
        build_task_files(items, [i for i in items if i["origin"] == "gold"], seed=0)


def test_meta_hides_qc(tmp_path):
    items = campaign_items(_sources(8))
    (task,) = build_task_files(items, items, seed=2)
    rows = task_rows(task)
    assert all("origin" not in r and "qc_role" not in r for r in rows)
    metas = [decode_meta(r["meta"]) for r in rows]
    assert Counter(m["qc_role"] for m in metas) == {"none": 40, "qc_original": 2, "qc_repeat": 2}
    path = tmp_path / "tasks.jsonl"
    write_task_files([task], path)
    assert len(path.read_text().splitlines()) == 44
