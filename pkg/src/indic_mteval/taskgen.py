"""Rating campaign assembly: hypothesis sampling and task files with QC items.

A complete task file holds 44 slots: 40 regular items, one good and one bad
QC item, and a repeat of each QC item placed at least ``MIN_REPEAT_GAP``
slots after its original. QC markers and system origins travel in an opaque
``meta`` field so the rating interface cannot reveal them.
"""

from __future__ import annotations

import base64
import json
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from indic_mteval.core import (
    GROUP_OF_ORIGIN,
    Origin,
    QCRole,
    QualityClass,
    SamplingGroup,
    classify_quality,
)

SLOTS_PER_FILE = 44
QC_PER_FILE = 4
REGULAR_PER_FILE = SLOTS_PER_FILE - QC_PER_FILE
MIN_REPEAT_GAP = 10

SAMPLE_COMPOSITION = {
    SamplingGroup.PRIMARY: 2,
    SamplingGroup.DEGRADED: 1,
    SamplingGroup.LLM: 1,
    SamplingGroup.HUMAN: 1,
}


class InsufficientOriginsError(ValueError):
    pass


def sample_hypotheses(source: str, available_origins: Iterable[Origin | str], seed: int = 0) -> list[Origin]:
    """Pick 2 primary, 1 degraded, 1 LLM and 1 human origin for one source."""
    rng = random.Random(f"{seed}:sample:{source}")
    pool: dict[SamplingGroup, list[Origin]] = defaultdict(list)
    for origin in sorted({Origin(o) for o in available_origins}, key=lambda o: o.value):
        pool[GROUP_OF_ORIGIN[origin]].append(origin)
    chosen: list[Origin] = []
    for group, count in SAMPLE_COMPOSITION.items():
        if len(pool[group]) < count:
            raise InsufficientOriginsError(
                f"group {group.value!r} needs {count} origin(s), only {len(pool[group])} available"
            )
        chosen.extend(rng.sample(pool[group], count))
    return chosen


def campaign_items(sources: Iterable[Mapping[str, Any]], seed: int = 0) -> list[dict[str, Any]]:
    """Expand source records into five sampled (source, hypothesis) items each.

    Each source mapping provides ``source`` and ``hypotheses`` (origin ->
    text); any other keys (pair, domain, ...) are copied onto its items.
    """
    items = []
    for rec in sources:
        hyps = {Origin(o): text for o, text in rec["hypotheses"].items()}
        base = {k: v for k, v in rec.items() if k != "hypotheses"}
        for origin in sample_hypotheses(rec["source"], hyps, seed):
            item_id = f"{base.get('source_id', rec['source'])}::{origin.value}"
            items.append({**base, "item_id": item_id, "origin": origin.value, "hypothesis": hyps[origin]})
    return items


@dataclass(frozen=True)
class TaskSlot:
    slot: int
    item: Mapping[str, Any]
    qc_role: QCRole = QCRole.NONE
    qc_quality: QualityClass | None = None


@dataclass
class TaskFile:
    task_id: str
    slots: list[TaskSlot] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.slots)


def encode_meta(payload: Mapping[str, Any]) -> str:
    raw = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return base64.urlsafe_b64encode(raw).decode("ascii")


def decode_meta(meta: str) -> dict[str, Any]:
    return json.loads(base64.urlsafe_b64decode(meta.encode("ascii")))


def _qc_layout(n_slots: int, rng: random.Random) -> tuple[int, int, int, int]:
    """Slots (good original, good repeat, bad original, bad repeat)."""
    if n_slots < 4:
        raise ValueError("a task file needs at least 4 slots")
    if n_slots > MIN_REPEAT_GAP + 2:
        for _ in range(1000):
            a, b = sorted(rng.sample(range(n_slots), 2))
            c, d = sorted(rng.sample([i for i in range(n_slots) if i not in (a, b)], 2))
            if b - a >= MIN_REPEAT_GAP and d - c >= MIN_REPEAT_GAP:
                return (a, b, c, d) if rng.random() < 0.5 else (c, d, a, b)
    # originals first, repeats last: the widest gap a short file allows
    return 0, n_slots - 2, 1, n_slots - 1


def build_task_files(
    items: Sequence[Mapping[str, Any]],
    qc_pool: Sequence[Mapping[str, Any]],
    seed: int = 0,
    prefix: str = "task",
) -> list[TaskFile]:
    """Distribute ``items`` over task files and embed QC items.

    Items are mappings carrying at least ``item_id`` and ``origin``. QC items
    are drawn from ``qc_pool`` by the quality class of their origin. The last
    file may hold fewer than 40 regular items but always carries 4 QC slots.
    """
    good = [q for q in qc_pool if classify_quality(q["origin"]) is QualityClass.GOOD]
    bad = [q for q in qc_pool if classify_quality(q["origin"]) is QualityClass.BAD]
    if not good or not bad:
        raise ValueError("qc_pool needs at least one good-class and one bad-class item")
    rng = random.Random(f"{seed}:tasks")
    order = list(items)
    rng.shuffle(order)
    files = []
    for start in range(0, len(order), REGULAR_PER_FILE):
        chunk = order[start : start + REGULAR_PER_FILE]
        n_slots = len(chunk) + QC_PER_FILE
        g, b = rng.choice(good), rng.choice(bad)
        g0, g1, b0, b1 = _qc_layout(n_slots, rng)
        fixed = {
            g0: (g, QCRole.QC_ORIGINAL, QualityClass.GOOD),
            g1: (g, QCRole.QC_REPEAT, QualityClass.GOOD),
            b0: (b, QCRole.QC_ORIGINAL, QualityClass.BAD),
            b1: (b, QCRole.QC_REPEAT, QualityClass.BAD),
        }
        regular = iter(chunk)
        task = TaskFile(f"{prefix}-{len(files):05d}")
        for slot in range(n_slots):
            if slot in fixed:
                item, role, quality = fixed[slot]
                task.slots.append(TaskSlot(slot, item, role, quality))
            else:
                task.slots.append(TaskSlot(slot, next(regular)))
        files.append(task)
    return files


def task_rows(task: TaskFile) -> list[dict[str, Any]]:
    """JSON-ready rows of a task file, QC flags and origin hidden in ``meta``."""
    rows = []
    for s in task.slots:
        visible = {k: v for k, v in s.item.items() if k != "origin"}
        meta = {
            "origin": Origin(s.item["origin"]).value,
            "qc_role": s.qc_role.value,
            "qc_quality": s.qc_quality.value if s.qc_quality else None,
        }
        rows.append({**visible, "task_id": task.task_id, "slot": s.slot, "meta": encode_meta(meta)})
    return rows


def write_task_files(tasks: Iterable[TaskFile], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for task in tasks:
            for row in task_rows(task):
                fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
