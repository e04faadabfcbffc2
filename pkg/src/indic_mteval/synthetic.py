"""Synthetic rating campaigns with planted rater behaviours.

Each language pair gets a pool of sources with five sampled hypotheses each.
A hypothesis has a latent quality (good-class origins around ``good_mean``,
bad-class ones ``gap`` points lower) and its text is the reference with a
quality-dependent share of words replaced, so surface metrics track it.
Every rater of a pair rates the same task files.

Rater behaviours:

``good``
    latent quality + rater bias + Gaussian noise (``noise``)
``non_discerning``
    scores every item from one distribution
``inconsistent``
    like ``good`` but repeats are scored ``repeat_shift`` points higher
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from indic_mteval.core import (
    Domain,
    LanguagePair,
    Origin,
    QCRole,
    QualityClass,
    RatingRecord,
    classify_quality,
    length_bucket,
)
from indic_mteval.taskgen import build_task_files, campaign_items

BEHAVIOURS = ("good", "non_discerning", "inconsistent")

CLASS_OFFSET = {QualityClass.GOOD: 0.0, QualityClass.NEUTRAL: -15.0, QualityClass.BAD: None}
ORIGIN_JITTER = {
    Origin.GOLD: 5.0,
    Origin.GOOGLE: 1.0,
    Origin.MS_BING: 0.0,
    Origin.VERSIONVN: -2.0,
    Origin.INDICTRANS2: 2.0,
    Origin.SEAMLESS: -3.0,
    Origin.GPT35: 0.0,
    Origin.OLDX: 3.0,
    Origin.PERTURB: 0.0,
    Origin.PERTURBED_MULTIPLE: -5.0,
}


@dataclass
class Campaign:
    pairs: Sequence[str] = ("eng-hin", "eng-tam")
    raters_per_pair: int = 5
    files_per_rater: int = 10
    behaviours: Mapping[str, str] = field(default_factory=dict)
    good_mean: float = 80.0
    gap: float = 40.0
    noise: float = 10.0
    item_noise: float = 8.0
    repeat_shift: float = 30.0
    extreme_share: float = 0.03
    seed: int = 0

    def rater_ids(self, pair: str) -> list[str]:
        return [f"{pair}-r{i:02d}" for i in range(self.raters_per_pair)]


def _sentence(rng: random.Random, vocab: Sequence[str], lo: int = 4, hi: int = 30) -> list[str]:
    return [rng.choice(vocab) for _ in range(rng.randint(lo, hi))]


def _degrade(words: list[str], quality: float, rng: random.Random, vocab: Sequence[str]) -> list[str]:
    damage = min(1.0, max(0.0, (100.0 - quality) / 100.0))
    return [w if rng.random() >= damage else rng.choice(vocab) for w in words]


def _sources(pair: str, n_sources: int, campaign: Campaign, rng: random.Random):
    src_vocab = [f"{pair[:3]}{i}" for i in range(400)]
    tgt_vocab = [f"{pair[4:]}{i}" for i in range(400)]
    domains = list(Domain)
    out, quality = [], {}
    for s in range(n_sources):
        src = " ".join(_sentence(rng, src_vocab))
        ref = _sentence(rng, tgt_vocab)
        extreme = None
        if rng.random() < campaign.extreme_share:
            extreme = rng.choice((-60.0, 160.0))
        hyps = {}
        for origin in Origin:
            cls = classify_quality(origin)
            offset = CLASS_OFFSET[cls] if CLASS_OFFSET[cls] is not None else -campaign.gap
            q = campaign.good_mean + offset + ORIGIN_JITTER[origin] + rng.gauss(0, campaign.item_noise)
            if extreme is not None:
                q = extreme
            text = " ".join(ref) if origin is Origin.GOLD else " ".join(_degrade(ref, q, rng, tgt_vocab))
            if origin is not Origin.GOLD and text == " ".join(ref):
                text += f" {origin.value.lower()}"
            hyps[origin.value] = text
            quality[(src, text)] = q
        out.append({"source_id": f"{pair}-s{s:05d}", "source": src, "pair": pair,
                    "domain": domains[s % len(domains)].value, "hypotheses": hyps})
    return out, quality


def _clip(x: float) -> int:
    return int(min(100, max(1, round(x))))


def generate(campaign: Campaign) -> tuple[list[RatingRecord], dict[str, str]]:
    """Return (rating records, {rater_id: behaviour})."""
    rng = random.Random(f"{campaign.seed}:synthetic")
    records: list[RatingRecord] = []
    truth: dict[str, str] = {}
    for pair in campaign.pairs:
        lp = LanguagePair.parse(pair)
        n_items = campaign.files_per_rater * 40
        sources, quality = _sources(pair, -(-n_items // 5), campaign, rng)
        items = campaign_items(sources, seed=campaign.seed)[:n_items]
        qc_pool = [i for i in items if classify_quality(i["origin"]) is not QualityClass.NEUTRAL]
        tasks = build_task_files(items, qc_pool, seed=campaign.seed, prefix=pair)
        for rater in campaign.rater_ids(pair):
            behaviour = campaign.behaviours.get(rater, "good")
            if behaviour not in BEHAVIOURS:
                raise ValueError(f"unknown behaviour {behaviour!r}")
            truth[rater] = behaviour
            bias = rng.gauss(0, 5)
            for task in tasks:
                originals: dict[str, float] = {}
                for slot in task.slots:
                    item = slot.item
                    q = quality[(item["source"], item["hypothesis"])]
                    if behaviour == "non_discerning":
                        score = rng.gauss(55, 15)
                    else:
                        score = q + bias + rng.gauss(0, campaign.noise)
                        if slot.qc_role is QCRole.QC_REPEAT and behaviour == "inconsistent":
                            score = originals.get(item["item_id"], score) + campaign.repeat_shift
                    if slot.qc_role is QCRole.QC_ORIGINAL:
                        originals[item["item_id"]] = score
                    records.append(
                        RatingRecord(
                            item_id=item["item_id"],
                            pair=lp,
                            source=item["source"],
                            hypothesis=item["hypothesis"],
                            origin=Origin(item["origin"]),
                            domain=Domain(item["domain"]),
                            bucket=length_bucket(item["source"]),
                            rater_id=rater,
                            raw_score=_clip(score),
                            qc_role=slot.qc_role,
                            qc_quality=slot.qc_quality,
                            task_id=task.task_id,
                        )
                    )
    return records, truth
