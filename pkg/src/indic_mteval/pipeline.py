"""End-to-end ratings pipeline with a reproducible run manifest.

Stage order is fixed::

    load -> attach_references -> zscore -> verdicts -> filter -> rezscore
    -> anchors -> minmax -> fold -> drop_single -> split -> leakage_filter

Config files are TOML::

    input = "ratings.jsonl"      # relative to the config file
    output_dir = "run"
    seed = 0
    alpha = 0.05
    strict = true                # reject the whole input on any bad line
    anchors = "auto"             # auto | unanimous | observed
    ddof = 1                     # 1 = sample std, 0 = population std
    equal_var = true             # pooled-variance discernment test
    fold_conflicts = "error"     # error | by_origin
    ratios = [0.9, 0.05, 0.05]
    directions = "default"       # default | any | ["eng-hin", ...]
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from indic_mteval import io
from indic_mteval.core import DEFAULT_DIRECTIONS, LanguagePair
from indic_mteval.datasets import leakage_filter, split
from indic_mteval.normalize import (
    AnchorError,
    apply_minmax,
    compute_anchors,
    fold,
    observed_anchors,
    zscore_by_rater,
)
from indic_mteval.qcstats import filter_ratings, rater_verdicts

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

STAGES = (
    "load",
    "attach_references",
    "zscore",
    "verdicts",
    "filter",
    "rezscore",
    "anchors",
    "minmax",
    "fold",
    "drop_single",
    "split",
    "leakage_filter",
)

DEFAULTS: dict[str, Any] = {
    "output_dir": "run",
    "seed": 0,
    "alpha": 0.05,
    "strict": True,
    "anchors": "auto",
    "ddof": 1,
    "equal_var": True,
    "fold_conflicts": "error",
    "ratios": [0.9, 0.05, 0.05],
    "directions": "default",
}


class PipelineError(RuntimeError):
    def __init__(self, message: str, manifest: dict):
        super().__init__(message)
        self.manifest = manifest


def derive_seed(seed: int, label: str) -> int:
    """Stage seed from the run seed by labelled hashing."""
    return int(hashlib.sha256(f"{seed}/{label}".encode()).hexdigest()[:16], 16)


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class PipelineConfig:
    input: Path
    output_dir: Path
    seed: int = 0
    alpha: float = 0.05
    strict: bool = True
    anchors: str = "auto"
    ddof: int = 1
    equal_var: bool = True
    fold_conflicts: str = "error"
    ratios: tuple[float, float, float] = (0.9, 0.05, 0.05)
    directions: Any = "default"

    @classmethod
    def from_mapping(cls, raw: Mapping[str, Any], base_dir: Path | None = None) -> "PipelineConfig":
        unknown = set(raw) - set(DEFAULTS) - {"input"}
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "input" not in raw:
            raise ValueError("config needs an 'input' ratings file")
        merged = {**DEFAULTS, **raw}
        base = base_dir or Path.cwd()
        if merged["anchors"] not in ("auto", "unanimous", "observed"):
            raise ValueError(f"anchors must be auto, unanimous or observed, got {merged['anchors']!r}")
        if merged["fold_conflicts"] not in ("error", "by_origin"):
            raise ValueError("fold_conflicts must be 'error' or 'by_origin'")
        return cls(
            input=base / merged["input"],
            output_dir=base / merged["output_dir"],
            seed=int(merged["seed"]),
            alpha=float(merged["alpha"]),
            strict=bool(merged["strict"]),
            anchors=merged["anchors"],
            ddof=int(merged["ddof"]),
            equal_var=bool(merged["equal_var"]),
            fold_conflicts=merged["fold_conflicts"],
            ratios=tuple(float(r) for r in merged["ratios"]),
            directions=merged["directions"],
        )

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        return cls.from_mapping(raw, path.parent)

    def direction_list(self):
        if self.directions == "default":
            return DEFAULT_DIRECTIONS
        if self.directions == "any":
            return None
        return frozenset((p.src, p.tgt) for p in map(LanguagePair.parse, self.directions))

    def describe(self) -> dict[str, Any]:
        return {
            "input": self.input.name,
            "seed": self.seed,
            "alpha": self.alpha,
            "strict": self.strict,
            "anchors": self.anchors,
            "ddof": self.ddof,
            "equal_var": self.equal_var,
            "fold_conflicts": self.fold_conflicts,
            "ratios": list(self.ratios),
            "directions": self.directions,
        }


@dataclass
class RunManifest:
    config: dict[str, Any]
    input_sha256: str | None = None
    stages: list[dict[str, Any]] = field(default_factory=list)
    anchors: dict[str, Any] | None = None
    outputs: dict[str, str] = field(default_factory=dict)
    status: str = "running"
    error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config,
            "input_sha256": self.input_sha256,
            "seed": self.config["seed"],
            "stage_seeds": {"split": derive_seed(self.config["seed"], "split")},
            "stages": self.stages,
            "anchors": self.anchors,
            "outputs": self.outputs,
            "status": self.status,
            "error": self.error,
        }

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n", "utf-8")


def _ratings_counts(records) -> tuple[int, int]:
    return len({r.text_key for r in records}), len(records)


def _segment_counts(segments) -> tuple[int, int]:
    return len(segments), sum(s.n_ratings for s in segments)


def _write_verdicts(verdicts, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("rater_id\tconsistent\tdiscerning\texempt\tp_consistency\tp_discernment\tn_good\tn_bad\tn_bad_pairs\n")
        for v in verdicts:
            n = v.n_qc_items
            fh.write(
                f"{v.rater_id}\t{int(v.consistent)}\t{int(v.discerning)}\t{int(v.exempt_discernment)}\t"
                f"{v.p_consistency!r}\t{v.p_discernment!r}\t{n['good']}\t{n['bad']}\t{n['bad_pairs']}\n"
            )


def run_pipeline(config: PipelineConfig) -> RunManifest:
    """Run every stage, write outputs into ``config.output_dir``, return the manifest.

    A failing stage stops the run; the manifest of the completed stages is
    written with ``status = "failed"`` and attached to the raised
    :class:`PipelineError`.
    """
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(config.describe())
    prev = {"segments": 0, "ratings": 0}

    def record(stage: str, counts: tuple[int, int], **details: Any) -> None:
        segments, ratings = counts
        entry = {
            "stage": stage,
            "segments_in": prev["segments"],
            "segments_dropped": prev["segments"] - segments,
            "segments_out": segments,
            "ratings_in": prev["ratings"],
            "ratings_dropped": prev["ratings"] - ratings,
            "ratings_out": ratings,
        }
        if stage == "load":
            entry.update(segments_in=segments, segments_dropped=0, ratings_in=ratings, ratings_dropped=0)
        entry.update(details)
        manifest.stages.append(entry)
        prev.update(segments=segments, ratings=ratings)

    stage = "load"
    try:
        manifest.input_sha256 = file_sha256(config.input)
        rs = io.load_ratings(config.input, strict=config.strict, directions=config.direction_list())
        record(stage, _ratings_counts(rs.records), rejected_lines=len(rs.rejected))

        stage = "attach_references"
        rs, drops = io.attach_references(rs)
        records = rs.records
        record(stage, _ratings_counts(records), reference_conflicts=len(drops.conflicts))

        stage = "zscore"
        records = zscore_by_rater(records, ddof=config.ddof, single="zero")
        record(stage, _ratings_counts(records))

        stage = "verdicts"
        verdicts = rater_verdicts(records, alpha=config.alpha, equal_var=config.equal_var)
        _write_verdicts(verdicts, out_dir / "verdicts.tsv")
        record(
            stage,
            _ratings_counts(records),
            raters=len(verdicts),
            inconsistent=sum(not v.consistent for v in verdicts),
            non_discerning=sum(not v.discerning for v in verdicts),
            exempt=sum(v.exempt_discernment for v in verdicts),
        )

        stage = "filter"
        records, audit = filter_ratings(records, verdicts)
        io.write_audit(audit, out_dir / "audit.tsv")
        record(stage, _ratings_counts(records), audit={s.stage: s.items_removed for s in audit.stages})

        stage = "rezscore"
        records = zscore_by_rater(records, ddof=config.ddof, single="zero")
        record(stage, _ratings_counts(records))

        stage = "anchors"
        if config.anchors == "observed":
            anchors = observed_anchors(records)
        else:
            try:
                anchors = compute_anchors(records)
            except AnchorError:
                if config.anchors == "unanimous":
                    raise
                anchors = observed_anchors(records)
        manifest.anchors = {"z_min": anchors.z_min, "z_max": anchors.z_max, "method": anchors.method}
        record(stage, _ratings_counts(records), method=anchors.method)

        stage = "minmax"
        records = apply_minmax(records, anchors)
        record(stage, _ratings_counts(records))

        stage = "fold"
        segments = fold(records, on_conflict=config.fold_conflicts)
        record(stage, _segment_counts(segments))

        stage = "drop_single"
        segments = [s for s in segments if s.n_ratings >= 2]
        io.write_folded(segments, out_dir / "folded.jsonl")
        record(stage, _segment_counts(segments))

        stage = "split"
        assignment = split(segments, config.ratios, seed=derive_seed(config.seed, "split"), filter_leakage=False)
        record(stage, _segment_counts(segments), **assignment.counts())

        stage = "leakage_filter"
        assignment = leakage_filter(assignment)
        kept = assignment.train + assignment.dev + assignment.test
        record(stage, _segment_counts(kept), **assignment.counts())
        for name in ("train", "dev", "test"):
            io.write_folded(assignment.splits[name], out_dir / f"{name}.jsonl")
        io.write_split_manifest(assignment, out_dir / "split_manifest.tsv")
    except Exception as exc:
        manifest.status = "failed"
        manifest.error = f"{stage}: {exc}"
        manifest.write(out_dir / "manifest.json")
        raise PipelineError(manifest.error, manifest.to_dict()) from exc

    manifest.status = "ok"
    for name in ("folded.jsonl", "train.jsonl", "dev.jsonl", "test.jsonl", "split_manifest.tsv", "audit.tsv", "verdicts.tsv"):
        manifest.outputs[name] = file_sha256(out_dir / name)
    manifest.write(out_dir / "manifest.json")
    return manifest
