"""From raw ratings to a per-pair Kendall tau table for the surface metrics.

Runs the full pipeline on a synthetic campaign, scores every folded segment
with sentence BLEU, TER and chrF2, and prints the correlation report. TER is
negated so that higher is better for all three columns.

    python demos/02_metric_correlation.py
"""

import tempfile
from pathlib import Path

from indic_mteval import io
from indic_mteval.correlate import correlate, paired_metric_significance
from indic_mteval.metrics import score_segment
from indic_mteval.pipeline import PipelineConfig, run_pipeline
from indic_mteval.synthetic import Campaign, generate

work = Path(tempfile.mkdtemp(prefix="indic-mteval-"))
records, _ = generate(Campaign(pairs=("eng-hin", "eng-tam", "hin-mar", "hin-urd"), files_per_rater=15, seed=2))
io.write_ratings(records, work / "ratings.jsonl")

manifest = run_pipeline(PipelineConfig.from_mapping({"input": "ratings.jsonl", "output_dir": "run", "seed": 2}, work))
for stage in manifest.stages:
    print(f"{stage['stage']:<18} segments {stage['segments_out']:>5}   ratings {stage['ratings_out']:>6}")

segments = io.read_folded(work / "run" / "folded.jsonl")
scores: dict[str, dict[str, float]] = {"bleu": {}, "ter": {}, "chrf2": {}}
for seg in segments:
    for metric, value in score_segment(seg.hypothesis, seg.reference, negate_ter=True).items():
        scores[metric][seg.key] = value

report = correlate(segments, scores)
print()
print(io.emit_report(report))

res = paired_metric_significance(report, report, "chrf2", "bleu")
print(f"chrf2 vs bleu over {len(report.rows)} pairs: t={res.t_stat:.3f}, p={res.p_two_tailed:.3f}")
print(f"outputs in {work}")
