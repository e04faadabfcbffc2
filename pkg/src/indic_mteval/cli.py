"""Command-line entry point: ``indic-mteval <subcommand> ...``.

Exit codes: 0 on success, 1 on validation or usage errors, 2 on I/O errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from indic_mteval import io
from indic_mteval.core import DEFAULT_DIRECTIONS, ValidationError
from indic_mteval.correlate import challenge_eval, correlate, paired_metric_significance
from indic_mteval.datasets import SPLITS, SplitAssignment, ablate, split
from indic_mteval.metrics import score_segment
from indic_mteval.normalize import (
    AnchorError,
    apply_minmax,
    compute_anchors,
    fold,
    observed_anchors,
    zscore_by_rater,
)
from indic_mteval.perturb import perturb_multiple, perturb_once
from indic_mteval.pipeline import PipelineConfig, PipelineError, run_pipeline
from indic_mteval.qcstats import filter_ratings, rater_verdicts
from indic_mteval.taskgen import build_task_files, campaign_items, write_task_files

log = logging.getLogger("indic_mteval")


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _seed(args) -> int:
    if args.seed is None:
        log.warning("no --seed given; using 0")
        return 0
    return args.seed


def _directions(args):
    return None if getattr(args, "any_direction", False) else DEFAULT_DIRECTIONS


def _load(args):
    strict = not getattr(args, "lenient", False)
    rs = io.load_ratings(args.ratings, strict=strict, directions=_directions(args))
    for rej in rs.rejected:
        log.warning("line %d rejected: %s", rej.line, rej.reason)
    return rs


def cmd_ingest(args) -> int:
    rs = _load(args)
    rs, drops = io.attach_references(rs)
    io.write_ratings(rs.records, args.out)
    if args.errors:
        with open(args.errors, "w", encoding="utf-8") as fh:
            fh.write("line\treason\n")
            for rej in rs.rejected:
                fh.write(f"{rej.line}\t{rej.reason}\n")
    print(
        f"kept {len(rs.records)} ratings; rejected {len(rs.rejected)} lines; "
        f"dropped {drops.records_dropped} ratings ({drops.items_dropped} items) without a reference",
        file=sys.stderr,
    )
    return 0


def cmd_qc(args) -> int:
    records = zscore_by_rater(_load(args).records, single="zero")
    verdicts = rater_verdicts(records, alpha=args.alpha, equal_var=not args.welch)
    kept, audit = filter_ratings(records, verdicts)
    io.write_ratings(kept, args.out)
    if args.audit:
        io.write_audit(audit, args.audit)
    if args.verdicts:
        with open(args.verdicts, "w", encoding="utf-8") as fh:
            fh.write("rater_id\tconsistent\tdiscerning\texempt\tp_consistency\tp_discernment\n")
            for v in verdicts:
                fh.write(f"{v.rater_id}\t{int(v.consistent)}\t{int(v.discerning)}\t{int(v.exempt_discernment)}\t"
                         f"{v.p_consistency!r}\t{v.p_discernment!r}\n")
    return 0


def cmd_normalize(args) -> int:
    records = zscore_by_rater(_load(args).records, ddof=args.ddof)
    if args.anchors == "observed":
        anchors = observed_anchors(records)
    else:
        try:
            anchors = compute_anchors(records)
        except AnchorError:
            if args.anchors == "unanimous":
                raise
            log.warning("no unanimous anchor items; falling back to observed min/max")
            anchors = observed_anchors(records)
    io.write_ratings(apply_minmax(records, anchors), args.out)
    if args.manifest:
        Path(args.manifest).write_text(
            json.dumps({"z_min": anchors.z_min, "z_max": anchors.z_max, "method": anchors.method}, indent=2) + "\n"
        )
    return 0


def cmd_fold(args) -> int:
    segments = fold(_load(args).records, on_conflict="by_origin" if args.by_origin else "error")
    io.write_folded(segments, args.out)
    return 0


def _write_splits(assignment: SplitAssignment, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in SPLITS:
        io.write_folded(assignment.splits[name], out_dir / f"{name}.jsonl")
    io.write_split_manifest(assignment, out_dir / "split_manifest.tsv")


def cmd_split(args) -> int:
    assignment = split(io.read_folded(args.folded), tuple(args.ratios), seed=_seed(args))
    _write_splits(assignment, Path(args.out_dir))
    print("\t".join(f"{k}={v}" for k, v in assignment.counts().items()), file=sys.stderr)
    return 0


def cmd_ablate(args) -> int:
    src = Path(args.split_dir)
    assignment = SplitAssignment({name: io.read_folded(src / f"{name}.jsonl") for name in SPLITS})
    sub = ablate(assignment, args.ablate, seed=_seed(args), nested=args.nested)
    _write_splits(sub, Path(args.out_dir))
    print("\t".join(f"{k}={v}" for k, v in sub.counts().items()), file=sys.stderr)
    return 0


def cmd_perturb(args) -> int:
    seed = _seed(args)
    lexicon = io.load_lexicon(args.lexicon) if args.lexicon else None
    fh = open(args.input, encoding="utf-8") if args.input else sys.stdin
    with fh:
        for i, line in enumerate(fh):
            sentence = line.strip()
            if not sentence:
                continue
            if args.mode == "single":
                out, kind = perturb_once(sentence, lexicon, seed=f"{seed}:{i}")
                kinds = kind.value
            else:
                out, pair = perturb_multiple(sentence, lexicon, seed=f"{seed}:{i}")
                kinds = ",".join(k.value for k in pair)
            sys.stdout.write(f"{out}\t{kinds}\n")
    return 0


def _read_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def cmd_taskgen(args) -> int:
    seed = _seed(args)
    items = campaign_items(_read_jsonl(args.sources), seed=seed)
    pool = _read_jsonl(args.qc_pool) if args.qc_pool else items
    tasks = build_task_files(items, pool, seed=seed, prefix=args.prefix)
    write_task_files(tasks, args.out)
    print(f"{len(tasks)} task files, {len(items)} items", file=sys.stderr)
    return 0


def _score_one(job):
    hyp, ref, negate = job
    return score_segment(hyp, ref, negate)


def cmd_score_surface(args) -> int:
    segments = io.read_folded(args.folded)
    unique = {}
    for seg in segments:
        unique.setdefault(seg.key, (seg.hypothesis, seg.reference, args.negate_ter))
    keys = sorted(unique)
    jobs = [unique[k] for k in keys]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_score_one, jobs, chunksize=256))
    else:
        results = [_score_one(j) for j in jobs]
    io.write_scores(
        ((k, metric, res[metric]) for k, res in zip(keys, results) for metric in ("bleu", "ter", "chrf2")),
        args.out,
    )
    return 0


def _merge_scores(paths):
    merged: dict[str, dict[str, float]] = {}
    for path in paths:
        for metric, table in io.read_scores(path).items():
            if metric in merged and set(merged[metric]) & set(table):
                raise ValidationError(f"metric {metric!r} scored twice for the same segments")
            merged.setdefault(metric, {}).update(table)
    return merged


def cmd_correlate(args) -> int:
    report = correlate(io.read_folded(args.gold), _merge_scores(args.scores), strict=args.strict, variant=args.tau)
    for metric, n in report.unjoined.items():
        if n:
            log.warning("%s: %d scores have no gold segment", metric, n)
    text = io.emit_report(report, args.out, precision=args.precision)
    if not args.out:
        sys.stdout.write(text)
    return 0


def cmd_challenge(args) -> int:
    items = io.load_challenge_set(args.set, phenomena=None if args.any_phenomenon else io.DEFAULT_PHENOMENA)
    result = challenge_eval(items, _merge_scores(args.scores), by=(args.by,))
    metrics = sorted(result)
    groups = sorted({g for m in metrics for g in result[m][args.by]})
    lines = ["\t".join([args.by, "count", *metrics])]
    for g in groups:
        cells = [result[m][args.by][g] for m in metrics]
        lines.append("\t".join([g, str(cells[0].count), *(f"{c.tau:.{args.precision}f}" for c in cells)]))
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_pipeline(args) -> int:
    manifest = run_pipeline(PipelineConfig.load(args.config))
    for stage in manifest.stages:
        print(f"{stage['stage']}\t{stage['segments_out']}\t{stage['ratings_out']}", file=sys.stderr)
    return 0


def cmd_report(args) -> int:
    report = io.read_report(args.input)
    sys.stdout.write(io.emit_report(report, None, precision=args.precision))
    if args.compare:
        a, b = args.compare
        res = paired_metric_significance(report, report, a, b)
        sys.stdout.write(f"# paired t-test {a} vs {b}: t={res.t_stat:.4f} df={res.df:g} p={res.p_two_tailed:.4g}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = Parser(prog="indic-mteval", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    def add(name, func, help_text, ratings=False, seed=False):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if ratings:
            p.add_argument("--ratings", required=True, help="ratings JSONL")
            mode = p.add_mutually_exclusive_group()
            mode.add_argument("--strict", dest="lenient", action="store_false", help="abort on any bad line (default)")
            mode.add_argument("--lenient", dest="lenient", action="store_true", help="skip bad lines")
            p.set_defaults(lenient=False)
            p.add_argument("--any-direction", action="store_true", help="accept language pairs outside the default list")
        if seed:
            p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jobs", type=int, default=1, help="worker processes (output does not depend on it)")
        return p

    p = add("ingest", cmd_ingest, "validate ratings and attach references", ratings=True)
    p.add_argument("--out", required=True)
    p.add_argument("--errors", help="TSV of rejected lines")

    p = add("qc", cmd_qc, "rater consistency/discernment filtering", ratings=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--welch", action="store_true", help="Welch instead of pooled-variance discernment test")
    p.add_argument("--out", required=True)
    p.add_argument("--audit")
    p.add_argument("--verdicts")

    p = add("normalize", cmd_normalize, "z-score and anchored min-max scaling", ratings=True)
    p.add_argument("--out", required=True)
    p.add_argument("--anchors", choices=("auto", "unanimous", "observed"), default="auto")
    p.add_argument("--ddof", type=int, choices=(0, 1), default=1)
    p.add_argument("--manifest", help="write the anchors as JSON")

    p = add("fold", cmd_fold, "aggregate ratings into unique segments", ratings=True)
    p.add_argument("--out", required=True)
    p.add_argument("--by-origin", action="store_true", help="keep identical text from different origins apart")

    p = add("split", cmd_split, "train/dev/test split with leakage filter", seed=True)
    p.add_argument("--folded", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--ratios", type=float, nargs=3, default=(0.9, 0.05, 0.05))

    p = add("ablate", cmd_ablate, "ablation subset of a split directory", seed=True)
    p.add_argument("--split-dir", required=True)
    p.add_argument("--ablate", required=True, metavar="KEY=VALUE")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--nested", action="store_true", help="volume subsets are prefixes of one order")

    p = add("perturb", cmd_perturb, "degrade sentences (one per input line)", seed=True)
    p.add_argument("--mode", choices=("single", "double"), default="single")
    p.add_argument("--lexicon")
    p.add_argument("--input", help="input file (default stdin)")

    p = add("taskgen", cmd_taskgen, "sample hypotheses and build task files", seed=True)
    p.add_argument("--sources", required=True, help="JSONL with source, pair, domain, hypotheses")
    p.add_argument("--qc-pool", help="JSONL of QC candidate items (default: the sampled items)")
    p.add_argument("--prefix", default="task")
    p.add_argument("--out", required=True)

    p = add("score-surface", cmd_score_surface, "BLEU/TER/chrF2 score file for folded segments")
    p.add_argument("--folded", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--negate-ter", action="store_true")

    p = add("correlate", cmd_correlate, "per-pair Kendall tau report")
    p.add_argument("--gold", required=True)
    p.add_argument("--scores", required=True, nargs="+")
    p.add_argument("--out")
    p.add_argument("--precision", type=int, default=2)
    p.add_argument("--strict", action="store_true", help="fail when a score has no gold segment")
    p.add_argument("--tau", choices=("a", "b"), default="b")

    p = add("challenge", cmd_challenge, "pairwise discrimination on a challenge set")
    p.add_argument("--set", required=True)
    p.add_argument("--scores", required=True, nargs="+")
    p.add_argument("--by", choices=("pair", "phenomenon"), default="pair")
    p.add_argument("--any-phenomenon", action="store_true")
    p.add_argument("--precision", type=int, default=2)

    p = add("pipeline", cmd_pipeline, "run the full pipeline from a TOML config")
    p.add_argument("--config", required=True)

    p = add("report", cmd_report, "re-render a report TSV, optionally test two metrics")
    p.add_argument("--input", required=True)
    p.add_argument("--precision", type=int, default=2)
    p.add_argument("--compare", nargs=2, metavar=("METRIC_A", "METRIC_B"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.handlers = [handler]
    log.propagate = False
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error: pipeline failed at {exc}", file=sys.stderr)
        return 2 if isinstance(exc.__cause__, OSError) else 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
