import json
import subprocess
import sys

import pytest

from indic_mteval import io
from indic_mteval.cli import main
from indic_mteval.synthetic import Campaign, generate


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    records, _ = generate(Campaign(pairs=("eng-hin", "hin-doi"), files_per_rater=6, seed=5))
    io.write_ratings(records, d / "ratings.jsonl")
    (d / "run.toml").write_text('input = "ratings.jsonl"\noutput_dir = "run"\nseed = 3\n')
    assert main(["pipeline", "--config", str(d / "run.toml")]) == 0
    return d


def test_pipeline_writes_manifest(work):
    assert json.loads((work / "run" / "manifest.json").read_text())["status"] == "ok"


def test_unknown_flag_exit_1(capsys):
    assert main(["correlate", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err
    assert main(["frobnicate"]) == 1


def test_io_error_exit_2(tmp_path):
    assert main(["ingest", "--ratings", str(tmp_path / "missing.jsonl"), "--out", str(tmp_path / "o")]) == 2


def test_validation_error_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"raw_score": 300}\n')
    assert main(["ingest", "--ratings", str(bad), "--out", str(tmp_path / "o.jsonl")]) == 1
    assert ":1:" in capsys.readouterr().err
    assert main(["ingest", "--ratings", str(bad), "--out", str(tmp_path / "o.jsonl"), "--lenient"]) == 0


def test_stage_commands(work, capsys):
    d = work
    r = str(d / "ratings.jsonl")
    assert main(["ingest", "--ratings", r, "--out", str(d / "ing.jsonl"), "--errors", str(d / "err.tsv")]) == 0
    assert main(["qc", "--ratings", str(d / "ing.jsonl"), "--out", str(d / "qc.jsonl"), "--audit", str(d / "audit.tsv"),
                 "--verdicts", str(d / "v.tsv")]) == 0
    assert main(["normalize", "--ratings", str(d / "qc.jsonl"), "--out", str(d / "norm.jsonl"),
                 "--manifest", str(d / "anchors.json")]) == 0
    assert main(["fold", "--ratings", str(d / "norm.jsonl"), "--out", str(d / "folded.jsonl")]) == 0
    folded = io.read_folded(d / "folded.jsonl")
    assert folded and all(0 <= s.norm_score <= 1 for s in folded)
    assert main(["split", "--folded", str(d / "folded.jsonl"), "--out-dir", str(d / "split"), "--seed", "1"]) == 0
    assert main(["ablate", "--split-dir", str(d / "split"), "--ablate", "volume=50", "--seed", "1",
                 "--out-dir", str(d / "half")]) == 0
    assert main(["ablate", "--split-dir", str(d / "split"), "--ablate", "volume=33", "--out-dir", str(d / "x")]) == 1
    assert "anchors" not in capsys.readouterr().out


def _score(work, jobs):
    out = work / f"scores{jobs}.tsv"
    assert main(["score-surface", "--folded", str(work / "run" / "folded.jsonl"), "--out", str(out), "--jobs", str(jobs)]) == 0
    return out


def test_score_surface_jobs_independent(work):
    assert _score(work, 1).read_bytes() == _score(work, 3).read_bytes()


def test_correlate_stdout(work, capsys):
    scores = _score(work, 1)
    capsys.readouterr()
    assert main(["correlate", "--gold", str(work / "run" / "folded.jsonl"), "--scores", str(scores)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "src\ttgt\tcount\tbleu\tchrf2\tter"
    assert out[-1].startswith("all†") and len(out) == 5
    assert main(["correlate", "--gold", str(work / "run" / "folded.jsonl"), "--scores", str(scores),
                 "--out", str(work / "rep.tsv"), "--precision", "6"]) == 0
    assert capsys.readouterr().out == ""
    assert main(["report", "--input", str(work / "rep.tsv"), "--compare", "bleu", "chrf2"]) == 0
    assert "paired t-test" in capsys.readouterr().out


def test_perturb_seed_default_warns(tmp_path, capsys):
    src = tmp_path / "sents.txt"
    src.write_text("one two three four five six seven eight nine ten\na b c\n")
    assert main(["perturb", "--input", str(src)]) == 0
    captured = capsys.readouterr()
    assert "seed" in captured.err
    assert main(["perturb", "--input", str(src), "--seed", "0"]) == 0
    assert capsys.readouterr().out == captured.out
    lines = captured.out.splitlines()
    assert len(lines) == 2 and all("\t" in line for line in lines)
    assert main(["perturb", "--input", str(src), "--seed", "0", "--mode", "double"]) == 0
    assert all("," in line.split("\t")[1] for line in capsys.readouterr().out.splitlines())


def test_taskgen(tmp_path):
    from indic_mteval.core import Origin

    src = tmp_path / "sources.jsonl"
    src.write_text("".join(json.dumps({"source_id": f"s{i}", "source": f"src {i}", "pair": "eng-hin", "domain": "health",
                                       "hypotheses": {o.value: f"{o.value} {i}" for o in Origin}}) + "\n" for i in range(16)))
    out = tmp_path / "tasks.jsonl"
    assert main(["taskgen", "--sources", str(src), "--out", str(out), "--seed", "2"]) == 0
    first = out.read_bytes()
    assert main(["taskgen", "--sources", str(src), "--out", str(out), "--seed", "2"]) == 0
    assert out.read_bytes() == first and len(first.splitlines()) == 88


def test_challenge(tmp_path, capsys):
    from indic_mteval.io import ChallengeItem

    items = [ChallengeItem("eng-hin", "omission", f"s{i}", f"g{i}", f"b{i}", "r") for i in range(4)]
    (tmp_path / "set.jsonl").write_text("".join(json.dumps(it.__dict__) + "\n" for it in items))
    io.write_scores([(k, "m", float(j == 0)) for it in items for j, k in enumerate(it.keys())], tmp_path / "s.tsv")
    assert main(["challenge", "--set", str(tmp_path / "set.jsonl"), "--scores", str(tmp_path / "s.tsv"),
                 "--by", "phenomenon"]) == 0
    assert capsys.readouterr().out.splitlines() == ["phenomenon\tcount\tm", "omission\t4\t1.00"]


def test_console_entry(tmp_path):
    res = subprocess.run([sys.executable, "-m", "indic_mteval.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "score-surface" in res.stdout
