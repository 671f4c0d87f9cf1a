"""Exit codes, artifact stamping, config files, and rerun stability."""
import io
import json
import sys
from pathlib import Path

import pytest

from conftest import FIXTURES
from spanex.cli import run
from spanex.io import store_json
from spanex.types import (
    Dataset,
    DatasetName,
    Instance,
    Interaction,
    InteractionType,
    Label,
    Level,
    Part,
    Span,
)

CORPUS = str(FIXTURES / "snli_mock.json")


def test_validate_clean_corpus(capsys):
    assert run(["validate", CORPUS]) == 0
    assert "OK" in capsys.readouterr().out


def test_validate_reports_violations(tmp_path, capsys):
    # Entailment with a hypothesis token ("loudly") nothing supports: the
    # label constraint fails and each violation prints on its own line.
    inst = Instance(
        id="bad-1",
        dataset=DatasetName.SNLI,
        label=Label.ENTAILMENT,
        part1_tokens=("kids", "agree"),
        part2_tokens=("kids", "agree", "loudly"),
        annotations={
            "ann1": (
                Interaction(
                    InteractionType.SYNONYM, Level.LOW, Span(Part.P1, 0, 1), Span(Part.P2, 0, 1)
                ),
            )
        },
    )
    path = tmp_path / "bad.json"
    store_json(Dataset(name=DatasetName.SNLI, instances=(inst,)), path)
    assert run(["validate", str(path)]) == 1
    out = capsys.readouterr().out
    assert "bad-1/ann1" in out
    assert "violation" in out


def test_usage_errors_exit_2(tmp_path, capsys):
    assert run(["definitely-not-a-subcommand"]) == 2
    assert run(["extract", CORPUS, "--oracle", "mock"]) == 2  # --out is required
    assert run(["eval", CORPUS, "--annotations", "--oracle", "mock",
                "--topk", "0", "--out", str(tmp_path / "r.json")]) == 2
    assert run(["stats", CORPUS, "--config", str(tmp_path / "missing.cfg")]) == 2
    capsys.readouterr()


def test_runtime_failures_exit_1(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    assert run(["eval", CORPUS, "--oracle", "mock", "--explanations", missing,
                "--out", str(tmp_path / "r.json")]) == 1
    err = capsys.readouterr().err
    assert "error:" in err


def test_stats_artifact_is_stamped(tmp_path, capsys):
    out = tmp_path / "stats.json"
    csv_out = tmp_path / "stats.csv"
    assert run(["stats", CORPUS, "--out", str(out), "--csv", str(csv_out)]) == 0
    obj = json.loads(out.read_text())
    assert obj["toolkit_version"]
    assert len(obj["config_hash"]) == 12
    rows = csv_out.read_text().splitlines()
    assert rows[0] == "type,level,count,mean_span_length"
    capsys.readouterr()


def test_agreement_filters(tmp_path):
    out = tmp_path / "agree.json"
    assert run(["agreement", CORPUS, "--mode", "exact", "--level", "low",
                "--out", str(out)]) == 0
    obj = json.loads(out.read_text())
    assert obj["cells"]
    assert all(c["mode"] == "exact" and c["level"] == "low" for c in obj["cells"])


def test_select_head_classifier_weight(tmp_path):
    out = tmp_path / "heads.json"
    assert run(["select-head", CORPUS, "--oracle", "mock", "--out", str(out)]) == 0
    obj = json.loads(out.read_text())
    assert obj["method"] == "classifier-weight"
    assert len(obj["heads"]) == 20
    # Every fixture instance carries a keyword, so the signal head wins all.
    assert set(obj["heads"].values()) == {2}


def test_select_head_scalar_mix_saves_model(tmp_path):
    out = tmp_path / "mix.json"
    model_path = tmp_path / "model.json"
    assert run(["select-head", CORPUS, "--oracle", "mock", "--method", "scalar-mix",
                "--out", str(out), "--save-model", str(model_path)]) == 0
    obj = json.loads(out.read_text())
    assert obj["head"] == 2
    assert abs(sum(obj["mix_weights"]) - 1.0) < 1e-9
    saved = json.loads(model_path.read_text())
    assert "lambdas" in saved and "mix_classifier" in saved


def test_extract_writes_stamped_explanations(tmp_path, capsys):
    out = tmp_path / "exp.json"
    assert run(["extract", CORPUS, "--oracle", "mock", "--seed", "0",
                "--out", str(out)]) == 0
    obj = json.loads(out.read_text())
    assert obj["dataset"] == "SNLI"
    assert obj["seed"] == 0
    assert obj["toolkit_version"] and obj["config_hash"]
    assert len(obj["explanations"]) == 20
    assert "wrote 20 explanations" in capsys.readouterr().out


def test_same_run_is_byte_identical(tmp_path, monkeypatch):
    # Identical (config, seed, inputs) must reproduce the artifact exactly,
    # independent of where it is written.
    for d in ("a", "b"):
        workdir = tmp_path / d
        workdir.mkdir()
        monkeypatch.chdir(workdir)
        assert run(["extract", CORPUS, "--oracle", "mock", "--seed", "0",
                    "--out", "exp.json"]) == 0
        assert run(["eval", CORPUS, "--oracle", "mock", "--explanations", "exp.json",
                    "--topk", "1,3", "--seed", "0", "--out", "report.json"]) == 0
    assert (tmp_path / "a/exp.json").read_bytes() == (tmp_path / "b/exp.json").read_bytes()
    assert (tmp_path / "a/report.json").read_bytes() == (tmp_path / "b/report.json").read_bytes()


def test_eval_annotations_with_csvs(tmp_path):
    out = tmp_path / "report.json"
    csv_out = tmp_path / "summary.csv"
    plot_out = tmp_path / "plot.csv"
    assert run(["eval", CORPUS, "--oracle", "mock", "--annotations",
                "--baselines", "random,part", "--out", str(out),
                "--csv", str(csv_out), "--plot-csv", str(plot_out)]) == 0
    obj = json.loads(out.read_text())
    assert obj["records"] and obj["aggregates"]
    assert obj["config"]["baselines"] == ["Random-Phrase", "Part-Phrase"]
    header = csv_out.read_text().splitlines()[0]
    assert header == "dataset,label,type,level,metric,mean,std,n"
    plot_header = plot_out.read_text().splitlines()[0]
    assert plot_header == "dataset,metric,label,type,level,value,err,n"


def test_report_renders_saved_eval(tmp_path, capsys):
    report = tmp_path / "report.json"
    assert run(["eval", CORPUS, "--oracle", "mock", "--annotations",
                "--out", str(report)]) == 0
    capsys.readouterr()
    assert run(["report", str(report)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("dataset,label,type,level,metric")
    csv_out = tmp_path / "again.csv"
    assert run(["report", str(report), "--csv", str(csv_out)]) == 0
    assert csv_out.read_text().splitlines()[0].startswith("dataset,")


def test_config_file_sets_defaults_flags_win(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 7\nthreshold = 0.25  # attention cutoff\n")
    out1 = tmp_path / "a.json"
    assert run(["extract", CORPUS, "--oracle", "mock", "--config", str(cfg),
                "--out", str(out1)]) == 0
    obj = json.loads(out1.read_text())
    assert obj["seed"] == 7 and obj["threshold"] == 0.25
    # An explicit flag beats the config default.
    out2 = tmp_path / "b.json"
    assert run(["extract", CORPUS, "--oracle", "mock", "--config", str(cfg),
                "--seed", "3", "--out", str(out2)]) == 0
    assert json.loads(out2.read_text())["seed"] == 3


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("volume = 11\n")
    assert run(["stats", CORPUS, "--config", str(cfg)]) == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_convert_brat_round_trip(tmp_path, capsys):
    out = tmp_path / "fever.json"
    assert run(["convert", str(FIXTURES / "fever_brat"), "--from", "brat",
                "--out", str(out)]) == 0
    assert "wrote 3 instances" in capsys.readouterr().out
    assert run(["validate", str(out)]) == 0
    aug = tmp_path / "fever_aug.json"
    assert run(["convert", str(out), "--from", "json", "--augment",
                "--out", str(aug)]) == 0
    raw_obj = json.loads(out.read_text())
    aug_obj = json.loads(aug.read_text())
    count = lambda o: sum(
        len(ints)
        for inst in o["instances"]
        for ints in inst["annotations"].values()
    )
    assert count(aug_obj) > count(raw_obj)


def test_serve_stdio_speaks_jsonl(monkeypatch, capsys):
    request = json.dumps(
        {"id": 9, "op": "predict", "version": "1",
         "part1_tokens": ["they", "agree"], "part2_tokens": ["all", "agree"]}
    )
    monkeypatch.setattr(sys, "stdin", io.StringIO(request + "\n"))
    assert run(["serve", "--stdio"]) == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    obj = json.loads(line)
    assert obj["id"] == 9
    assert obj["predicted"] == 0


def test_version_flag(capsys):
    assert run(["--version"]) == 0
    assert capsys.readouterr().out.startswith("spanex ")
