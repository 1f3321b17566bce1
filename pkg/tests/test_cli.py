import csv
import subprocess
import sys

import pytest

from lcprotonets import load_adapter, load_manifest, load_split
from lcprotonets.cli import main
from lcprotonets.manifest import read_training_log


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A manifest and a label split produced through the CLI itself."""
    root = tmp_path_factory.mktemp("cli")
    manifest = root / "manifest.jsonl"
    split = root / "split.txt"
    rc = main([
        "synth", "--labels", "10", "--dimension", "16",
        "--items-per-label", "8", "--noise", "0.05",
        "--cardinality-probs", "0.6,0.4,0.0", "--co-occurrence-bias", "1.0",
        "--seed", "7", "--output", str(manifest),
    ])
    assert rc == 0
    rc = main([
        "split-labels", "--manifest", str(manifest), "--base", "5",
        "--holdout", "2", "--seed", "1", "--output", str(split),
    ])
    assert rc == 0
    return {"root": root, "manifest": manifest, "split": split}


class TestSynthAndSplit:
    def test_manifest_loadable(self, workspace):
        data = load_manifest(workspace["manifest"])
        assert len(data.items) == 80
        assert len(data.vocabulary) == 10
        assert data.dimension == 16

    def test_split_sections(self, workspace):
        split = load_split(workspace["split"])
        assert len(split.base) == 5
        assert len(split.validation_holdout) == 2
        assert len(split.novel) == 3

    def test_seed_flag_and_env_var_agree(self, tmp_path, monkeypatch):
        flagged = tmp_path / "flagged.jsonl"
        via_env = tmp_path / "via_env.jsonl"
        args = ["synth", "--labels", "4", "--dimension", "8",
                "--items-per-label", "3"]
        monkeypatch.delenv("LCPROTONETS_SEED", raising=False)
        assert main(args + ["--seed", "5", "--output", str(flagged)]) == 0
        monkeypatch.setenv("LCPROTONETS_SEED", "5")
        assert main(args + ["--output", str(via_env)]) == 0
        assert flagged.read_bytes() == via_env.read_bytes()

    def test_non_integer_env_seed_aborts(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LCPROTONETS_SEED", "soup")
        with pytest.raises(SystemExit):
            main(["synth", "--labels", "4", "--dimension", "8",
                  "--items-per-label", "3",
                  "--output", str(tmp_path / "x.jsonl")])


class TestEvaluateCommand:
    EVAL_ARGS = ["--mode", "novel", "--n-way", "3", "--k-shot", "2",
                 "--n-query", "2", "--episodes", "3", "--runs", "2",
                 "--seed", "0", "--no-timestamp"]

    def test_report_written_and_printed(self, workspace, tmp_path, capsys):
        report = tmp_path / "report.txt"
        rc = main(["evaluate", "--manifest", str(workspace["manifest"]),
                   "--split", str(workspace["split"]),
                   "--report", str(report)] + self.EVAL_ARGS)
        assert rc == 0
        out = capsys.readouterr().out
        assert report.read_text(encoding="utf-8") == out
        assert "Task: 3-way 2-shot Novel" in out
        assert "lc-protonets" in out

    def test_no_timestamp_reports_are_byte_identical(self, workspace, tmp_path):
        r1, r2 = tmp_path / "r1.txt", tmp_path / "r2.txt"
        base = ["evaluate", "--manifest", str(workspace["manifest"]),
                "--split", str(workspace["split"])] + self.EVAL_ARGS
        assert main(base + ["--report", str(r1)]) == 0
        assert main(base + ["--report", str(r2)]) == 0
        assert r1.read_bytes() == r2.read_bytes()

    def test_timestamp_present_by_default(self, workspace, capsys):
        rc = main(["evaluate", "--manifest", str(workspace["manifest"]),
                   "--split", str(workspace["split"]),
                   "--mode", "novel", "--n-way", "3", "--k-shot", "2",
                   "--n-query", "2", "--episodes", "2", "--runs", "1",
                   "--seed", "0"])
        assert rc == 0
        assert capsys.readouterr().out.startswith("generated: ")

    def test_csv_and_figure_outputs(self, workspace, tmp_path):
        scores = tmp_path / "scores.csv"
        figure = tmp_path / "scores.png"
        rc = main(["evaluate", "--manifest", str(workspace["manifest"]),
                   "--split", str(workspace["split"]),
                   "--csv", str(scores), "--figure", str(figure)]
                  + self.EVAL_ARGS)
        assert rc == 0
        with open(scores, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["run", "macro_f1", "micro_f1"]
        assert len(rows) == 3
        assert figure.stat().st_size > 0

    def test_operational_failure_exits_one(self, workspace, capsys):
        # 5-way novel with only 3 novel labels in the split.
        rc = main(["evaluate", "--manifest", str(workspace["manifest"]),
                   "--split", str(workspace["split"]),
                   "--mode", "novel", "--n-way", "5", "--episodes", "1",
                   "--runs", "1"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_manifest_exits_one(self, workspace, tmp_path, capsys):
        rc = main(["evaluate", "--manifest", str(tmp_path / "absent.jsonl"),
                   "--split", str(workspace["split"])] + self.EVAL_ARGS)
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestUsageErrors:
    def test_missing_required_argument_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["synth", "--labels", "4"])
        assert exc.value.code == 2

    def test_unknown_method_exits_two(self, workspace):
        with pytest.raises(SystemExit) as exc:
            main(["evaluate", "--manifest", str(workspace["manifest"]),
                  "--split", str(workspace["split"]), "--method", "bogus"])
        assert exc.value.code == 2

    def test_unknown_command_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2


class TestTrainAdapterCommand:
    def test_trains_saves_and_evaluates(self, workspace, tmp_path, capsys):
        adapter_path = tmp_path / "adapter.json"
        log_path = tmp_path / "train_log.csv"
        figure = tmp_path / "train.png"
        rc = main(["train-adapter", "--manifest", str(workspace["manifest"]),
                   "--split", str(workspace["split"]),
                   "--n-way", "3", "--k-shot", "2", "--n-query", "2",
                   "--episodes-per-epoch", "4", "--patience", "2",
                   "--max-epochs", "4", "--validation-episodes", "4",
                   "--adapter-out", str(adapter_path),
                   "--log-out", str(log_path), "--figure", str(figure),
                   "--seed", "0"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "best validation macro-F1" in out

        adapter = load_adapter(adapter_path)
        assert (adapter.d_in, adapter.d_out) == (16, 16)
        log = read_training_log(log_path)
        assert 1 <= len(log) <= 4
        assert figure.stat().st_size > 0

        rc = main(["evaluate", "--manifest", str(workspace["manifest"]),
                   "--split", str(workspace["split"]),
                   "--adapter", str(adapter_path),
                   "--mode", "novel", "--n-way", "3", "--k-shot", "2",
                   "--n-query", "2", "--episodes", "2", "--runs", "1",
                   "--seed", "0", "--no-timestamp"])
        assert rc == 0

    def test_verbose_prints_epochs(self, workspace, tmp_path, capsys):
        rc = main(["train-adapter", "--manifest", str(workspace["manifest"]),
                   "--split", str(workspace["split"]),
                   "--n-way", "3", "--k-shot", "2", "--n-query", "2",
                   "--episodes-per-epoch", "2", "--patience", "1",
                   "--max-epochs", "2", "--validation-episodes", "2",
                   "--adapter-out", str(tmp_path / "a.json"),
                   "--verbose", "--seed", "0"])
        assert rc == 0
        assert "epoch 1:" in capsys.readouterr().out


class TestBenchCommand:
    def test_writes_all_outputs(self, workspace, tmp_path, capsys):
        csv_path = tmp_path / "bench.csv"
        dat_path = tmp_path / "bench.dat"
        figure = tmp_path / "bench.png"
        rc = main(["bench", "--manifest", str(workspace["manifest"]),
                   "--n-values", "3,5", "--k-shot", "2",
                   "--repetitions", "2", "--queries", "10",
                   "--dedup", "--seed", "0",
                   "--csv", str(csv_path), "--gnuplot", str(dat_path),
                   "--figure", str(figure)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "N=3:" in out and "N=5:" in out
        with open(csv_path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][0] == "N"
        assert len(rows) == 3
        assert dat_path.read_text(encoding="utf-8").startswith("# N")
        assert figure.stat().st_size > 0


class TestModuleEntryPoint:
    def test_help_via_subprocess(self):
        proc = subprocess.run(
            [sys.executable, "-m", "lcprotonets.cli", "--help"],
            capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0
        assert "synth" in proc.stdout
        assert "evaluate" in proc.stdout

    def test_synth_via_subprocess(self, tmp_path):
        out = tmp_path / "sub.jsonl"
        proc = subprocess.run(
            [sys.executable, "-m", "lcprotonets.cli", "synth",
             "--labels", "3", "--dimension", "4", "--items-per-label", "2",
             "--output", str(out)],
            capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0, proc.stderr
        assert load_manifest(out).dimension == 4
