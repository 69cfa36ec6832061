import json

import pytest

from stancemon.cli import main


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Synthetic corpus materialized once; subcommand outputs land here."""
    root = tmp_path_factory.mktemp("cliflow")
    assert main(["synth", "--out-dir", str(root / "raw"), "--seed", "7", "--size", "400"]) == 0
    assert main([
        "filter", "--in", str(root / "raw" / "tweets.jsonl"),
        "--out", str(root / "kept.jsonl"),
    ]) == 0
    assert main([
        "aggregate", "--annotations", str(root / "raw" / "annotations.csv"),
        "--tweets", str(root / "kept.jsonl"), "--out-dir", str(root / "datasets"),
    ]) == 0
    return root


class TestPipelineFlow:
    def test_filter_wrote_manifest_and_corpus(self, workdir):
        assert (workdir / "kept.jsonl").exists()
        manifest = json.loads(
            (workdir / "kept.jsonl.manifest.json").read_text(encoding="utf-8")
        )
        assert manifest["command"] == "filter"
        assert manifest["arguments"]["blacklist"] == "dier,landbouw,teek"

    def test_aggregate_wrote_all_schemes(self, workdir):
        for name in ("binary", "irrelevance_filter", "polarity", "polarity_sentiment"):
            assert (workdir / "datasets" / f"dataset_{name}.json").exists()
        assert (workdir / "datasets" / "manifest.json").exists()

    def test_agreement_runs(self, workdir, capsys):
        assert main([
            "agreement", "--annotations", str(workdir / "raw" / "annotations.csv"),
            "--format", "json",
        ]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert set(payload) >= {"relevance", "subject", "stance", "sentiment", "config"}
        assert 0 <= payload["stance"]["percent_agreement"] <= 1

    def test_train_and_predict(self, workdir, capsys):
        model_path = workdir / "model.json"
        assert main([
            "train", "--dataset", str(workdir / "datasets" / "dataset_polarity.json"),
            "--variant", "strict_lax", "--algorithm", "svm",
            "--out", str(model_path), "--seed", "7",
        ]) == 0
        capsys.readouterr()
        assert main([
            "predict", "--model", str(model_path),
            "--text", "vaccinatie is gif en schandalig weiger de prik",
            "--text", "de prik beschermt en is veilig",
            "--format", "json",
        ]) == 0
        lines = [json.loads(l) for l in capsys.readouterr().out.strip().split("\n")]
        assert lines[0]["label"] == "Negative"
        assert lines[1]["label"] != "Negative"
        assert lines[0]["negative_score"] > lines[1]["negative_score"]

    def test_eval_single_cell_and_byte_identical_reruns(self, workdir, capsys):
        out1, out2 = workdir / "r1.json", workdir / "r2.json"
        argv = [
            "eval", "--dataset", str(workdir / "datasets" / "dataset_polarity.json"),
            "--variant", "strict", "--algorithm", "mnb", "--folds", "5",
            "--seed", "11", "--format", "json",
        ]
        assert main(argv + ["--out", str(out1)]) == 0
        stdout1 = capsys.readouterr().out
        assert main(argv + ["--out", str(out2)]) == 0
        stdout2 = capsys.readouterr().out
        assert out1.read_bytes() == out2.read_bytes()
        # stdout differs only in the echoed --out path inside the config block
        payload1, payload2 = json.loads(stdout1), json.loads(stdout2)
        payload1["config"]["arguments"].pop("out")
        payload2["config"]["arguments"].pop("out")
        assert payload1 == payload2

    def test_curve_and_sweep_csv(self, workdir):
        curve_path = workdir / "curve.csv"
        assert main([
            "curve", "--dataset", str(workdir / "datasets" / "dataset_polarity.json"),
            "--variant", "strict", "--algorithm", "mnb", "--folds", "5",
            "--steps", "2", "--out", str(curve_path), "--seed", "11",
        ]) == 0
        lines = curve_path.read_text(encoding="utf-8").strip().split("\n")
        assert lines[0] == "x,precision,recall,f1"
        assert len(lines) == 3

        sweep_path = workdir / "sweep.csv"
        assert main([
            "sweep", "--dataset", str(workdir / "datasets" / "dataset_polarity.json"),
            "--variant", "strict", "--algorithm", "mnb", "--folds", "5",
            "--out", str(sweep_path), "--seed", "11",
        ]) == 0
        rows = sweep_path.read_text(encoding="utf-8").strip().split("\n")[1:]
        recalls = [float(row.split(",")[2]) for row in rows]
        assert recalls == sorted(recalls)

    def test_ensemble(self, workdir, capsys):
        assert main([
            "ensemble", "--dataset", str(workdir / "datasets" / "dataset_polarity.json"),
            "--variant", "strict", "--algorithm", "mnb", "--folds", "5",
            "--seed", "11", "--format", "json",
        ]) == 0
        payload = json.loads(capsys.readouterr().out)
        cells = payload["agreement_table"]
        assert sum(cells.values()) == payload["ml"]["n_test"]
        assert payload["ensemble"]["recall"] >= payload["ml"]["recall"] - 1e-12
        assert payload["ensemble"]["recall"] >= payload["lexicon"]["recall"] - 1e-12


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["filter", "--nope"])
        assert exc.value.code == 1

    def test_missing_model_file_is_data_error(self, capsys):
        code = main(["predict", "--model", "/nonexistent/m.json", "--text", "x"])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_duplicate_id_is_data_error(self, tmp_path, capsys):
        path = tmp_path / "dup.jsonl"
        path.write_text(
            '{"id": "1", "text": "a"}\n{"id": "1", "text": "b"}\n', encoding="utf-8"
        )
        code = main(["filter", "--in", str(path), "--out", str(tmp_path / "o.jsonl")])
        assert code == 2
        assert "'1'" in capsys.readouterr().err
