"""Exit codes, output formats, and end-to-end subcommand behavior."""

import json

import pytest

import netgen
from leakbench import cli
from leakbench.graph import format_edge_list


@pytest.fixture
def edge_file(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text(format_edge_list(netgen.gnp(50, 0.12, 1)))
    return str(path)


@pytest.fixture
def tiny_file(tmp_path):
    path = tmp_path / "tiny.txt"
    path.write_text("a b\nb c\nc a\nc d\na d\nb d\na e\nb e\nc e\nd e\n")
    return str(path)


class TestStats:
    def test_human_output(self, tiny_file, capsys):
        assert cli.main(["stats", tiny_file]) == 0
        out = capsys.readouterr().out.strip()
        assert out == "N=5 M=10 k=4.00 r=1.0000"

    def test_json_output(self, edge_file, capsys):
        assert cli.main(["stats", edge_file, "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert set(payload) == {"n", "m", "mean_degree", "density"}

    def test_parse_warning_on_stderr(self, tmp_path, capsys):
        path = tmp_path / "d.txt"
        path.write_text("a b\nb a\nc c\nb c\n")
        assert cli.main(["stats", str(path)]) == 0
        err = capsys.readouterr().err
        assert "duplicate" in err and "self-loop" in err


class TestExitCodes:
    def test_missing_file_is_data_error(self, capsys):
        assert cli.main(["stats", "no-such-file.txt"]) == 2

    def test_malformed_file_is_data_error(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("a b\nlonely\n")
        assert cli.main(["stats", str(path)]) == 2

    def test_unknown_flag_is_usage_error(self, edge_file):
        assert cli.main(["stats", edge_file, "--bogus"]) == 1

    def test_missing_subcommand_is_usage_error(self):
        assert cli.main([]) == 1

    def test_bad_rho_is_usage_error(self, edge_file):
        assert cli.main(["split", edge_file, "--rho", "1.5", "--seed", "1"]) == 1

    def test_numerical_error_maps_to_three(self, edge_file, monkeypatch):
        from leakbench.errors import NumericalError

        def boom(*args, **kwargs):
            raise NumericalError("did not converge")

        monkeypatch.setattr(cli, "run_protocols", boom)
        rc = cli.main(["eval", edge_file, "--predictor", "lp", "--rho", "0.2",
                       "--seed", "1"])
        assert rc == 3


class TestSplit:
    def test_deterministic_manifests(self, edge_file, capsys):
        assert cli.main(["split", edge_file, "--rho", "0.2", "--seed", "3", "--json"]) == 0
        first = capsys.readouterr().out
        assert cli.main(["split", edge_file, "--rho", "0.2", "--seed", "3", "--json"]) == 0
        assert capsys.readouterr().out == first

    def test_export_files(self, edge_file, tmp_path, capsys):
        out = tmp_path / "splitdir"
        assert cli.main(["split", edge_file, "--rho", "0.2", "--seed", "3",
                         "--out", str(out)]) == 0
        for name in ("train.txt", "validation.txt", "test.txt", "manifest.json"):
            assert (out / name).is_file()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["sizes"]["test"] == round(0.2 * manifest["edges"])


class TestScore:
    def test_scores_printed_with_labels(self, tiny_file, tmp_path, capsys):
        pairs = tmp_path / "pairs.txt"
        pairs.write_text("a c\nb d\n")
        assert cli.main(["score", tiny_file, "--predictor", "lp",
                         "--param", "0.01", "--pairs", str(pairs)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 2
        assert lines[0].split()[:2] == ["a", "c"]

    def test_unknown_label_is_data_error(self, tiny_file, tmp_path):
        pairs = tmp_path / "pairs.txt"
        pairs.write_text("a zz\n")
        assert cli.main(["score", tiny_file, "--predictor", "lp",
                         "--param", "0.01", "--pairs", str(pairs)]) == 2


class TestEval:
    def test_one_line_result(self, edge_file, capsys):
        rc = cli.main(["eval", edge_file, "--predictor", "lp",
                       "--grid", "0:0.05:0.01", "--rho", "0.2", "--seed", "1"])
        assert rc == 0
        out = capsys.readouterr().out.strip()
        fields = dict(kv.split("=") for kv in out.split())
        assert float(fields["loss_ratio"]) >= 0.0
        assert float(fields["auc_star"]) >= float(fields["auc_prime"])

    def test_json_and_explicit_grid_list(self, edge_file, capsys):
        rc = cli.main(["eval", edge_file, "--predictor", "lrw",
                       "--grid", "1,2,3", "--rho", "0.2", "--seed", "1", "--json"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["lambda_star"] in (1.0, 2.0, 3.0)

    def test_curve_dump(self, edge_file, tmp_path, capsys):
        out = tmp_path / "curves"
        rc = cli.main(["eval", edge_file, "--predictor", "lp",
                       "--grid", "0,0.01,0.05", "--rho", "0.2", "--seed", "1",
                       "--out", str(out)])
        assert rc == 0
        lines = (out / "test_curve.txt").read_text().splitlines()
        assert len(lines) == 3
        value, score = lines[0].split()
        assert float(value) == 0.0 and 0.0 <= float(score) <= 1.0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["grid"] == [0.0, 0.01, 0.05]

    def test_inadmissible_grid_is_usage_error(self, edge_file):
        rc = cli.main(["eval", edge_file, "--predictor", "rwr",
                       "--grid", "0.5,1.5", "--rho", "0.2", "--seed", "1"])
        assert rc == 1


class TestGridSpec:
    def test_range_is_inclusive(self):
        assert cli.parse_grid_spec("0:0.05:0.01") == [0.0, 0.01, 0.02, 0.03, 0.04, 0.05]

    def test_explicit_list(self):
        assert cli.parse_grid_spec("0.1,0.5,0.9") == [0.1, 0.5, 0.9]

    def test_bad_specs(self):
        for spec in ("1:2", "2:1:0.5", "0:1:0", ""):
            with pytest.raises(ValueError):
                cli.parse_grid_spec(spec)


class TestRunAndReport:
    def test_end_to_end(self, tmp_path, capsys):
        net = tmp_path / "n.txt"
        net.write_text(format_edge_list(netgen.gnp(40, 0.15, 2)))
        config = {
            "datasets": [{"path": "n.txt", "name": "n", "category": "Soc"}],
            "predictors": [{"name": "lp", "grid": [0.0, 0.01]}],
            "rhos": [0.2],
            "seeds": 2,
            "output_dir": str(tmp_path / "out"),
        }
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(config))
        assert cli.main(["run", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "records=2" in out
        assert (tmp_path / "out" / "records.csv").is_file()

        # re-aggregating the records reproduces the loss table byte for byte
        assert cli.main(["report", "--records", str(tmp_path / "out" / "records.csv"),
                         "--out", str(tmp_path / "out2")]) == 0
        a = (tmp_path / "out" / "loss_table.csv").read_bytes()
        b = (tmp_path / "out2" / "loss_table.csv").read_bytes()
        assert a == b

    def test_output_dir_env_fallback(self, tmp_path, monkeypatch, capsys):
        net = tmp_path / "n.txt"
        net.write_text(format_edge_list(netgen.gnp(40, 0.15, 2)))
        config = {
            "datasets": [{"path": "n.txt", "name": "n", "category": "Soc"}],
            "predictors": [{"name": "lp", "grid": [0.0, 0.01]}],
            "rhos": [0.2],
            "seeds": 1,
        }
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(config))
        monkeypatch.setenv("LEAKBENCH_OUTPUT_DIR", str(tmp_path / "envout"))
        assert cli.main(["run", "--config", str(cfg)]) == 0
        assert (tmp_path / "envout" / "loss_table.csv").is_file()
