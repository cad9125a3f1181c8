import json
import time
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from ordqr.cli import run_cli
from ordqr.errors import (MissingColumnError, MissingValueError, NonNumericCellError,
                          RankDeficientError, TooFewCategoriesError)
from ordqr.io import (config_hash, emit_trace_svg, load_dataset, read_draws, write_dataset,
                      write_draws)
from ordqr.model import OrdinalDataset

SVG = "{http://www.w3.org/2000/svg}"
FAST = ["--burn", "50", "--mcmc", "200"]


def write_csv(path, text):
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def or1_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "or1.csv"
    assert run_cli(["simulate", "--model", "or1", "--n", "150", "--seed", "5", "--out", str(path)]) == 0
    return path


@pytest.fixture(scope="module")
def or2_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "or2.csv"
    assert run_cli(["simulate", "--model", "or2", "--n", "150", "--seed", "5", "--out", str(path)]) == 0
    return path


class TestLoad:
    def test_round_trip(self, small_or1, tmp_path):
        path = tmp_path / "d.csv"
        write_dataset(small_or1, path, provenance={"seed": 11})
        back = load_dataset(path, "y")
        assert np.array_equal(back.X, small_or1.X)
        assert np.array_equal(back.y, small_or1.y)
        assert back.covariate_names == small_or1.covariate_names

    def test_recode(self, tmp_path):
        path = write_csv(tmp_path / "r.csv", "y,x\n9,0.1\n2,0.5\n5,0.3\n2,0.9\n")
        ds = load_dataset(path, "y")
        assert ds.y.tolist() == [3, 1, 2, 1]
        assert ds.meta["levels"] == [2.0, 5.0, 9.0]
        assert ds.covariate_names == ("intercept", "x")

    def test_column_selection_order(self, tmp_path):
        path = write_csv(tmp_path / "c.csv", "a,y,b,c\n1,1,2,3\n2,2,1,1\n4,3,3,5\n0,1,7,2\n")
        ds = load_dataset(path, "y", ["c", "a"], intercept=False)
        assert ds.covariate_names == ("c", "a")
        assert ds.X[0].tolist() == [3.0, 1.0]

    def test_missing_column(self, tmp_path):
        path = write_csv(tmp_path / "m.csv", "y,x\n1,0\n2,1\n3,2\n")
        with pytest.raises(MissingColumnError, match="'z'"):
            load_dataset(path, "y", ["z"])

    def test_non_numeric(self, tmp_path):
        path = write_csv(tmp_path / "n.csv", "y,x\n1,0\n2,abc\n3,2\n")
        with pytest.raises(NonNumericCellError, match="row 3, column 'x'"):
            load_dataset(path, "y")

    def test_missing_value(self, tmp_path):
        path = write_csv(tmp_path / "e.csv", "y,x\n1,0\n2,\n3,2\n1,4\n2,3\n")
        with pytest.raises(MissingValueError, match="row 3"):
            load_dataset(path, "y")
        ds = load_dataset(path, "y", drop_missing=True)
        assert ds.n == 4 and ds.meta["dropped_rows"] == 1

    def test_too_few_categories(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", "y,x\n1,0\n2,1\n1,2\n")
        with pytest.raises(TooFewCategoriesError):
            load_dataset(path, "y")

    def test_rank_deficient_names_column(self, tmp_path):
        path = write_csv(tmp_path / "k.csv", "y,a,b\n1,1,2\n2,2,4\n3,3,6\n1,4,8\n")
        with pytest.raises(RankDeficientError, match="'b'"):
            load_dataset(path, "y")

    def test_errors_are_distinct(self):
        kinds = {MissingColumnError, NonNumericCellError, MissingValueError, TooFewCategoriesError,
                 RankDeficientError}
        assert len(kinds) == 5
        for a in kinds:
            for b in kinds - {a}:
                assert not issubclass(a, b)


class TestDumps:
    def test_draws_round_trip(self, tmp_path):
        draws = np.random.default_rng(0).normal(size=(3, 40)) * 1e3
        write_draws(tmp_path / "d.csv", ["a", "b", "c"], draws, {"seed": 4, "config_hash": "abc"})
        names, back, prov = read_draws(tmp_path / "d.csv")
        assert names == ["a", "b", "c"]
        assert np.array_equal(back, draws)
        assert prov == {"seed": 4, "config_hash": "abc"}

    def test_config_hash_stable(self):
        a = config_hash({"b": 1, "a": np.array([1.0, 2.0])})
        assert a == config_hash({"a": [1.0, 2.0], "b": 1})
        assert a != config_hash({"a": [1.0, 2.0], "b": 2})
        assert len(a) == 16


class TestSvg:
    def test_well_formed(self, tmp_path):
        series = np.sin(np.arange(4500) / 50.0)
        t0 = time.perf_counter()
        emit_trace_svg(series, "beta_1", tmp_path / "a.svg", provenance={"seed": 1})
        assert time.perf_counter() - t0 < 1.0
        root = ET.parse(tmp_path / "a.svg").getroot()
        polylines = root.findall(f"{SVG}polyline")
        assert len(polylines) == 1
        assert len(polylines[0].get("points").split()) == 4500
        texts = [t.text for t in root.findall(f"{SVG}text")]
        assert "beta_1" in texts and "iteration" in texts

    def test_identical_series_identical_files(self, tmp_path):
        s = np.random.default_rng(1).normal(size=300)
        emit_trace_svg(s, "x", tmp_path / "a.svg")
        emit_trace_svg(s.copy(), "x", tmp_path / "b.svg")
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    def test_label_escaped(self, tmp_path):
        emit_trace_svg([1.0, 2.0], "a<b&c", tmp_path / "e.svg")
        ET.parse(tmp_path / "e.svg")

    def test_empty_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_trace_svg([], "x", tmp_path / "e.svg")


class TestCli:
    def test_fit_outputs(self, or1_csv, tmp_path, capsys):
        out = tmp_path / "fit"
        code = run_cli(["fit", "--model", "or1", "--data", str(or1_csv), *FAST, "--seed", "2",
                        "--out", str(out), "--emit-draws", "--emit-plots", "--cutoff", "0.3", "--verbose"])
        assert code == 0
        printed = capsys.readouterr().out
        for col in ("Post Mean", "Post Std", "Upper Credible", "Lower Credible", "MH acceptance rate"):
            assert col in printed
        doc = json.loads((out / "summary.json").read_text())
        assert list(doc)[:11] == ["model", "quantile", "burn", "mcmc", "seed", "parameters", "acceptance_rate",
                                  "log_marg_like", "dic", "pd", "dev_post_mean"]
        assert doc["seed"] == 2 and doc["burn"] == 50 and doc["mcmc"] == 200
        assert [r["name"] for r in doc["parameters"]] == ["intercept", "x2", "x3", "delta_1", "delta_2"]
        assert abs(doc["dic"] - doc["dev_post_mean"] - 2 * doc["pd"]) < 1e-10
        names, draws, prov = read_draws(out / "draws.csv")
        assert draws.shape == (5, 250) and prov["seed"] == 2 and prov["config_hash"] == doc["config_hash"]
        assert sorted(p.name for p in out.glob("trace_*.svg")) == sorted(f"trace_{n}.svg" for n in names)
        assert doc["config_hash"] in (out / "summary.txt").read_text()
        assert "inefficiency" in doc

    def test_byte_identical_reruns(self, or2_csv, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert run_cli(["fit", "--model", "or2", "--data", str(or2_csv), *FAST, "--seed", "9",
                            "--out", str(out), "--emit-draws"]) == 0
            outs.append(out)
        for f in ("summary.json", "draws.csv", "summary.txt"):
            assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()

    def test_env_seed_fallback(self, or2_csv, tmp_path, monkeypatch):
        monkeypatch.setenv("OQR_SEED", "9")
        assert run_cli(["fit", "--model", "or2", "--data", str(or2_csv), *FAST, "--out", str(tmp_path / "e")]) == 0
        assert json.loads((tmp_path / "e" / "summary.json").read_text())["seed"] == 9
        assert run_cli(["fit", "--model", "or2", "--data", str(or2_csv), *FAST, "--seed", "3",
                        "--out", str(tmp_path / "f")]) == 0
        assert json.loads((tmp_path / "f" / "summary.json").read_text())["seed"] == 3

    def test_summary_subcommand(self, or1_csv, tmp_path, capsys):
        out = tmp_path / "s"
        run_cli(["fit", "--model", "or1", "--data", str(or1_csv), *FAST, "--out", str(out), "--emit-draws"])
        assert run_cli(["summary", "--draws", str(out / "draws.csv"), "--cutoff", "0.3",
                        "--out", str(tmp_path / "s.json")]) == 0
        doc = json.loads((tmp_path / "s.json").read_text())
        fit_doc = json.loads((out / "summary.json").read_text())
        for a, b in zip(doc["parameters"], fit_doc["parameters"]):
            assert a["name"] == b["name"]
            for key in ("post_mean", "post_std", "upper_credible", "lower_credible"):
                assert a[key] == pytest.approx(b[key], rel=1e-13)
        assert doc["burn"] == 50 and doc["mcmc"] == 200

    def test_coveffect(self, or2_csv, tmp_path):
        out = tmp_path / "ce"
        assert run_cli(["coveffect", "--model", "or2", "--data", str(or2_csv), *FAST, "--covariate", "x2",
                        "--mode", "add", "--amount", "0.1", "--out", str(out)]) == 0
        doc = json.loads((out / "coveffect.json").read_text())
        eff = list(doc["effect"].values())
        assert len(eff) == 3 and abs(sum(eff)) < 1e-10 and eff[2] > 0

    def test_prior_matrix_file(self, or2_csv, tmp_path):
        np.savetxt(tmp_path / "B0.csv", 2.0 * np.eye(3), delimiter=",")
        assert run_cli(["fit", "--model", "or2", "--data", str(or2_csv), *FAST, "--prior-B0",
                        str(tmp_path / "B0.csv"), "--out", str(tmp_path / "pm")]) == 0
        np.savetxt(tmp_path / "bad.csv", np.eye(2), delimiter=",")
        assert run_cli(["fit", "--model", "or2", "--data", str(or2_csv), *FAST, "--prior-B0",
                        str(tmp_path / "bad.csv")]) == 2

    def test_simulated_file_has_provenance(self, or1_csv):
        head = or1_csv.read_text().splitlines()[:3]
        assert any(line.startswith("# config_hash=") for line in head)
        assert any(line.startswith("# seed=5") for line in head)

    @pytest.mark.parametrize("argv", [
        ["frobnicate"],
        [],
        ["fit", "--model", "or3", "--data", "x.csv"],
        ["fit", "--model", "or1", "--data", "does-not-exist.csv"],
    ])
    def test_config_errors_exit_2(self, argv, capsys):
        assert run_cli(argv) == 2

    def test_unknown_subcommand_prints_usage(self, capsys):
        run_cli(["frobnicate"])
        assert "usage" in capsys.readouterr().err

    def test_data_errors_exit_2(self, or1_csv, tmp_path, capsys):
        assert run_cli(["fit", "--model", "or2", "--data", str(or1_csv), *FAST]) == 2
        assert "OR_I" in capsys.readouterr().err
        assert run_cli(["fit", "--model", "or1", "--data", str(or1_csv), "--mcmc", "10"]) == 2
        assert run_cli(["fit", "--model", "or1", "--data", str(or1_csv), *FAST, "--p", "1.5"]) == 2
        assert run_cli(["fit", "--model", "or1", "--data", str(or1_csv), *FAST, "--covariates", "nope"]) == 2
        assert run_cli(["fit", "--model", "or1", "--data", str(or1_csv), *FAST, "--cutoff", "2"]) == 2

    def test_numeric_failure_exit_3(self, tmp_path, capsys):
        # a single retained draw repeated gives a zero-variance chain
        write_draws(tmp_path / "c.csv", ["a"], np.ones((1, 200)), {"burn": 0})
        assert run_cli(["summary", "--draws", str(tmp_path / "c.csv"), "--cutoff", "0.1"]) == 3
        assert "numerical" in capsys.readouterr().err

    def test_module_entry_point(self, tmp_path):
        import subprocess
        import sys
        res = subprocess.run([sys.executable, "-m", "ordqr", "--version"], capture_output=True, text=True)
        assert res.returncode == 0 and "ordqr" in res.stdout

    def test_dataset_meta_from_cli_file(self, or1_csv):
        ds = load_dataset(or1_csv, "y")
        assert isinstance(ds, OrdinalDataset) and ds.J == 4 and ds.n == 150
