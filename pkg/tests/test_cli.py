"""Front-door behaviour: exit codes, report shape, determinism."""

import json

import numpy as np
import pytest

from spiralpaste import frechet_embed, line_space, space_to_doc
from spiralpaste.cli import main
from conftest import random_integer_space


@pytest.fixture(scope="module")
def line_doc(tmp_path_factory):
    path = tmp_path_factory.mktemp("spaces") / "line.json"
    path.write_text(json.dumps(space_to_doc(line_space(n=24, r_max=1e6))))
    return str(path)


@pytest.fixture(scope="module")
def int_doc(tmp_path_factory):
    sp = random_integer_space(np.random.default_rng(12), n_max=12)
    path = tmp_path_factory.mktemp("spaces") / "ints.json"
    path.write_text(json.dumps(space_to_doc(sp)))
    return str(path), sp


class TestEmbed:
    def test_spiral_report(self, line_doc, tmp_path):
        out = tmp_path / "r.json"
        code = main(["embed", "--input", line_doc, "--p", "2", "--epsilon", "0.2",
                     "--out", str(out)])
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["schema_version"] == "1"
        assert rep["command"] == "embed"
        assert rep["config"]["p"] == 2.0
        assert rep["pass"] is True
        assert all(rep["checks"].values())
        assert rep["report"]["distortion"] <= rep["report"]["analytic_bound"]
        assert rep["seam"]["max_gap"] == 0.0
        assert rep["schedule"]["band_count"] >= 3

    def test_infinite_bound_serialised_as_string(self, line_doc, tmp_path):
        out = tmp_path / "r.json"
        code = main(["embed", "--input", line_doc, "--p", "3", "--epsilon", "0.2",
                     "--out", str(out)])
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["report"]["analytic_bound"] == "inf"

    def test_frechet_method(self, int_doc, tmp_path):
        path, _ = int_doc
        out = tmp_path / "r.json"
        code = main(["embed", "--input", path, "--method", "frechet", "--out", str(out)])
        assert code == 0
        rep = json.loads(out.read_text())
        assert rep["report"]["distortion"] == 1.0

    def test_too_few_bands_is_contract_violation(self, line_doc):
        assert main(["embed", "--input", line_doc, "--p", "2", "--epsilon", "0.2",
                     "--bands", "1"]) == 1

    def test_overflow_exit(self, line_doc):
        assert main(["embed", "--input", line_doc, "--p", "2",
                     "--epsilon", "0.0001"]) == 3


class TestInputErrors:
    def test_missing_file(self):
        assert main(["embed", "--input", "/nonexistent.json", "--p", "2",
                     "--epsilon", "0.2"]) == 2

    def test_malformed_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{oops")
        assert main(["embed", "--input", str(bad), "--p", "2", "--epsilon", "0.2"]) == 2

    def test_schema_violation(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"metric": "linf"}))
        assert main(["embed", "--input", str(bad), "--p", "2", "--epsilon", "0.2"]) == 2

    def test_unknown_subcommand(self):
        assert main(["frobnicate"]) == 2

    def test_bad_flag_value(self, line_doc):
        assert main(["embed", "--input", line_doc, "--p", "two", "--epsilon", "0.2"]) == 2

    def test_empty_sweep_grid(self, line_doc):
        assert main(["sweep", "--input", line_doc, "--p", "", "--eps", "0.2"]) == 2


class TestDistortionCommand:
    def build_map_doc(self, sp):
        fm = frechet_embed(sp)
        return {
            "p": "sup",
            "block_dims": [fm.dimension],
            "images": {pid: {"1": [float(x) for x in fm[pid]]} for pid in sp.ids},
        }

    def test_isometric_map(self, int_doc, tmp_path):
        path, sp = int_doc
        map_path = tmp_path / "map.json"
        map_path.write_text(json.dumps(self.build_map_doc(sp)))
        out = tmp_path / "r.json"
        code = main(["distortion", "--input", path, "--map", str(map_path),
                     "--out", str(out)])
        assert code == 0
        assert json.loads(out.read_text())["report"]["distortion"] == 1.0

    def test_bound_violation_exits_one(self, int_doc, tmp_path):
        path, sp = int_doc
        map_path = tmp_path / "map.json"
        map_path.write_text(json.dumps(self.build_map_doc(sp)))
        assert main(["distortion", "--input", path, "--map", str(map_path),
                     "--bound", "0.99"]) == 1

    def test_non_injective_map(self, int_doc, tmp_path):
        path, sp = int_doc
        doc = self.build_map_doc(sp)
        zero = {"1": [0.0] * doc["block_dims"][0]}
        doc["images"] = {pid: zero for pid in doc["images"]}
        map_path = tmp_path / "map.json"
        map_path.write_text(json.dumps(doc))
        out = tmp_path / "r.json"
        assert main(["distortion", "--input", path, "--map", str(map_path),
                     "--out", str(out)]) == 1
        assert json.loads(out.read_text())["report"]["distortion"] == "inf"

    def test_missing_image_is_schema_error(self, int_doc, tmp_path):
        path, sp = int_doc
        doc = self.build_map_doc(sp)
        doc["images"].pop(sorted(doc["images"])[1])
        map_path = tmp_path / "map.json"
        map_path.write_text(json.dumps(doc))
        assert main(["distortion", "--input", path, "--map", str(map_path)]) == 2


class TestOtherCommands:
    def test_counterexample_report(self, tmp_path):
        out = tmp_path / "r.json"
        assert main(["counterexample", "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["ball_points"] == 34
        assert all(rep["checks"].values())
        assert len(rep["separations"]) == 5

    def test_spiral_zero_eps(self, capsys, tmp_path):
        out = tmp_path / "r.json"
        assert main(["spiral", "--epsilon", "0", "--tmax", "100", "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["report"]["distortion"] == 1.0
        assert rep["checks"]["identity_exact"] is True

    def test_fdd_demo(self, line_doc, tmp_path):
        out = tmp_path / "r.json"
        assert main(["fdd-demo", "--input", line_doc, "--epsilon", "0.2",
                     "--seed", "5", "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["equivalence"]["max_ratio"] == 2.0
        assert rep["pair_isometry_deviation"] == 0.0

    def test_sweep_rows(self, line_doc, tmp_path):
        out = tmp_path / "sweep.csv"
        assert main(["sweep", "--input", line_doc, "--p", "1,2", "--eps",
                     "0.2,0.1", "--out", str(out)]) == 0
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "p,epsilon,distortion,bound,margin"
        assert len(rows) == 5
        # per exponent, the measured column shrinks with eps
        for base in (1, 3):
            assert float(rows[base].split(",")[2]) > float(rows[base + 1].split(",")[2])


class TestDeterminism:
    def test_embed_bytes_stable(self, line_doc, tmp_path):
        out = tmp_path / "r.json"
        argv = ["embed", "--input", line_doc, "--p", "2", "--epsilon", "0.2",
                "--out", str(out)]
        assert main(argv) == 0
        first = out.read_bytes()
        assert main(argv) == 0
        assert out.read_bytes() == first

    def test_fdd_bytes_stable(self, line_doc, tmp_path):
        out = tmp_path / "r.json"
        argv = ["fdd-demo", "--input", line_doc, "--epsilon", "0.2", "--seed", "9",
                "--samples", "150", "--out", str(out)]
        assert main(argv) == 0
        first = out.read_bytes()
        assert main(argv) == 0
        assert out.read_bytes() == first

    def test_sweep_bytes_stable(self, line_doc, tmp_path):
        out = tmp_path / "s.csv"
        argv = ["sweep", "--input", line_doc, "--p", "1,2", "--eps", "0.2,0.1",
                "--out", str(out)]
        assert main(argv) == 0
        first = out.read_bytes()
        assert main(argv) == 0
        assert out.read_bytes() == first
