import json
import math

import pytest

from vkit.cli import main, make_parser

SQUARE_CSV = "0,0\n1,0\n1,1\n0,1\n"


@pytest.fixture
def square_csv(tmp_path):
    path = tmp_path / "square.csv"
    path.write_text(SQUARE_CSV)
    return path


class TestPersist:
    def test_square_vr_diagram(self, tmp_path, square_csv):
        out = tmp_path / "out"
        assert main(["persist", "--input", str(square_csv), "--out", str(out)]) == 0
        rows = (out / "diagram.csv").read_text().splitlines()
        assert rows[0] == "dim,birth,death"
        h1 = [r for r in rows if r.startswith("1,")]
        assert h1 == [f"1,1.0,{math.sqrt(2)!r}"]
        assert (out / "diagram.svg").read_text().startswith("<svg")

    def test_cech_filtration(self, tmp_path, square_csv):
        out = tmp_path / "out"
        code = main(["persist", "--input", str(square_csv),
                     "--filtration", "cech", "--out", str(out)])
        assert code == 0
        rows = (out / "diagram.csv").read_text().splitlines()
        assert all(not r.startswith("1,") for r in rows[1:])  # cycle fills at birth

    def test_empty_file_is_an_input_error(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        assert main(["persist", "--input", str(empty), "--out", str(tmp_path / "o")]) == 2

    def test_distance_matrix_input(self, tmp_path):
        csv = tmp_path / "m.csv"
        csv.write_text("0,1\n1,0\n")
        out = tmp_path / "out"
        assert main(["persist", "--input", str(csv), "--out", str(out)]) == 0
        assert "0,0.0,1.0" in (out / "diagram.csv").read_text()

    def test_corrupt_matrix_is_an_input_error(self, tmp_path):
        csv = tmp_path / "bad.csv"
        csv.write_text("0,1,3\n1,0,1\n3,1,0\n")
        assert main(["persist", "--input", str(csv), "--input-kind", "matrix",
                     "--out", str(tmp_path / "o")]) == 2

    def test_byte_identical_reruns(self, tmp_path, square_csv):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            main(["persist", "--input", str(square_csv), "--out", str(out)])
            outs.append(((out / "diagram.csv").read_bytes(),
                         (out / "diagram.svg").read_bytes()))
        assert outs[0] == outs[1]


class TestFK:
    def test_certificate_values(self, tmp_path):
        out = tmp_path / "fk"
        assert main(["fk", "--n", "2", "--res", "2", "--out", str(out)]) == 0
        cert = json.loads((out / "certificate.json").read_text())
        assert cert["simplex_count"] == 8
        assert cert["max_vertex_star"] == 6
        assert cert["max_diameter"] == pytest.approx(math.sqrt(2) / 2, abs=1e-12)
        assert (out / "mesh.off").read_text().startswith("OFF\n9 8 0\n")

    def test_tetrahedra_count(self, tmp_path):
        out = tmp_path / "fk3"
        assert main(["fk", "--n", "3", "--res", "1", "--out", str(out)]) == 0
        cert = json.loads((out / "certificate.json").read_text())
        assert cert["simplex_count"] == 6

    def test_resource_guard(self, tmp_path):
        assert main(["fk", "--n", "5", "--res", "10", "--out", str(tmp_path / "x")]) == 2


class TestStraighten:
    def test_generator_run_passes(self, tmp_path):
        spec = tmp_path / "map.json"
        spec.write_text(json.dumps({"generator": "sliding_dirac", "leak": 0.05}))
        out = tmp_path / "out"
        assert main(["straighten", "--input", str(spec), "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["all_pass"] is True
        log_lines = (out / "certification.jsonl").read_text().splitlines()
        assert all(json.loads(line)["pass"] for line in log_lines)

    def test_explicit_vertex_measures(self, tmp_path):
        spec = {
            "points": [[0.0], [1.0], [2.0]],
            "cover": [[0, 1], [1, 2]],
            "n": 1,
            "res": 2,
            "vertices": {
                "0": {"support": [0], "weights": [1.0]},
                "1": {"support": [1], "weights": [1.0]},
                "2": {"support": [2], "weights": [1.0]},
            },
        }
        path = tmp_path / "map.json"
        path.write_text(json.dumps(spec))
        out = tmp_path / "out"
        assert main(["straighten", "--input", str(path), "--out", str(out)]) == 0

    def test_failing_generator_exits_three(self, tmp_path):
        spec = tmp_path / "map.json"
        spec.write_text(json.dumps({"generator": "spread"}))
        out = tmp_path / "out"
        assert main(["straighten", "--input", str(spec), "--out", str(out)]) == 3
        summary = json.loads((out / "summary.json").read_text())
        assert summary["failed_stage"] == "estimate_lebesgue"

    def test_byte_identical_reruns(self, tmp_path):
        spec = tmp_path / "map.json"
        spec.write_text(json.dumps({"generator": "two_ball", "n": 1, "leak": 0.05}))
        blobs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["straighten", "--input", str(spec), "--seed", "5",
                         "--out", str(out)]) == 0
            blobs.append(((out / "certification.jsonl").read_bytes(),
                          (out / "summary.json").read_bytes()))
        assert blobs[0] == blobs[1]


class TestVerify:
    def test_small_run_passes(self):
        assert main(["verify", "--trials", "5", "--seed", "11"]) == 0

    def test_zero_trials_is_a_vacuous_pass(self, capsys):
        assert main(["verify", "--trials", "0"]) == 0
        assert "vacuous" in capsys.readouterr().err

    def test_corrupted_metric_input_fails(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("0,1,3\n1,0,1\n3,1,0\n")
        assert main(["verify", "--trials", "0", "--input", str(bad),
                     "--input-kind", "matrix"]) == 1


class TestParser:
    @pytest.mark.parametrize("cmd", ["persist", "fk", "straighten", "verify"])
    def test_help_exits_zero(self, cmd):
        with pytest.raises(SystemExit) as err:
            make_parser().parse_args([cmd, "--help"])
        assert err.value.code == 0
