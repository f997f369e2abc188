import json

import numpy as np
import pytest

from cpfix import io
from cpfix.channel import KrausFamily
from cpfix.cli import run

from conftest import SIGMA_X


@pytest.fixture
def lueders_file(tmp_path, lueders):
    path = tmp_path / "lueders.json"
    io.write_channel(path, lueders)
    return str(path)


@pytest.fixture
def mixture_file(tmp_path, mixture):
    path = tmp_path / "mixture.json"
    io.write_channel(path, mixture)
    return str(path)


def _matrix_file(tmp_path, name, m):
    path = tmp_path / name
    io.write_matrix(path, np.asarray(m, dtype=complex))
    return str(path)


class TestIo:
    def test_identity_on_c(self):
        kf = io.channel_from_obj(
            {"dim": 1, "terms": [{"weight": 1.0, "matrix": [[[1.0, 0.0]]]}]}
        )
        assert kf.dim == 1
        np.testing.assert_allclose(kf.operators[0], [[1.0]])

    def test_sigma_x_entries(self):
        m = io.matrix_from_obj([[[0, 0], [1, 0]], [[1, 0], [0, 0]]])
        np.testing.assert_array_equal(m, SIGMA_X)

    def test_negative_weight_rejected(self):
        with pytest.raises(io.SchemaError, match="weight"):
            io.channel_from_obj(
                {"dim": 1, "terms": [{"weight": -1.0, "matrix": [[[1.0, 0.0]]]}]}
            )

    def test_schema_error_names_field(self):
        with pytest.raises(io.SchemaError, match=r"terms\[0\].matrix"):
            io.channel_from_obj(
                {"dim": 2, "terms": [{"weight": 1.0, "matrix": [[[1.0, 0.0]]]}]}
            )

    def test_channel_roundtrip_byte_stable(self, tmp_path, mixture):
        p1 = tmp_path / "a.json"
        p2 = tmp_path / "b.json"
        io.write_channel(p1, mixture)
        io.write_channel(p2, io.read_channel(p1))
        assert p1.read_bytes() == p2.read_bytes()

    def test_matrix_roundtrip_byte_stable(self, tmp_path):
        rng = np.random.default_rng(60)
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        p1 = tmp_path / "a.json"
        p2 = tmp_path / "b.json"
        io.write_matrix(p1, m)
        io.write_matrix(p2, io.read_matrix(p1))
        assert p1.read_bytes() == p2.read_bytes()
        np.testing.assert_array_equal(io.read_matrix(p1), m)

    def test_bare_matrix_list_accepted(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("[[[0, 0], [1, 0]], [[1, 0], [0, 0]]]")
        np.testing.assert_array_equal(io.read_matrix(path), SIGMA_X)

    def test_algebra_parsing(self):
        alg = io.algebra_from_obj({"blocks": [2, 1], "weights": [1.0, 2.0]})
        assert alg.block_dims == (2, 1)
        with pytest.raises(io.SchemaError):
            io.algebra_from_obj({"blocks": [2, 0], "weights": [1.0, 2.0]})


class TestCli:
    def test_check_lueders(self, lueders_file, capsys):
        assert run(["check", lueders_file]) == 0
        out = capsys.readouterr().out
        assert "verdict: True" in out

    def test_check_non_unital(self, tmp_path, capsys):
        kf = KrausFamily.from_operators([np.eye(2, dtype=complex) / np.sqrt(2)])
        path = tmp_path / "sub.json"
        io.write_channel(path, kf)
        assert run(["check", str(path)]) == 1

    def test_fix_dimension(self, lueders_file, capsys):
        assert run(["fix", lueders_file, "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["dimension"] == 2

    def test_commutant(self, mixture_file, capsys):
        assert run(["commutant", mixture_file, "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["dimension"] == 2

    def test_verify_mixture(self, tmp_path, mixture_file, capsys):
        a = _matrix_file(tmp_path, "a.json", [[2, 1], [1, 2]])
        assert run(["verify", mixture_file, a, "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["verdict"] is True

    def test_verify_with_algebra_file(self, tmp_path, lueders_file, capsys):
        a = _matrix_file(tmp_path, "a.json", [[1, 0], [0, 3]])
        alg = tmp_path / "alg.json"
        alg.write_text('{"blocks": [1, 1], "weights": [1.0, 2.0]}')
        assert run(["verify", lueders_file, a, "--algebra", str(alg)]) == 0

    def test_corollary(self, tmp_path, lueders_file):
        a = _matrix_file(tmp_path, "a.json", [[1, 0], [0, 3]])
        assert run(["corollary", lueders_file, a]) == 0

    def test_peel_precondition_exit_one(self, tmp_path, mixture_file, capsys):
        a = _matrix_file(tmp_path, "a.json", [[3, 0], [0, 1]])
        assert run(["peel", mixture_file, a]) == 1
        assert "precondition failure" in capsys.readouterr().err

    def test_peel_lueders(self, tmp_path, lueders_file, capsys):
        a = _matrix_file(tmp_path, "a.json", [[3, 0], [0, 1]])
        assert run(["peel", lueders_file, a, "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert [s["eigenvalue"] for s in report["steps"]] == [3.0, 1.0]

    def test_jensen(self, tmp_path, mixture_file, capsys):
        a = _matrix_file(tmp_path, "a.json", [[2, 1], [1, 2]])
        assert run(["jensen", mixture_file, a, "--eps", "0.1"]) == 0

    def test_explore_deterministic(self, capsys):
        argv = ["explore", "--mode", "unital-only", "--dim", "2", "--trials", "5", "--seed", "7", "--json"]
        assert run(argv) == 0
        first = capsys.readouterr().out
        assert run(argv) == 0
        second = capsys.readouterr().out
        assert first == second

    def test_explore_seed_from_env(self, monkeypatch, capsys):
        monkeypatch.setenv("CPFIX_SEED", "7")
        argv = ["explore", "--mode", "unital-only", "--dim", "2", "--trials", "3", "--json"]
        assert run(argv) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["config"]["seed"] == 7

    def test_malformed_json_exit_two(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert run(["check", str(path)]) == 2
        assert "line" in capsys.readouterr().err

    def test_schema_error_exit_two(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"dim": 1, "terms": [{"weight": -1.0, "matrix": [[[1.0, 0.0]]]}]}')
        assert run(["check", str(path)]) == 2

    def test_dimension_mismatch_exit_two(self, tmp_path, lueders_file, capsys):
        a = _matrix_file(tmp_path, "a.json", np.eye(3))
        assert run(["verify", lueders_file, a]) == 2

    def test_unknown_flag_exit_two(self, lueders_file, capsys):
        assert run(["check", lueders_file, "--frobnicate"]) == 2

    def test_missing_file_exit_two(self, capsys):
        assert run(["check", "/nonexistent/channel.json"]) == 2
