import json

import pytest

from siegel_rankin.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    text = out.out if code in (0, 1) else out.err
    return code, json.loads(text)


def test_kv_map(capsys):
    code, rep = run(capsys, "kv-map", "--n", "3", "--lambda", "2;+1")
    assert code == 0
    assert rep["result"]["tau"] == [2, 0, 0]
    assert rep["command"] == "kv-map" and rep["seed"] == 0


def test_kv_map_inverse(capsys):
    code, rep = run(capsys, "kv-map", "--rho", "3,1,1")
    assert code == 0 and rep["result"]["in_image"] is False


@pytest.mark.parametrize("argv,code", [
    (["kv-map", "--n", "3", "--lambda", "x;+1"], 2),
    (["kv-map", "--n", "3"], 2),
    (["gauss-sum", "--n", "1", "--F", "3", "--X", "[[1]", "--R", "[[1]]", "--tauQ", "[[1]]"], 2),
    (["verify-paper", "--suite", "bogus"], 2),
    (["kv-generator", "--rho", "2,1"], 3),
    (["maass-check", "--lambda", "0,0", "--sigma", "0.4"], 3),
    (["vanishing-certificate", "--n", "3", "--p", "3", "--tau", "[[1,0,0],[0,1,0],[0,0,1]]"], 4),
    (["cusp-reps", "--m", "9"], 3),
])
def test_exit_codes(capsys, argv, code):
    got, rep = run(capsys, *argv)
    assert got == code
    assert rep["exit_code"] == code


def test_gauss_sum_exact(capsys):
    code, rep = run(capsys, "gauss-sum", "--n", "2", "--F", "3", "--chi-index", "1", "--X", "[[0,1],[0,1]]",
                    "--R", "[[0,1],[1,0]]", "--tauQ", "[[1,0],[0,2]]")
    assert code == 0
    assert rep["result"]["cyclotomic"] == {"order": 6, "coefficients": ["9", "-18"]}


def test_gauss_sum_rational_value_is_string(capsys):
    # trivial character, X = 0, R = 0: every unit matrix counts, |GL_1(F_3)| = 2
    code, rep = run(capsys, "gauss-sum", "--n", "1", "--F", "3", "--chi-index", "0", "--X", "[[0]]",
                    "--R", "[[0]]", "--tauQ", "[[1]]")
    assert code == 0 and rep["result"]["value"] == "2"


def test_deterministic_and_out_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    argv = ["--seed", "7", "--out", str(out), "unfold-check", "--family",
            '{"random": {"n": 1, "j": 0, "k": 1, "det_bound": 20}}', "--theta",
            '{"n": 1, "tau": [[1]], "chi": {"modulus": 3, "exponents": [1]}, "P": "x"}', "--s", "2", "--det-bound", "20"]
    c1, r1 = run(capsys, *argv)
    c2, r2 = run(capsys, *argv)
    assert c1 == c2 == 0
    assert r1 == r2 == json.loads(out.read_text())
    assert r1["result"]["relative_discrepancy"] < 1e-6


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('n = 4\nlambda = "2,0;-"\n')
    code, rep = run(capsys, "--config", str(cfg), "kv-map")
    assert code == 0 and rep["result"]["tau"] == [2, 1, 1, 0]


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"bogus": 1}')
    code, _ = run(capsys, "--config", str(cfg), "kv-map")
    assert code == 2


def test_theta_level(capsys):
    code, rep = run(capsys, "theta-level", "--n", "8", "--p", "3")
    assert code == 0
    assert rep["result"]["level"]["b"] == "1/6" and rep["result"]["level"]["c"] == "36"


def test_verify_paper_suite(capsys):
    code, rep = run(capsys, "verify-paper", "--suite", "weights", "--quick")
    assert code == 0 and rep["result"]["passed"]
