import json

import pytest

from spslater.cli import dumps_json, main, read_config


def run_cli(args):
    return main(args)


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "spslater" in capsys.readouterr().out


def test_exponents_json(capsys):
    code = run_cli(["exponents", "--N", "3", "--alpha", "2", "--p", "2", "--r", "3",
                    "--quiet"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["s_q"] == 3 and record["s_r"] == 3 and record["s_2star"] == 9
    assert record["regime_case"] == 0


def test_solve_rejects_c_zero(capsys):
    code = run_cli(["solve", "--c", "0", "--r", "4", "--gridM", "64", "--Rmax", "10",
                    "--quiet"])
    assert code == 1
    assert "c > 0" in capsys.readouterr().err


def test_h1_hypothesis_exit(capsys):
    # r = q = 3.6 with alpha = 0.5 violates the (H1) side condition
    code = run_cli(["curve", "--r", "3.6", "--alpha", "0.5", "--gridM", "64",
                    "--Rmax", "10", "--quiet"])
    assert code == 1
    assert "(H1)" in capsys.readouterr().err

    # the r-range violation is also named
    code = run_cli(["curve", "--r", "3.0", "--alpha", "0.5", "--gridM", "64",
                    "--Rmax", "10", "--quiet"])
    assert code == 1
    assert "r must lie" in capsys.readouterr().err


def test_fiber_scalar_mode(tmp_path, capsys):
    out = str(tmp_path / "fib")
    code = run_cli(["fiber", "--c", "2", "--I", "5", "--G", "1", "--F", "1",
                    "--r", "3", "--quiet", "--out", out])
    assert code == 0
    sidecar = json.loads(capsys.readouterr().out)
    assert sidecar["t_c"] == pytest.approx(1.0, rel=1e-10)
    lines = (tmp_path / "fib_fiber.csv").read_text().splitlines()
    assert lines[0] == "t,phi_c_u_t"
    assert len(lines) == 401
    assert (tmp_path / "fib_fiber.json").exists()


def test_solve_end_to_end(tmp_path, capsys):
    out = str(tmp_path / "run")
    args = ["solve", "--c", "1.0", "--r", "4", "--gridM", "256", "--Rmax", "30",
            "--quiet", "--out", out]
    code = run_cli(args)
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["converged"] is True
    assert record["lambda"] > 0
    assert record["verification_passed"] is True
    u_csv = (tmp_path / "run_u.csv").read_text()
    assert u_csv.splitlines()[4] == "r,u"

    # bit-identical reproducibility on re-run
    code = run_cli(args)
    capsys.readouterr()
    first = (tmp_path / "run.json").read_text()
    code = run_cli(args)
    capsys.readouterr()
    assert (tmp_path / "run.json").read_text() == first


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.conf"
    cfg.write_text("# sample config\nN = 3\nalpha = 2.0\np = 2.0\nr = 3.0\n")
    code = run_cli(["exponents", "--config", str(cfg), "--quiet"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["r"] == 3.0
    # explicit flag wins over the config value
    code = run_cli(["exponents", "--config", str(cfg), "--r", "4.5", "--quiet"])
    record = json.loads(capsys.readouterr().out)
    assert record["r"] == 4.5 and record["regime_case"] == 5


def test_read_config_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("this is not a key value pair\n")
    from spslater.errors import ParameterError

    with pytest.raises(ParameterError):
        read_config(bad)


def test_eigen_subcommand(tmp_path, capsys):
    out = str(tmp_path / "eig")
    code = run_cli(["eigen", "--gridM", "256", "--Rmax", "30", "--quiet",
                    "--out", out, "--tol", "1e-5"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["lambda_1"] > 0 and record["converged"] is True


def test_dumps_json_round_trip():
    obj = {"a": 0.1 + 0.2, "b": [1.0 / 3.0, 2], "c": "x", "d": True, "e": None,
           "f": {"g": 1e-300}}
    text = dumps_json(obj)
    back = json.loads(text)
    assert back["a"] == obj["a"]
    assert back["b"][0] == obj["b"][0]
    assert back["f"]["g"] == obj["f"]["g"]
