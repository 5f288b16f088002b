import json
import subprocess
import sys

import pytest

from dtnlab import __version__
from dtnlab.cli import fixed, main, parse_config
from dtnlab.cli import run as run_config


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ball_check_stdout(capsys):
    code, out, _ = run(["ball-check", "--n", "3", "--K", "20"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert rep["schema"] == 1 and rep["version"] == __version__
    assert rep["config"]["n"] == 3 and rep["config"]["K"] == 20
    assert rep["result"]["residual"] <= 1e-12


def test_defaults_are_echoed(capsys):
    _, out, _ = run(["radial-dtn"], capsys)
    cfg = json.loads(out)["config"]
    assert cfg["n"] == 3 and cfg["K"] == 10 and cfg["ode_tol"] == 1e-12
    assert cfg["options"]["q"] == "const:1"


def test_radial_commutator(capsys):
    code, out, _ = run(["commutator", "--q", "radial:well:1,2", "--n", "3", "--K", "6"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["result"]["h1_l2_norm"] <= 1e-8
    assert {"basis", "K", "level", "M", "C", "h1_l2_norm", "max_entry", "radial_deficit"} <= set(rep["result"])


def test_monomial_bump_commutator(capsys):
    code, out, _ = run(["commutator", "--q", "monomial:0,0,1 x bump:0.5,0.2"], capsys)
    rep = json.loads(out)
    assert code == 0
    names = {c["name"]: c for c in rep["contracts"]}
    assert names["degree01_matches_moment_oracle"]["passed"]
    assert rep["result"]["h1_l2_norm"] > 1e-3


def test_determinism(tmp_path, capsys):
    a, b = tmp_path / "a" / "r.json", tmp_path / "b" / "r.json"
    for path in (a, b):
        assert main(["radial-projection", "--rotations", "200", "--runs", "3", "--seed", "5",
                     "--out", str(path)]) == 0
    ta = json.loads(a.read_text())
    tb = json.loads(b.read_text())
    ta["config"].pop("out"), tb["config"].pop("out")
    assert ta == tb
    # same output path twice: byte-identical
    main(["moments", "--out", str(a)])
    first = a.read_bytes()
    main(["moments", "--out", str(a)])
    assert a.read_bytes() == first


def test_env_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("DTNLAB_OUTPUT_DIR", str(tmp_path))
    assert main(["ball-check", "--format", "csv"]) == 0
    assert json.loads((tmp_path / "ball-check.json").read_text())["passed"]
    assert (tmp_path / "ball-check.csv").read_text().startswith("row,col,value")


def test_surface_obj_and_csv(tmp_path, capsys):
    out = tmp_path / "sph.json"
    assert main(["surface", "--shape", "sphere", "--format", "obj", "--out", str(out)]) == 0
    assert (tmp_path / "sph.obj").read_text().startswith("# sphere")
    rep = json.loads(out.read_text())
    assert rep["result"]["diameter"] == pytest.approx(3.14159, abs=1e-2)
    assert main(["surface", "--shape", "ellipsoid", "--format", "csv", "--out", str(out)]) == 0
    assert (tmp_path / "sph.csv").read_text().startswith("s,x,rho,region")


def test_contract_violation_exit_one(capsys):
    code, out, err = run(["gohberg", "--symbol", "branch+:2,1;branch-:1", "--N", "128",
                          "--strict-tol", "1e-12", "--lambdas", "16,32"], capsys)
    assert code == 1
    assert "contract violated" in err
    assert json.loads(out)["passed"] is False


def test_gohberg_default_suite(capsys):
    code, out, _ = run(["gohberg", "--N", "256", "--lambdas", "16,64"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert len(rep["result"]["reports"]) >= 5


def test_small_sweep(tmp_path, capsys):
    out = tmp_path / "sweep.json"
    code = main(["delaunay-sweep", "--eps", "0.2", "--grad-h-threshold", "5", "--mesh-resolution", "128",
                 "--out", str(out), "--format", "csv"])
    assert code == 0
    assert (tmp_path / "sweep.csv").read_text().startswith("eps,area,diameter")


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["ball-check", "--n", "4"],
    ["ball-check", "--K", "-1"],
    ["radial-dtn", "--ode-tol", "2"],
    ["surface", "--format", "obj"],
    ["gohberg", "--m-list", "a,b"],
    ["commutator", "--q", "zzz:1"],
])
def test_usage_errors_exit_two(argv, capsys, monkeypatch):
    monkeypatch.delenv("DTNLAB_OUTPUT_DIR", raising=False)
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_dirichlet_eigenvalue_is_contract_failure(capsys):
    code, out, _ = run(["radial-dtn", "--q", "const:-9.869604401089358", "--K", "2"], capsys)
    assert code == 1
    assert json.loads(out)["result"]["degree"] == 0


def test_fixed_precision():
    assert fixed(1 / 3) == 0.333333333333
    assert fixed({"a": [1.0, float("nan")], "b": True, "c": 3}) == {"a": [1.0, "nan"], "b": True, "c": 3}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dtnlab", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout


def test_run_with_programmatic_config(capsys):
    cfg = parse_config(["ball-check", "--n", "2", "--K", "5"])
    assert cfg.n == 2 and cfg.K == 5 and cfg.subcommand == "ball-check"
    assert run_config(cfg) == 0
    assert json.loads(capsys.readouterr().out)["config"]["K"] == 5
    cfg.K = -3
    assert run_config(cfg) == 2
