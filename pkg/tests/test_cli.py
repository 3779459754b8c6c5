import math
import os

import pytest
import yaml

from kernelpde import cli
from kernelpde.config import parse_config
from kernelpde.timestep import ConfigurationError


def write(tmp_path, data, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data) if isinstance(data, dict) else data)
    return str(path)


def test_paper_sci_format():
    assert cli.paper_sci(1.4e-6) == "0.14E-05"
    assert cli.paper_sci(0.11) == "0.11E+00"
    assert cli.paper_sci(0.0996) == "0.10E+00"
    assert cli.paper_sci(math.inf) == "inf"


def test_minimal_converge_config(tmp_path):
    cfg = parse_config(write(tmp_path, "command: converge\npreset: ex2_nonlinear\nk: 3\n"
                                       "cfl: [0.5, 1, 2]\ngrids: 20..640\n"))
    assert cfg.grids == (20, 40, 80, 160, 320, 640)
    assert cfg.cfl == (0.5, 1.0, 2.0)
    assert cfg.variant == "H3" and cfg.k == 3


def test_beta_override_warns(tmp_path):
    with pytest.warns(UserWarning, match="exceeds"):
        parse_config(write(tmp_path, {"command": "run", "preset": "heat1d", "k": 1, "beta2": 9.0}))


@pytest.mark.parametrize("data,match", [
    ({"command": "converge", "preset": "heat1d", "k": 4, "grids": [8, 16]}, r"\.yaml:\d+: k: must be"),
    ({"command": "converge", "preset": "heat1d", "cfl": 0, "grids": [8, 16]}, "cfl"),
    ({"command": "converge", "preset": "nope", "grids": [8, 16]}, "preset"),
    ({"command": "converge", "preset": "heat1d", "grids": [16, 8]}, "increasing"),
    ({"command": "run", "preset": "heat1d", "colour": "blue"}, "colour: unknown key"),
    ({"command": "launch"}, "command"),
    ({"command": "converge", "preset": "schnakenberg", "grids": [8, 16]}, "exact"),
])
def test_config_errors(tmp_path, data, match):
    with pytest.raises(ConfigurationError, match=match):
        parse_config(write(tmp_path, data))


def test_malformed_yaml_reports_line(tmp_path):
    with pytest.raises(ConfigurationError, match="line 2"):
        parse_config(write(tmp_path, "command: run\n  preset: [x\n"))


def test_cli_converge_deterministic(tmp_path):
    cfg = write(tmp_path, {"command": "converge", "preset": "heat1d", "k": 2, "cfl": [1], "grids": [16, 32]})
    out = tmp_path / "out"
    assert cli.main(["converge", "--config", cfg, "--out", str(out)]) == 0
    first = (out / "heat1d_k2_converge.csv").read_bytes()
    assert cli.main(["converge", "--config", cfg, "--out", str(out), "--threads", "2"]) == 0
    assert (out / "heat1d_k2_converge.csv").read_bytes() == first
    lines = first.decode().splitlines()
    assert lines[0] == "cfl,n,linf_error,order"
    assert lines[1].startswith("1,16,0.") and lines[1].endswith(",")
    assert not [p for p in os.listdir(out) if p.endswith(".tmp")]


def test_cli_run_snapshots(tmp_path):
    cfg = write(tmp_path, {"command": "run", "preset": "heat1d", "n": 16, "k": 3, "snapshots": [0, 1]})
    assert cli.main(["run", "--config", cfg, "--out", str(tmp_path)]) == 0
    text = (tmp_path / "heat1d_u_t0.csv").read_text().splitlines()
    assert text[0] == "# t=0 nx=16 ny=1" and text[1] == "x,y,u"
    assert len(text) == 18
    vals = [float(r.split(",")[2]) for r in (tmp_path / "heat1d_u_t1.csv").read_text().splitlines()[2:]]
    xs = [float(r.split(",")[0]) for r in (tmp_path / "heat1d_u_t1.csv").read_text().splitlines()[2:]]
    assert max(abs(v - math.exp(-1) * math.sin(x)) for v, x in zip(vals, xs)) < 1e-2


def test_cli_system_run_writes_each_component(tmp_path):
    cfg = write(tmp_path, {"command": "run", "preset": "schnakenberg", "n": 16, "t_end": 0.1,
                           "snapshots": [0.05, 0.1]})
    assert cli.main(["run", "--config", cfg, "--out", str(tmp_path)]) == 0
    names = sorted(p.name for p in tmp_path.glob("schnakenberg_*.csv"))
    assert names == ["schnakenberg_Ca_t0.05.csv", "schnakenberg_Ca_t0.1.csv",
                     "schnakenberg_Ci_t0.05.csv", "schnakenberg_Ci_t0.1.csv"]
    assert (tmp_path / names[0]).read_text().startswith("# t=0.05 nx=16 ny=16\nx,y,Ca\n")


def test_cli_stability_summary(tmp_path, capsys):
    cfg = write(tmp_path, {"command": "stability", "k": 2, "points": 500})
    assert cli.main(["stability", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert "beta_max=3.2274" in capsys.readouterr().out
    cfg = write(tmp_path, {"command": "stability", "k": 1, "beta": 8.0, "mode": "full", "points": 32}, "f.yaml")
    assert cli.main(["stability", "--config", cfg, "--out", str(tmp_path)]) == 0
    last = (tmp_path / "stability_full_k1.csv").read_text().splitlines()[-1]
    assert float(last.split("max_abs_lambda=")[1]) <= 1 + 1e-10
    cfg = write(tmp_path, {"command": "stability", "k": 3, "beta": 0.495, "mode": "semi2d",
                           "cross_ratio": 2, "points": 100}, "s.yaml")
    assert cli.main(["stability", "--config", cfg, "--out", str(tmp_path)]) == 0
    text = (tmp_path / "stability_semi2d_k3.csv").read_text()
    assert float(text.split("min_q=")[1].split()[0]) >= -1 - 1e-10


def test_cli_compare_and_probe(tmp_path):
    cfg = write(tmp_path, {"command": "compare", "k": [2], "grids": [20, 40], "repeats": 1})
    assert cli.main(["compare", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "compare.csv").read_text().splitlines()
    assert rows[0] == "variant,k,n,cpu_seconds,linf_error" and len(rows) == 5
    cfg = write(tmp_path, {"command": "probe", "k": 1, "alphas": "2..16", "variants": ["H3"]}, "p.yaml")
    assert cli.main(["probe", "--config", cfg, "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "probe_sin_x_k1.csv").read_text().splitlines()
    assert len(rows) == 5 and rows[1].startswith("H3,1,sin_x,2,")


def test_exit_codes(tmp_path, capsys):
    bad = write(tmp_path, {"command": "run", "preset": "heat1d", "k": 7})
    assert cli.main(["run", "--config", bad]) == 2
    assert "k: must be" in capsys.readouterr().err
    assert cli.main(["run", "--config", str(tmp_path / "missing.yaml")]) == 2
    mismatch = write(tmp_path, {"command": "probe"}, "m.yaml")
    assert cli.main(["run", "--config", mismatch]) == 2
    boom = write(tmp_path, {"command": "run", "preset": "heat1d", "k": 1, "n": 64, "cfl": 5.0,
                            "t_end": 200.0, "beta2": 40.0}, "b.yaml")
    with pytest.warns(UserWarning):
        assert cli.main(["run", "--config", boom, "--out", str(tmp_path)]) == 3
    assert "blow-up" in capsys.readouterr().err


def test_unwritable_output_dir(tmp_path):
    cfg = write(tmp_path, {"command": "stability", "k": 1, "points": 10})
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["stability", "--config", cfg, "--out", str(blocker / "sub")]) == 2
