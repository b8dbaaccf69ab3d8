import json

import numpy as np
import pytest

from dispersim.cli import main
from dispersim.config import (
    EXPERIMENT_NAMES,
    ConfigDomainError,
    ConfigError,
    parse_config,
    spec_from_dict,
)
from dispersim.model import OMEGA_Q_DEFAULT


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


# ------------------------------------------------------------------ config
def test_defaults_fill_paper_values(tmp_path):
    path = write_config(tmp_path, {"experiment": "fig2b"})
    spec = parse_config(path)
    assert spec.params.gamma == 1.0
    assert spec.params.omega_q == pytest.approx(OMEGA_Q_DEFAULT)
    assert spec.name == "fig2b"


def test_unknown_experiment(tmp_path):
    path = write_config(tmp_path, {"experiment": "fig9"})
    with pytest.raises(ConfigError, match="fig9"):
        parse_config(path)


def test_unknown_key_names_the_key():
    with pytest.raises(ConfigError, match="'n_pointz'"):
        spec_from_dict({"experiment": "fig2b", "grid": {"n_pointz": 5}})
    with pytest.raises(ConfigError, match="'colour'"):
        spec_from_dict({"experiment": "fig2b", "colour": 1})


def test_out_of_range_params_are_domain_errors():
    with pytest.raises(ConfigDomainError, match="d must be positive"):
        spec_from_dict({"experiment": "custom", "params": {"d": -2}})


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "nope.json")


def test_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{nope")
    with pytest.raises(ConfigError, match="JSON"):
        parse_config(path)


def test_toml_config(tmp_path):
    path = tmp_path / "config.toml"
    path.write_text('experiment = "fig2b"\n[params]\nd = 3.0\n')
    spec = parse_config(path)
    assert spec.params.d == 3.0


def test_relative_output_dir_resolves_against_config(tmp_path):
    path = write_config(tmp_path, {"experiment": "fig2b", "output": {"dir": "results"}})
    spec = parse_config(path)
    assert spec.output_dir == tmp_path / "results"


# ------------------------------------------------------------------ CLI
def test_list_experiments(capsys):
    assert main(["list-experiments"]) == 0
    out = capsys.readouterr().out.split()
    assert out == list(EXPERIMENT_NAMES)


def test_validate_ok(tmp_path, capsys):
    path = write_config(tmp_path, {"experiment": "fig2b"})
    assert main(["validate", str(path)]) == 0
    assert "fig2b" in capsys.readouterr().out


def test_exit_codes(tmp_path, capsys):
    assert main([]) == 2  # no verb
    assert main(["run"]) == 2  # no config
    bad = write_config(tmp_path, {"experiment": "zzz"}, "bad.json")
    assert main(["run", str(bad)]) == 2
    dom = write_config(tmp_path, {"experiment": "custom", "params": {"d": -1}}, "dom.json")
    assert main(["validate", str(dom)]) == 3
    capsys.readouterr()


def test_run_fig2b_and_determinism(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        {"experiment": "fig2b", "sweep": {"n_points": 40},
         "output": {"dir": "out"}},
    )
    assert main(["run", str(cfg)]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "out2")]) == 0
    capsys.readouterr()
    a = (tmp_path / "out" / "fig2b_biexp.csv").read_bytes()
    b = (tmp_path / "out2" / "fig2b_biexp.csv").read_bytes()
    assert a == b  # byte-identical payloads
    # metadata header carries parameters, units and version
    head = a.decode().splitlines()[0]
    meta = json.loads(head.lstrip("# "))
    assert meta["units"] == "gamma=1, v_g=1"
    assert "version" in meta and meta["params"]["gamma"] == 1.0


def test_run_custom_writes_summary(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        {"experiment": "custom", "params": {"d": 5.0},
         "grid": {"n_points": 400, "window": 40.0},
         "output": {"dir": "out"}},
    )
    assert main(["run", str(cfg)]) == 0
    capsys.readouterr()
    summary = json.loads((tmp_path / "out" / "custom_summary.json").read_text())
    assert summary["p_star"] > 0.9
    traj = np.loadtxt(tmp_path / "out" / "custom_trajectory.csv",
                      delimiter=",", skiprows=2)
    assert traj.shape[1] == 3


def test_threads_flag_validates(tmp_path, capsys):
    cfg = write_config(tmp_path, {"experiment": "fig2b", "output": {"dir": "o"}})
    assert main(["run", str(cfg), "--threads", "0"]) == 2
    capsys.readouterr()
