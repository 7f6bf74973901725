import csv
import io
import json
import math
import subprocess
import sys

import pytest

from quantumlimits import LaserParams, DampedHarmonic, Gaussian, sql
from quantumlimits.cli import dumps, format_float, main
from quantumlimits.scenario import load_scenario, scenario_from_dict, set_path

BASE = {
    "units": "natural",
    "laser": {"hbar": 1.0, "k0": 1.0, "intensity": 0.5},
    "mechanics": {"type": "damped_harmonic", "mass": 1.0, "omega_m": 0.5, "gamma": 0.05},
    "port_b": {"type": "vacuum"},
    "filter": {"type": "gaussian", "omega_s": 1.0, "sigma": 0.05},
    "strategies": ["sql", {"name": "caves", "K": 10}, "per_frequency", "broadband"],
    "grid": {"min": 0.5, "max": 2.0, "count": 11, "scale": "log"},
}


@pytest.fixture
def config(tmp_path):
    def write(doc=BASE, name="s.json"):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)
    return write


def run(argv, tmp_path, name="out"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, (out.read_text() if out.exists() else None)


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_csv(config, tmp_path):
    code, text = run(["spectrum", "--config", config(), "--asd"], tmp_path)
    assert code == 0
    rows = parse_csv(text)
    assert list(rows[0]) == ["omega", "pc", "xc", "rp", "ef", "total", "asd_one_sided"]
    assert len(rows) == 11
    for r in rows:
        parts = sum(float(r[k]) for k in ("pc", "xc", "rp", "ef"))
        assert float(r["total"]) == pytest.approx(parts, rel=1e-14)
        assert float(r["asd_one_sided"]) == pytest.approx(math.sqrt(2 * float(r["total"])))
    meta = json.loads((tmp_path / "out.meta.json").read_text())
    assert meta["command"] == "spectrum" and "created" in meta


def test_outputs_are_byte_identical(config, tmp_path):
    for cmd in (["spectrum"], ["compare"], ["compare", "--format", "csv"], ["check"]):
        _, a = run(cmd + ["--config", config()], tmp_path, "a")
        _, b = run(cmd + ["--config", config()], tmp_path, "b")
        assert a == b


def test_compare_json(config, tmp_path):
    code, text = run(["compare", "--config", config()], tmp_path)
    assert code == 0
    summary = json.loads(text)
    s = summary["strategies"]
    assert set(s) == {"sql", "caves", "per_frequency", "broadband"}
    assert s["sql"]["ratio_to_sql"] == 1.0
    assert s["caves"]["ratio_to_sql"] == 1.0
    assert s["caves"]["optimal_intensity"] == pytest.approx(
        s["sql"]["optimal_intensity"] / 10, rel=1e-15)
    assert s["per_frequency"]["ratio_to_sql"] <= s["broadband"]["ratio_to_sql"] <= 1.0
    ref = sql(LaserParams.natural(1.0), DampedHarmonic(1.0, 0.5, 0.05), Gaussian(1.0, 0.05))
    assert summary["sql_delta_s2"] == ref.delta_s2_min


def test_compare_csv(config, tmp_path):
    code, text = run(["compare", "--config", config(), "--format", "csv"], tmp_path)
    assert code == 0
    rows = parse_csv(text)
    assert [r["strategy"] for r in rows] == ["broadband", "caves", "per_frequency", "sql"]
    assert all(r["attained"] in ("true", "false") for r in rows)


def test_sweep_intensity_minimum_near_sql_intensity(config, tmp_path):
    code, text = run(["sweep", "--config", config(), "--param", "laser.intensity",
                      "--values", "0.01:100:81:log"], tmp_path)
    assert code == 0
    rows = parse_csv(text)
    values = [float(r["value"]) for r in rows]
    noise = [float(r["delta_s2"]) for r in rows]
    i = min(range(len(noise)), key=noise.__getitem__)
    i_star = sql(LaserParams.natural(1.0), DampedHarmonic(1.0, 0.5, 0.05),
                 Gaussian(1.0, 0.05)).optimal_intensity
    step = math.log(values[1] / values[0])
    assert abs(math.log(values[i] / i_star)) <= step


def test_sweep_caves_factor_is_flat(config, tmp_path):
    code, text = run(["sweep", "--config", config(), "--param", "strategies.caves.K",
                      "--values", "1:100:5:log", "--quantity", "caves"], tmp_path)
    assert code == 0
    rows = parse_csv(text)
    assert len({r["delta_s2"] for r in rows}) == 1
    intens = [float(r["optimal_intensity"]) * float(r["value"]) for r in rows]
    assert max(intens) == pytest.approx(min(intens), rel=1e-14)


def test_sweep_json(config, tmp_path):
    code, text = run(["sweep", "--config", config(), "--param", "filter.sigma",
                      "--values", "0.01:0.05:3", "--format", "json"], tmp_path)
    assert code == 0
    doc = json.loads(text)
    assert doc["columns"][0] == "value" and len(doc["rows"]) == 3


def test_check(config, tmp_path):
    doc = dict(BASE, mechanics={"type": "free_mass", "mass": 1.0},
               port_b={"type": "static_squeezed", "r": 1.0, "theta": 0.3},
               filter={"type": "rect", "omega_s": 1.0, "halfwidth": 0.001})
    code, text = run(["check", "--config", config(doc)], tmp_path)
    assert code == 0
    out = json.loads(text)
    assert out["heisenberg"]["pass"]
    assert abs(out["heisenberg"]["min_relative_margin"]) < 1e-14
    assert out["signal_fidelity"]["pass"] and out["pass"]
    assert out["recoil_damping_min_advisory"] > 0


def test_check_flags_broad_band(config, tmp_path):
    code, text = run(["check", "--config", config()], tmp_path)
    assert code == 0
    assert json.loads(text)["signal_fidelity"]["pass"] is False


@pytest.mark.parametrize("mutate, argv", [
    (None, ["spectrum", "--config", "/nonexistent.json"]),
    (lambda d: d.update(filter={"type": "boxcar"}), ["spectrum"]),
    (lambda d: d.update(laser={"k0": -1.0}), ["compare"]),
    (lambda d: d.update(extra=1), ["compare"]),
    (lambda d: d.pop("grid"), ["spectrum"]),
    (None, ["sweep", "--param", "mechanics.type", "--values", "1:2:3"]),
    (None, ["sweep", "--param", "laser.nope", "--values", "1:2:3"]),
    (None, ["sweep"]),
    (None, ["spectrum", "--grid", "1:2"]),
])
def test_config_errors_exit_2(config, tmp_path, mutate, argv, capsys):
    doc = json.loads(json.dumps(BASE))
    if mutate:
        mutate(doc)
    if "--config" not in argv:
        argv = argv + ["--config", config(doc)]
    code, text = run(argv, tmp_path)
    assert code == 2 and text is None
    assert "config error" in capsys.readouterr().err


def test_numerical_error_exit_3(config, tmp_path, capsys):
    doc = dict(BASE, mechanics={"type": "damped_harmonic", "mass": 1.0, "omega_m": 1.0,
                                "gamma": 0.0},
               filter={"type": "rect", "omega_s": 1.0, "halfwidth": 0.1})
    code, _ = run(["compare", "--config", config(doc)], tmp_path)
    assert code == 3
    assert "numerical error" in capsys.readouterr().err


def test_scenario_round_trip(config):
    sc = scenario_from_dict(load_scenario(config()))
    again = scenario_from_dict(sc.to_dict())
    assert again.to_dict() == sc.to_dict()


def test_set_path_copies():
    doc = set_path(BASE, "mechanics.mass", 2.0)
    assert doc["mechanics"]["mass"] == 2.0 and BASE["mechanics"]["mass"] == 1.0
    assert set_path(BASE, "strategies.1.K", 3.0)["strategies"][1]["K"] == 3.0


def test_formatting():
    assert format_float(-0.0) == "0"
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(float("inf")) == "inf"
    assert dumps({"b": [1.0, float("nan")], "a": True}) == \
        '{\n  "a": true,\n  "b": [1, null]\n}\n'


def test_module_entry_point(config):
    proc = subprocess.run([sys.executable, "-m", "quantumlimits.cli", "compare", "--config",
                           config(), "--format", "csv"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("strategy,delta_s2_min")
