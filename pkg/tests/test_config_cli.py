import csv
import io
from pathlib import Path

import pytest

from hapvec.cli import main
from hapvec.config import ScenarioConfig, config_from_dict, load_config, write_config
from hapvec.errors import ParseError, ValidationError
from hapvec.experiments import SweepSpec, load_scenario, result_columns

GOLDEN = Path(__file__).parent / "golden"


def test_empty_config_gives_defaults(tmp_path):
    p = tmp_path / "empty.yaml"
    p.write_text("")
    cfg = load_config(p)
    assert cfg == ScenarioConfig()
    assert cfg.deadline == 0.1
    assert cfg.n_ul == 1e6 and cfg.n_dl == 1e5
    assert cfg.uplink.carrier_frequency == 38e9 and cfg.uplink.bandwidth == 400e6


def test_partial_override():
    cfg = config_from_dict({"compute": {"hap_capacity": 5000e9}})
    assert cfg.compute.hap_capacity == 5000e9
    assert cfg == ScenarioConfig().with_param("C_HAP", 5000e9)


def test_compact_exponent_floats(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("compute:\n  hap_capacity: 5e12\n")
    assert load_config(p).compute.hap_capacity == 5e12


@pytest.mark.parametrize("raw,key", [
    ({"r": 0}, "r"),
    ({"n": 2.5}, "n"),
    ({"compute": {"gv_capacity": "800 GFLOPS"}}, "compute.gv_capacity"),
    ({"radio": {"carrier_frequency": "38 GHz"}}, "radio.carrier_frequency"),
    ({"radio": {"bandwidth_sharing": "some"}}, "radio.bandwidth_sharing"),
    ({"colour": 1}, "colour"),
    ({"radio": {"uplink": {"eirp": True}}}, "radio.uplink.eirp"),
])
def test_validation_names_key(raw, key):
    with pytest.raises(ValidationError) as e:
        config_from_dict(raw)
    assert e.value.key == key


def test_malformed_yaml(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("n: [1, 2\n")
    with pytest.raises(ParseError):
        load_config(p)


@pytest.mark.parametrize("cfg", [
    ScenarioConfig(),
    ScenarioConfig(n=90, r=12.5, t_max=0.07, bandwidth_sharing="offloading")
    .with_param("C_GV", 600e9).with_param("n_UL", 3e6),
])
def test_round_trip(cfg, tmp_path):
    p = tmp_path / "rt.yaml"
    write_config(cfg, p)
    assert load_config(p) == cfg


def test_sweep_spec_invariants():
    with pytest.raises(ValidationError):
        SweepSpec("n", (90.0, 50.0))
    with pytest.raises(ValidationError):
        SweepSpec("bandwidth", (1.0,))
    with pytest.raises(ValidationError):
        SweepSpec("n", ())


@pytest.mark.parametrize("preset,param", [("fig1a", "n"), ("fig1b", "C_GV"), ("fig2a", "r")])
def test_presets_load(preset, param):
    cfg, sweep = load_scenario(preset=preset)
    assert sweep.parameter == param and len(sweep.values) == 4


def _read(path):
    return list(csv.DictReader(io.StringIO(Path(path).read_text())))


@pytest.mark.parametrize("mode", ["analytical", "simulate", "both"])
def test_columns_match_golden(mode):
    golden = (GOLDEN / f"columns_{mode}.txt").read_text().strip().split(",")
    assert result_columns(mode) == golden


def test_analyze_writes_golden_header(tmp_path):
    out = tmp_path / "a.csv"
    assert main(["analyze", "--out", str(out)]) == 0
    text = out.read_bytes()
    header = text.split(b"\r\n")[0].decode()
    assert header == (GOLDEN / "columns_analytical.txt").read_text().strip()
    row = _read(out)[0]
    assert 0 <= float(row["eta_star"]) <= 1
    assert float(row["p_rt_star"]) >= float(row["p_rt_local"])


def test_fig1a_sweep_matches_golden_file(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--preset", "fig1a", "--out", str(out)]) == 0
    rows = _read(out)
    gold = _read(GOLDEN / "fig1a_sweep.csv")
    assert [r.keys() for r in rows] == [g.keys() for g in gold]
    for r, g in zip(rows, gold):
        for k in r:
            try:
                assert float(r[k]) == pytest.approx(float(g[k]), rel=1e-9, abs=1e-12)
            except ValueError:
                assert r[k] == g[k]
    eta = [float(r["eta_star"]) for r in rows]
    assert eta[0] == 1.0 and all(b <= a for a, b in zip(eta, eta[1:]))


def test_unstable_cells_are_marked(tmp_path):
    out = tmp_path / "u.csv"
    assert main(["sweep", "--preset", "fig1b", "--out", str(out)]) == 0
    rows = _read(out)
    assert rows[0]["p_rt_local"] == "unstable" and rows[0]["latency_local"] == "unstable"
    assert rows[0]["local_stable"] == "false"
    assert rows[2]["local_stable"] == "true"


def test_sweep_command_line_grid(tmp_path):
    out = tmp_path / "g.csv"
    assert main(["sweep", "--param", "C_HAP", "--values", "3e12,4e12,5e12", "--out", str(out)]) == 0
    assert [float(r["C_HAP"]) for r in _read(out)] == [3e12, 4e12, 5e12]


def test_sweep_both_mode_has_sim_columns(tmp_path):
    out = tmp_path / "b.csv"
    code = main(["sweep", "--param", "r", "--values", "5,10", "--mode", "both",
                 "--frames", "20000", "--seed", "9", "--out", str(out)])
    assert code == 0
    rows = _read(out)
    assert list(rows[0]) == result_columns("both")
    assert all(0 <= float(r["sim_p_rt_star"]) <= 1 for r in rows)


def test_exit_codes(tmp_path):
    assert main(["analyze", "--config", str(tmp_path / "missing.yaml")]) == 3
    bad = tmp_path / "bad.yaml"
    bad.write_text("r: 0\n")
    assert main(["analyze", "--config", str(bad)]) == 1
    inf = tmp_path / "inf.yaml"
    inf.write_text("compute:\n  gv_capacity: 100.0e+9\n  hap_capacity: 100.0e+9\n")
    assert main(["analyze", "--config", str(inf), "--out", str(tmp_path / "i.csv")]) == 2
    row = _read(tmp_path / "i.csv")[0]
    assert row["eta_star"] == "infeasible" and row["p_rt_local"] == "unstable"
    assert main(["sweep", "--out", str(tmp_path / "x.csv")]) == 1
    assert main(["analyze", "--out", str(tmp_path / "no" / "dir.csv")]) == 3


def test_validate_eta_zero_marks_hap_not_applicable(tmp_path):
    out = tmp_path / "v.csv"
    trace = tmp_path / "t.csv"
    assert main(["validate", "--eta", "0", "--frames", "20000", "--out", str(out),
                 "--trace", str(trace)]) == 0
    rows = {r["metric"]: r for r in _read(out)}
    assert rows["wq_hap"]["analytical"] == "n/a" and rows["p_rt_hap"]["status"] == "n/a"
    assert rows["wq_gv"]["status"] in {"pass", "fail"}
    head = trace.read_text().splitlines()[0]
    assert head == "frame_id,path,gen_time,end_time,met_deadline"


def test_validate_unstable_point_rejected(tmp_path):
    assert main(["validate", "--eta", "0.9", "--frames", "20000",
                 "--out", str(tmp_path / "v.csv")]) == 1


def test_validate_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["validate", "--eta", "0.5", "--frames", "50000", "--seed", "4",
                     "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r\n" in a.read_bytes()
