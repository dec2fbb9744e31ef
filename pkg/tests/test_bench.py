import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schattenosc.bench import ConfigError, ScenarioConfig, classify, refinement_study, run_scenario
from schattenosc.bench import families
from schattenosc.bench.cli import EXIT_CONFIG, EXIT_OK, EXIT_SCENARIO, main


def rank_one_cfg(**over):
    cfg = {
        "id": "rank_one",
        "space": {"domain": "interval", "resolutions": [256]},
        "operator": {"kind": "hilbert"},
        "functions": {"names": ["linear"]},
        "quantities": [{"name": "schatten", "p": 2}, {"name": "besov_adhoc", "p": 2}],
    }
    cfg.update(over)
    return cfg


def small_cfg(**over):
    cfg = {
        "id": "small",
        "seed": 5,
        "space": {"domain": "interval", "resolutions": [32, 64]},
        "operator": {"kind": "hilbert"},
        "dyadic": {"generations": 4},
        "functions": {"family": "standard", "count": 18},
        "quantities": [{"name": "schatten", "p": 2}, {"name": "osc", "p": 2},
                       {"name": "osc_adjacent", "p": 2}, {"name": "besov_adhoc", "p": 2},
                       {"name": "sobolev", "p": 2}, {"name": "mb_weak", "d": 1}],
        "ratios": [["schatten[p=2,q=2]", "besov_adhoc[p=2]"], ["osc[p=2]", "osc_adjacent[p=2]"]],
    }
    cfg.update(over)
    return cfg


# families

def test_family_sizes_and_names():
    fam = families.standard_family(20, seed=3)
    assert len(fam) == 20 and len({n for n, _ in fam}) == 20
    assert [n for n, _ in fam][-4:] == ["trig0", "trig1", "trig2", "trig3"]
    assert len(families.smooth_family(10)) == 10


def test_family_seeded():
    P = np.linspace(0, 1, 50)[:, None]
    a = families.named("trig2", seed=7)(P)
    np.testing.assert_array_equal(a, families.named("trig2", seed=7)(P))
    assert not np.allclose(a, families.named("trig2", seed=8)(P))


def test_family_two_dimensional():
    P = np.random.default_rng(0).uniform(size=(30, 2))
    for name, fn in families.standard_family(20, seed=1):
        v = fn(P)
        assert v.shape == (30,) and np.all(np.isfinite(v)), name


def test_unknown_function():
    with pytest.raises(KeyError):
        families.named("nope")


# config

def test_config_parses_defaults():
    cfg = ScenarioConfig.from_dict(rank_one_cfg())
    assert cfg.resolutions == [256]
    assert cfg.quantities[0].label == "schatten[p=2,q=2]"
    assert cfg.thresholds == {"growth_step": 0.1, "stable_total": 0.1}


def test_config_inf_parameter():
    cfg = ScenarioConfig.from_dict(rank_one_cfg(quantities=[{"name": "schatten", "p": 1,
                                                             "q": "inf"}]))
    assert cfg.quantities[0].params["q"] == math.inf
    assert cfg.quantities[0].label == "schatten[p=1,q=inf]"


@pytest.mark.parametrize("bad", [
    {"quantities": [{"name": "banana"}]},
    {"quantities": [{"p": 2}]},
    {"ratios": [["schatten[p=2,q=2]", "osc[p=2]"]]},
    {"functions": {"family": "standard", "count": 20}},
    {"functions": ["linear", "trig0"]},
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(rank_one_cfg(**bad))


def test_config_not_mapping():
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(["a"])


def test_seed_rule():
    # fixed members need no seed, random members do
    ScenarioConfig.from_dict(rank_one_cfg(functions={"family": "standard", "count": 16}))
    ScenarioConfig.from_dict(rank_one_cfg(functions={"family": "standard", "count": 20}, seed=1))
    ScenarioConfig.from_dict(rank_one_cfg(functions={"family": "standard", "count": 20,
                                                     "seed": 4}))


def test_config_hash_tracks_content():
    a = ScenarioConfig.from_dict(rank_one_cfg())
    b = ScenarioConfig.from_dict(rank_one_cfg())
    c = ScenarioConfig.from_dict(rank_one_cfg(id="other"))
    assert a.config_hash() == b.config_hash() != c.config_hash()


def test_load_yaml(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("id: y\nspace: {domain: interval, resolutions: [16]}\n"
                 "functions: [linear]\nquantities: [{name: sobolev, p: 2}]\n")
    assert ScenarioConfig.load(p).id == "y"
    with pytest.raises(ConfigError):
        ScenarioConfig.load(tmp_path / "missing.yaml")


# scenarios

def test_empty_family():
    rep = run_scenario(rank_one_cfg(functions=None))
    assert rep.ok and rep.rows == [] and rep.ratios == []


def test_rank_one_scenario():
    rep = run_scenario(rank_one_cfg())
    assert rep.ok and len(rep.rows) == 2
    assert rep.values("schatten")[0] == pytest.approx(1 / math.pi, rel=1e-10)
    assert rep.rows[0]["resolution"] == "256"


def test_constant_b_all_zero():
    rep = run_scenario(small_cfg(functions={"family": "constant", "count": 2}))
    assert rep.ok and rep.rows
    assert all(r["value"] == 0 for r in rep.rows)


def test_one_row_per_cell():
    cfg = small_cfg()
    rep = run_scenario(cfg)
    keys = [(r["function"], r["resolution"], r["quantity"], r["params"]) for r in rep.rows]
    assert len(keys) == len(set(keys)) == 18 * 2 * 6


def test_ratio_band_is_max_over_min():
    rep = run_scenario(small_cfg())
    for summary in rep.ratios:
        num = summary["numerator"]
        den = summary["denominator"]
        vals = {(r["function"], r["resolution"]): r["value"] for r in rep.rows
                if f"{r['quantity']}[{r['params']}]" == num}
        dens = {(r["function"], r["resolution"]): r["value"] for r in rep.rows
                if f"{r['quantity']}[{r['params']}]" == den}
        ratios = [vals[k] / dens[k] for k in vals]
        assert summary["min"] == min(ratios) and summary["max"] == max(ratios)
        assert summary["band"] == max(ratios) / min(ratios)
        assert summary["count"] == 36


def test_deterministic_and_thread_independent():
    a = run_scenario(small_cfg()).to_csv()
    b = run_scenario(small_cfg()).to_csv()
    c = run_scenario(small_cfg(), threads=2).to_csv()
    assert a == b == c


def test_seed_changes_random_members():
    a = run_scenario(small_cfg(seed=1))
    b = run_scenario(small_cfg(seed=2))
    assert a.values("sobolev", "linear") == b.values("sobolev", "linear")
    assert a.values("sobolev", "trig0") != b.values("sobolev", "trig0")


def test_module_error_becomes_error_row(caplog):
    cfg = rank_one_cfg(quantities=[{"name": "hajlasz", "p": 2}],
                       space={"domain": "interval", "resolutions": [2048]})
    rep = run_scenario(cfg)
    assert not rep.ok and rep.error["type"]
    assert rep.to_csv().splitlines()[-1].startswith("rank_one,,,error,")
    assert "failed" in caplog.text


def test_json_report():
    rep = run_scenario(rank_one_cfg())
    data = json.loads(rep.to_json())
    assert data["metadata"]["config_hash"] == ScenarioConfig.from_dict(rank_one_cfg()).config_hash()
    assert data["metadata"]["thresholds"]["growth_step"] == 0.1
    assert len(data["rows"]) == 2


def test_weighted_operator_scenario():
    # the rank-one commutator stays rank one on L^2(x^(1/2)); its norm changes
    rep = run_scenario(rank_one_cfg(operator={"kind": "hilbert",
                                              "weight": {"kind": "power", "exponent": 0.5}},
                                    quantities=[{"name": "schatten", "p": 2},
                                                {"name": "schatten", "p": 1}]))
    s2, s1 = rep.values("schatten")
    assert s1 == pytest.approx(s2, rel=1e-8)
    assert s2 != pytest.approx(1 / math.pi, rel=1e-3)


def test_bessel_scenario():
    rep = run_scenario({"id": "bessel", "space": {"domain": "halfspace", "resolutions": [32]},
                        "operator": {"kind": "bessel", "lambda": 0.25},
                        "functions": ["linear"],
                        "quantities": [{"name": "schatten", "p": 2}]})
    assert rep.ok and rep.values("schatten")[0] > 0


# refinement

@pytest.mark.parametrize("values, expected", [
    ([1.0, 1.2, 1.5], "growth"),
    ([1.0, 1.05, 1.08], "stable"),
    ([1.0, 1.2, 1.25], "inconclusive"),
    ([0.0, 0.0, 0.0], "stable"),
    ([1.0, 0.5, 0.2], "inconclusive"),
])
def test_classify(values, expected):
    assert classify(values) == expected


@given(st.lists(st.floats(0.1, 10), min_size=3, max_size=6))
def test_classify_scale_invariant(values):
    v = np.array(values)
    assert classify(v) == classify(3.7 * v)


def test_refinement_needs_three():
    with pytest.raises(ConfigError):
        refinement_study(rank_one_cfg())


def test_refinement_constant_stable():
    rep = refinement_study(rank_one_cfg(
        functions={"family": "constant", "count": 1},
        space={"domain": "interval", "resolutions": [16, 32, 64]}))
    assert {c["class"] for c in rep.classifications} == {"stable"}


def test_refinement_one_dimensional_stable():
    rep = refinement_study(rank_one_cfg(
        functions={"names": ["sin1", "bump", "cubic"]},
        space={"domain": "interval", "resolutions": [64, 128, 256]},
        quantities=[{"name": "schatten", "p": 2}]))
    assert len(rep.classifications) == 3
    for c in rep.classifications:
        assert c["class"] == "stable", c
        assert len(c["steps"]) == 2


def test_refinement_planar_example():
    rep = refinement_study({
        "id": "planar", "space": {"domain": "square", "resolutions": [16, 32, 48]},
        "operator": {"kind": "riesz", "component": 1},
        "functions": {"names": ["sin1"]},
        "quantities": [{"name": "schatten", "p": 2}, {"name": "schatten", "p": 4}]})
    cls = {c["params"]: c for c in rep.classifications}
    assert cls["p=4,q=4"]["class"] == "stable"
    assert cls["p=2,q=2"]["class"] == "growth", cls["p=2,q=2"]


# command line

def write_cfg(tmp_path, cfg):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return str(p)


def test_cli_run(tmp_path, capsys):
    path = write_cfg(tmp_path, rank_one_cfg(ratios=[["schatten[p=2,q=2]", "besov_adhoc[p=2]"]]))
    assert main(["run", path, "--out-dir", str(tmp_path / "o")]) == EXIT_OK
    assert (tmp_path / "o" / "report.csv").read_text().startswith(
        "scenario,function,resolution,quantity,params,value\n")
    assert json.loads((tmp_path / "o" / "report.json").read_text())["rows"]
    assert "band" in capsys.readouterr().out


def test_cli_config_flag_and_seed(tmp_path):
    path = write_cfg(tmp_path, small_cfg(seed=None, functions={"names": ["trig0"]},
                                         space={"domain": "interval", "resolutions": [16]}))
    assert main(["run", "--config", path, "--out-dir", str(tmp_path)]) == EXIT_CONFIG
    assert main(["run", "--config", path, "--seed", "3", "--out-dir", str(tmp_path)]) == EXIT_OK
    meta = json.loads((tmp_path / "report.json").read_text())["metadata"]
    assert meta["seed"] == 3


def test_cli_exit_codes(tmp_path):
    bad = write_cfg(tmp_path, rank_one_cfg(quantities=[{"name": "banana"}]))
    assert main(["run", bad, "--out-dir", str(tmp_path)]) == EXIT_CONFIG
    assert main(["run", str(tmp_path / "nope.yaml")]) == EXIT_CONFIG
    fail = write_cfg(tmp_path, rank_one_cfg(quantities=[{"name": "hajlasz", "p": 2}],
                                            space={"domain": "interval", "resolutions": [2048]}))
    assert main(["run", fail, "--out-dir", str(tmp_path)]) == EXIT_SCENARIO
    assert "error" in (tmp_path / "report.csv").read_text()


def test_cli_diagnose_and_export(tmp_path):
    path = write_cfg(tmp_path, rank_one_cfg(space={"domain": "interval", "resolutions": [32]}))
    assert main(["diagnose", path, "--out-dir", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "diagnostics.csv").stat().st_size > 0
    assert main(["export-operator", path, "--format", "csv", "--out-dir", str(tmp_path)]) == EXIT_OK
    from schattenosc.operators import load_operator
    assert load_operator(tmp_path / "operator.csv").n == 32
