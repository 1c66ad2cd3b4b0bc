import json
import math

import numpy as np
import pytest
import yaml

from sgdeco import ConfigError, PhysParams, Psd
from sgdeco.cli import main
from sgdeco.harness import (CSV_HEADER, QUANTITIES, ScenarioConfig, emit_results, load_config,
                            phase_factor_stats, run_magnetic_scenario, run_scenario, variance_stats)

WHITE = Psd.band_limited_white(0.01, 10.0)


def config(**kw):
    base = dict(params=PhysParams(), noise_kind="acceleration", psd=WHITE, n_trials=200,
                arm_correlation="independent", master_seed=5)
    base.update(kw)
    return ScenarioConfig(**base)


def test_zero_noise_single_trial():
    stats, rep = run_scenario(config(psd=Psd.zero(), n_trials=1, phi_diff=0.7))
    for q in ("delta_phi", "sigma_phi_sq", "abs_delta_alpha_sq", "neg_log_contrast"):
        assert stats[q].mean == 0.0
    assert stats["contrast"].mean == 1.0
    assert stats["witness"].mean == pytest.approx(math.cos(0.35) ** 2, abs=1e-15)
    assert rep["sigma_phi_sq"].quadrature == 0.0


def test_common_mode_contrast_is_exactly_one():
    stats, _ = run_scenario(config(arm_correlation="common-mode"))
    assert stats["contrast"].mean == 1.0 and stats["contrast"].variance == 0.0


def test_magnetic_phase_vanishes():
    cfg = config(noise_kind="magnetic-gradient", arm_correlation="anti-correlated")
    _, rep = run_magnetic_scenario(cfg)
    assert rep.checks["max_abs_delta_phi"] == 0.0


def test_magnetic_closed_form_unit_value():
    cfg = config(noise_kind="magnetic-gradient", arm_correlation="anti-correlated",
                 psd=Psd.band_limited_white(1.0, 10.0), n_trials=2)
    _, rep = run_magnetic_scenario(cfg)
    assert rep["neg_log_contrast"].closed_form == pytest.approx(1.0)


@pytest.mark.parametrize("field, value", [
    ("noise_kind", "thermal"), ("arm_correlation", "sometimes"), ("n_trials", 0),
    ("n_trials", 2.5), ("master_seed", -1), ("dt", -0.1), ("outputs", ("nope",)),
])
def test_config_validation_names_field(field, value):
    with pytest.raises(ConfigError, match=field):
        config(**{field: value})


def test_magnetic_requires_anti_correlated():
    with pytest.raises(ConfigError, match="arm_correlation"):
        config(noise_kind="magnetic-gradient", arm_correlation="common-mode")


def test_missing_correlation_is_an_error():
    data = config().to_dict()
    del data["arm_correlation"]
    with pytest.raises(ConfigError, match="arm_correlation"):
        ScenarioConfig.from_dict(data)


def test_sample_cap_enforced():
    with pytest.raises(ConfigError, match="sample cap"):
        config(t_f=1e6, dt=1e-2)


def test_json_round_trip_and_byte_stability(tmp_path):
    cfg = config()
    paths = []
    for k in range(2):
        stats, rep = run_scenario(cfg)
        for fmt in ("csv", "json"):
            path = tmp_path / f"run{k}.{fmt}"
            emit_results(stats, rep, fmt, path)
            paths.append(path)
    assert paths[0].read_bytes() == paths[2].read_bytes()
    assert paths[1].read_bytes() == paths[3].read_bytes()
    assert load_config(paths[1]) == cfg
    header = paths[0].read_text().splitlines()[0].split(",")
    assert tuple(header) == CSV_HEADER
    rows = paths[0].read_text().splitlines()[1:]
    assert [r.split(",")[0] for r in rows] == list(QUANTITIES)
    assert all(len(r.split(",")) == len(CSV_HEADER) for r in rows)
    doc = json.loads(paths[1].read_text())
    assert doc["unit_system"] == "natural" and doc["schema_version"] == 1


def test_si_units_are_stamped(tmp_path):
    cfg = config(params=PhysParams(m=2.0), n_trials=4)
    stats, rep = run_scenario(cfg)
    emit_results(stats, rep, "json", tmp_path / "o.json")
    assert json.loads((tmp_path / "o.json").read_text())["unit_system"] == "SI"


def test_unwritable_destination_names_path(tmp_path):
    stats, rep = run_scenario(config(n_trials=2))
    bad = tmp_path / "missing" / "out.csv"
    with pytest.raises(OSError, match="missing"):
        emit_results(stats, rep, "csv", bad)


def test_batching_does_not_change_results():
    from sgdeco.harness import _collect_stats, _run_trials, scenario_trajectories
    cfg = config(n_trials=50)
    xp, xm = scenario_trajectories(cfg)
    a = _run_trials(cfg, xp, xm, block=7)
    b = _run_trials(cfg, xp, xm, block=512)
    np.testing.assert_allclose(a.dphi, b.dphi, rtol=0, atol=1e-12)
    perm = np.random.default_rng(0).permutation(50)
    a.dphi[:] = a.dphi[perm]
    a.d_alpha[:] = a.d_alpha[perm]
    s1, s2 = _collect_stats(cfg, a), _collect_stats(cfg, b)
    for q in QUANTITIES:
        assert s1[q].mean == pytest.approx(s2[q].mean, rel=1e-12, abs=1e-15)


def test_stderr_relation_and_scaling():
    small, _ = run_scenario(config(n_trials=500), analytic=False)
    large, _ = run_scenario(config(n_trials=2000, master_seed=6), analytic=False)
    for q in ("delta_phi", "abs_delta_alpha_sq"):
        s = small[q]
        assert s.stderr == pytest.approx(math.sqrt(s.variance / s.n))
        assert small[q].stderr / large[q].stderr == pytest.approx(2.0, rel=0.2)


def test_statistics_helpers():
    rng = np.random.default_rng(3)
    x = rng.normal(0, 0.5, 20000)
    v = variance_stats(x)
    assert abs(v.mean - 0.25) < 3 * v.stderr
    f = phase_factor_stats(x)
    assert abs(f.mean - math.exp(-0.125)) < 3 * f.stderr


def test_cli_exit_codes(tmp_path, capsys):
    cfg_path = tmp_path / "c.yaml"
    cfg_path.write_text(yaml.safe_dump(config(n_trials=20).to_dict()))
    out = tmp_path / "o.json"
    assert main(["dephase", "--config", str(cfg_path), "--format", "json", "--out", str(out),
                 "--seed", "9", "--trials", "10"]) == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["master_seed"] == 9 and doc["config"]["n_trials"] == 10
    bad = tmp_path / "bad.yaml"
    bad.write_text("noise_kind: acceleration\n")
    assert main(["contrast", "--config", str(bad)]) == 2
    assert main(["quadratic", "--config", str(cfg_path)]) == 2
    assert main(["validate"]) == 0
    capsys.readouterr()


def test_cli_tables(tmp_path, capsys):
    p = tmp_path / "psd.yaml"
    p.write_text("psd: {model: band-limited-white, s0: 2.0, omega_max: 1.0}\nn_points: 3\n")
    assert main(["psd", "--config", str(p)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["omega,S", "0.0,2.0", "0.5,2.0", "1.0,2.0"]
    s = tmp_path / "synth.yaml"
    s.write_text("psd: {model: band-limited-white, s0: 1.0, omega_max: 5.0}\nduration: 1.0\n"
                 "dt: 0.1\n")
    assert main(["synth", "--config", str(s), "--trials", "3", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert np.shape(doc["traces"]) == (3, 11)
