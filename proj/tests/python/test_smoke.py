import math

import numpy as np
import pytest

import mfgcache


def test_radio_values():
    env = mfgcache.RadioEnvironment()
    env.tx_power_w = 0.2
    assert mfgcache.active_probability(env) == pytest.approx(0.001997431262806807, rel=1e-12)
    assert mfgcache.mean_field_interference(env) == pytest.approx(3.73043276670339445e-4, rel=1e-12)
    env.tx_power_w = 1.0
    env.noise_w = 0.0
    assert mfgcache.average_rate(env, 1.0) == pytest.approx(0.596347362323194074, abs=1e-6)


def test_demand_and_control():
    assert mfgcache.expected_distinct_files(99, 1.0, 0.0) == pytest.approx(math.log(100))
    mu = mfgcache.crp_mean_popularities([5, 3, 2, 0], 1.0, 0.5)
    assert mu[0] == pytest.approx(4.5 / 11)
    assert sum(mu) == pytest.approx(1.0)
    assert mfgcache.optimal_caching_fraction(1.0, 1.0, 0.0, 2.0, 1.0, 1.0) == pytest.approx(0.5)


def test_presets_listed():
    assert mfgcache.preset_names() == [f"fig{k}" for k in range(3, 10)]


def test_solve_fig4():
    out = mfgcache.solve("fig4", 0)
    policy, density = out["policy"], out["density"]
    assert policy.shape == density.shape
    assert policy.shape[1:] == (64, 64)
    assert out["iterations"] <= 50
    cell = 1.0 / 64 * 1.0 / 64
    mass = density.sum(axis=(1, 2)) * cell
    np.testing.assert_allclose(mass, 1.0, atol=1e-9)
    mean_p = (policy * density).sum(axis=(1, 2))[:-1] * cell
    assert np.all(mean_p < 0.4)


def test_errors_map_to_python(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"radio": {"sbs_density": 1}}')
    with pytest.raises(mfgcache.ConfigError):
        mfgcache.solve(str(bad))
    with pytest.raises(mfgcache.MissingArtifact):
        mfgcache.run("simulate", "fig6", str(tmp_path / "empty"))


def test_run_writes_artifacts(tmp_path):
    mfgcache.run("solve", "fig4", str(tmp_path))
    assert (tmp_path / "manifest.json").exists()
    assert (tmp_path / "policy_1.bin").exists()
