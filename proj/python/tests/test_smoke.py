import os
import pathlib

import numpy as np
import pytest

import corrnet

DATA = pathlib.Path(os.environ.get("CORRNET_DATA", pathlib.Path(__file__).resolve().parents[2] / "data"))


def test_ingest_bundled_snapshot():
    panel = corrnet.ingest(DATA / "gdp_quarterly.csv", DATA / "cpi_annual.csv")
    assert panel.T == 45
    assert panel.n == 13
    assert panel.quarters[0] == "2012Q4"
    assert panel.quarters[-1] == "2023Q4"
    assert panel.x.shape == (45, 13)


def test_strict_policy_rejects_snapshot_min_norm_fits():
    panel = corrnet.ingest(DATA / "gdp_quarterly.csv", DATA / "cpi_annual.csv")
    with pytest.raises(corrnet.Error, match="rank deficient"):
        corrnet.fit_coupled(panel, 1)
    fit = corrnet.fit_coupled(panel, 1, rank_policy="min_norm")
    assert fit.gdp.rank < fit.gdp.regressor_count
    net = corrnet.assemble_network(panel, fit)
    assert np.all(np.diag(net.phi) == 0)
    assert np.all(np.diag(net.psi) == 0)


def test_simulate_fit_network_roundtrip():
    spec = corrnet.random_stable_spec(3, 1, seed=4, target_radius=0.6)
    assert abs(corrnet.joint_spectral_radius(spec) - 0.6) < 1e-6
    panel = corrnet.simulate(spec, 400)
    fit = corrnet.fit_coupled(panel, 1)
    assert np.max(np.abs(fit.gdp.endog_coefs[0] - spec.phi[0])) < 0.1
    resid = fit.gdp.residuals
    assert np.allclose(fit.gdp.resid_cov, resid.T @ resid / resid.shape[0])
    chosen, scores = corrnet.select_lag(panel, 3, "bic")
    assert chosen == 1
    assert sorted(scores) == [1, 2, 3]
    net = corrnet.assemble_network(panel, fit, alpha=0.05, correction="bh")
    assert net.phi.shape == (3, 3)
    stab = corrnet.companion_stability(fit.gdp)
    assert stab["stable"]
    crit, eqs = corrnet.ols_cusum(fit.gdp, 0.05)
    assert crit == 1.358
    assert abs(eqs[0]["path"][-1]) < 1e-10


def test_spec_json_and_determinism():
    spec = corrnet.random_stable_spec(2, 2, seed=9, target_radius=0.5)
    back = corrnet.GeneratorSpec.from_json(spec.to_json())
    a = corrnet.simulate(spec, 50)
    b = corrnet.simulate(back, 50)
    assert np.array_equal(a.x, b.x)
    assert np.array_equal(a.y, b.y)


def test_panel_csv_roundtrip(tmp_path):
    spec = corrnet.random_stable_spec(2, 1, seed=1, target_radius=0.5)
    panel = corrnet.simulate(spec, 20)
    corrnet.save_panel_csv(tmp_path / "p.csv", panel)
    back = corrnet.load_panel_csv(tmp_path / "p.csv")
    assert np.array_equal(back.x, panel.x)
    assert back.labels == panel.labels


def test_f_cdf_and_errors():
    assert corrnet.f_cdf(0.0, 3, 10) == 0.0
    assert abs(corrnet.f_cdf(1e6, 3, 10) - 1.0) < 1e-9
    with pytest.raises(corrnet.Error):
        corrnet.ols_cusum(corrnet.fit_coupled(corrnet.simulate(corrnet.random_stable_spec(1, 1, 1, 0.5), 50), 1).gdp, 0.03)
    with pytest.raises(corrnet.Error):
        corrnet.random_stable_spec(2, 1, 1, 1.5)
