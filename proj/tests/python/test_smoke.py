import json
import math
from pathlib import Path

import numpy as np
import pytest

import mvpremium as mvp

DATA = Path(__file__).resolve().parents[2] / "data"


@pytest.fixture(scope="module")
def bs():
    return mvp.black_scholes_market(0.06, 0.12, 0.15, 1.0)


def test_frontier_closed_forms(bs):
    assert mvp.frontier_slope(bs) == pytest.approx(0.41654636115540644, rel=1e-13)
    assert mvp.gamma(bs, 1.0, 1.2) == pytest.approx(1.9962812512258195, rel=1e-13)
    assert mvp.min_variance(bs, 1.0, 1.2) == pytest.approx(0.11001696759054118, rel=1e-13)
    risky, bond = mvp.efficient_allocation(bs, 1.0, 1.2, 0.0, 1.0)
    assert risky[0] + bond == pytest.approx(1.0)


def test_example_values(bs):
    mean, std, sharpe = mvp.stock_stats_bs(0.12, 0.15, 0.06, 1.0)
    assert abs(mean - 0.1275) <= 5e-4
    assert abs(std - 0.1701) <= 5e-4
    assert abs(sharpe - 0.3862) <= 5e-4
    assert abs(mvp.premium(mvp.frontier_slope(bs), sharpe) - 0.0785) <= 1e-3


def test_two_asset_market():
    m = mvp.constant_market(1.0, 0.02, np.array([0.08, 0.12]), np.array([[0.2, 0.0], [0.05, 0.25]]))
    assert m.assets == 2
    np.testing.assert_allclose(m.risk_premium(0.5), [0.3, 0.34], rtol=1e-13)
    assert m.integrate_theta2(0.0, 1.0) == pytest.approx(0.2056)
    again = mvp.parse_market(m.to_json())
    assert again.to_json() == m.to_json()


def test_exact_simulation_matches_closed_form(bs):
    wealth, stats = mvp.simulate_efficient(bs, 1.0, 1.2, paths=20000, steps=10, seed=3)
    assert wealth.shape == (20000,)
    assert abs(wealth.mean() - 1.2) < 3 * stats["se_mean"]
    again, _ = mvp.simulate_efficient(bs, 1.0, 1.2, paths=20000, steps=10, seed=3, workers=2)
    np.testing.assert_array_equal(wealth, again)


def test_constant_mix_against_lognormal(bs):
    std, mean = mvp.constant_mix_point(bs, np.array([1.0]))
    _, stats = mvp.simulate_constant_mix(bs, 1.0, np.array([1.0]), paths=20000, steps=50, seed=4)
    assert abs(stats["mean_return"] - mean) < 3 * stats["se_mean"]
    assert abs(stats["std_return"] - std) < 3 * stats["se_std"]


def test_errors():
    with pytest.raises(mvp.MvpError, match="Infeasible"):
        mvp.black_scholes_market(0.06, 0.06, 0.15, 1.0)
    bs = mvp.black_scholes_market(0.06, 0.12, 0.15, 1.0)
    with pytest.raises(ValueError, match="TargetBelowRiskFree"):
        mvp.gamma(bs, 1.0, 1.0)


def test_lemma_margin():
    assert mvp.lemma_margin(2.0, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert mvp.lemma_margin(2.0, 3.0) > 0.0


def test_cli_example_and_exit_codes(tmp_path):
    code, out, _ = mvp.run_cli(["example"])
    assert code == 0
    doc = json.loads(out)
    assert doc["pass"] is True
    assert math.isclose(doc["slope"], 0.41654636115540644, rel_tol=1e-12)

    code, _, err = mvp.run_cli(
        ["simulate", "--market", str(DATA / "black_scholes.json"), "--weights", "1",
         "--scheme", "exact", "--out", str(tmp_path)]
    )
    assert code == 2
    assert "SchemeMismatch" in err
    assert not any(tmp_path.iterdir())
