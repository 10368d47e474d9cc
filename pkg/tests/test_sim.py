from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from newsprop import market, panel, regress, sentiment
from newsprop.errors import SimConfigError
from newsprop.firms import load_firms
from newsprop.graph import load_edges
from newsprop.sim import (
    SimConfig,
    drift_block_loadings,
    expected_betas,
    simulate,
    write_expected_betas,
)

SMALL = SimConfig(
    n_firms=30,
    n_sectors=4,
    n_markets=2,
    n_days=90,
    edge_prob=0.05,
    news_rate=4.0,
    gamma_pre=0.3,
    gamma_post=0.9,
    gamma_sup=0.1,
    seed=42,
)


def read_bytes(paths):
    return {name: path.read_bytes() for name, path in paths.items()}


class TestSimulate:
    def test_same_seed_byte_identical(self, tmp_path):
        a = simulate(SMALL).write(tmp_path / "a")
        b = simulate(SMALL).write(tmp_path / "b")
        assert read_bytes(a) == read_bytes(b)

    def test_different_seed_differs(self, tmp_path):
        a = simulate(SMALL).write(tmp_path / "a")
        b = simulate(dataclasses.replace(SMALL, seed=43)).write(tmp_path / "b")
        assert read_bytes(a)["prices"] != read_bytes(b)["prices"]

    def test_zero_vol_zero_gamma_prices_constant(self):
        config = dataclasses.replace(
            SMALL, gamma_pre=0.0, gamma_post=0.0, gamma_sup=0.0, market_vol=0.0, idio_vol=0.0
        )
        bundle = simulate(config)
        for series in bundle.prices.values():
            assert np.allclose(series.closes, series.closes[0])
        stores = bundle.stores()
        result = regress.fit(panel.build_panel(stores, "own", "positive", 1))
        assert result.beta_pre == pytest.approx(0.0, abs=1e-9)
        assert result.beta_post == pytest.approx(0.0, abs=1e-9)

    def test_weekends_skipped_in_calendar(self):
        bundle = simulate(SMALL)
        assert all(d.weekday() < 5 for d in bundle.trading_dates)
        no_weekend = simulate(dataclasses.replace(SMALL, weekend_pattern=False))
        assert any(d.weekday() >= 5 for d in no_weekend.trading_dates)

    def test_impossible_calendar_rejected(self):
        with pytest.raises(SimConfigError):
            simulate(dataclasses.replace(SMALL, n_days=10, leak_window=5, effect_window=5))

    def test_bad_config_rejected(self):
        with pytest.raises(SimConfigError):
            simulate(dataclasses.replace(SMALL, edge_prob=1.5))
        with pytest.raises(SimConfigError):
            simulate(dataclasses.replace(SMALL, sentiment_alpha=(1.0, -1.0, 1.0)))
        with pytest.raises(SimConfigError):
            simulate(dataclasses.replace(SMALL, idio_vol=-0.1))

    def test_round_trip_loads_without_rejections(self, tmp_path):
        paths = simulate(SMALL).write(tmp_path)
        _, rej = load_firms(paths["firms"])
        assert rej == []
        _, rej = market.load_prices(paths["prices"])
        assert rej == []
        _, rej = market.load_indices(paths["indices"])
        assert rej == []
        store, rej = sentiment.load_news(paths["news"])
        assert rej == []
        assert len(store) == len(simulate(SMALL).events)
        load_edges(paths["edges"])  # raises on any invalid row

    def test_round_trip_panel_matches_in_memory(self, tmp_path):
        bundle = simulate(SMALL)
        paths = bundle.write(tmp_path)
        firms, _ = load_firms(paths["firms"])
        prices, _ = market.load_prices(paths["prices"])
        indices, _ = market.load_indices(paths["indices"])
        news, _ = sentiment.load_news(paths["news"])
        loaded = panel.Stores(
            firms=firms, prices=prices, indices=indices, news=news, graph=load_edges(paths["edges"])
        )
        a = panel.build_panel(bundle.stores(), "own", "positive", 1)
        b = panel.build_panel(loaded, "own", "positive", 1)
        assert len(a.observations) == len(b.observations)
        for x, y in zip(a.observations, b.observations):
            assert (x.firm_id, x.news_id, x.period) == (y.firm_id, y.news_id, y.period)
            assert x.y == pytest.approx(y.y, abs=1e-7)  # file precision is 12 significant digits

    def test_index_is_mean_log_price(self):
        bundle = simulate(SMALL)
        members = [f for i, f in enumerate(sorted(bundle.prices)) if i % SMALL.n_markets == 0]
        stacked = np.log([bundle.prices[f].closes for f in members])
        assert np.allclose(np.log(bundle.indices["M00"].values), stacked.mean(axis=0))


class TestDriftBlockLoadings:
    def test_unit_windows_identity(self):
        assert np.allclose(drift_block_loadings(1, 1, 1), np.eye(2))

    def test_hand_enumerated_cases(self):
        # w=1, leak=2: half the leak drift falls before block B
        assert np.allclose(drift_block_loadings(1, 2, 1), [[0.5, 0.0], [0.0, 1.0]])
        # w=2, leak=2, effect=2: ramped accumulation inside each block
        assert np.allclose(drift_block_loadings(2, 2, 2), [[0.375, 0.0], [0.125, 0.375]])

    def test_post_injection_never_leaks_into_pre_blocks(self):
        for w in (1, 2, 3, 5):
            for effect in (1, 2, 4):
                assert drift_block_loadings(w, 1, effect)[0, 1] == 0.0

    def test_window_bounds_validated(self):
        with pytest.raises(ValueError):
            drift_block_loadings(0, 1, 1)


class TestExpectedBetas:
    def test_zero_gammas_zero_everywhere(self):
        config = dataclasses.replace(SMALL, gamma_pre=0.0, gamma_post=0.0, gamma_sup=0.0)
        for mode in ("own", "supplier", "client"):
            for polarity in ("positive", "negative"):
                for w in (1, 2, 5):
                    e = expected_betas(config, w, mode, polarity)
                    assert e.beta_pre == e.beta_post == 0.0

    def test_supplier_scales_with_gamma_ratio(self):
        config = dataclasses.replace(SMALL, edge_prob=0.0, n_firms=10**6, gamma_sup=0.09)
        own = expected_betas(config, 1, "own", "positive")
        sup = expected_betas(config, 1, "supplier", "positive")
        # symmetric supplier injection has no omitted-period projection, so
        # beta_pre = beta_post = gamma_sup at the population level
        assert sup.beta_pre == pytest.approx(0.09, abs=1e-6)
        assert sup.beta_post == pytest.approx(0.09, abs=1e-6)
        assert sup.beta_post < own.beta_post / 5.0

    def test_negative_polarity_mirrors_sign(self):
        e = expected_betas(SMALL, 1, "own", "negative")
        assert e.beta_pre < 0.0
        assert e.beta_post < e.beta_pre

    def test_projection_formula_against_monte_carlo(self):
        # brute-force the population regression the formula claims to solve
        rng = np.random.default_rng(991)
        n = 1_500_000
        alpha = SMALL.sentiment_alpha
        trip = rng.dirichlet(alpha, n)
        q = trip[:, 0]
        a_pre, a_post = 0.3, 0.9
        y = np.concatenate(
            [a_pre * (q - 0.5) + rng.normal(0, 0.5, n), a_post * (q - 0.5) + rng.normal(0, 0.5, n)]
        )
        u = np.concatenate([q, np.zeros(n)])
        v = np.concatenate([np.zeros(n), q])
        X = np.column_stack([u - u.mean(), v - v.mean()])
        beta = np.linalg.lstsq(X, y - y.mean(), rcond=None)[0]
        config = dataclasses.replace(
            SMALL, gamma_pre=a_pre, gamma_post=a_post, n_firms=10**9, edge_prob=0.0
        )
        e = expected_betas(config, 1, "own", "positive")
        assert beta[0] == pytest.approx(e.beta_pre, abs=3e-3)
        assert beta[1] == pytest.approx(e.beta_post, abs=3e-3)

    def test_pipeline_recovery_single_seed(self):
        config = SimConfig(
            n_firms=200,
            n_sectors=8,
            n_markets=2,
            n_days=200,
            edge_prob=0.02,
            news_rate=15.0,
            gamma_pre=0.3,
            gamma_post=0.9,
            gamma_sup=0.09,
            seed=20240901,
        )
        stores = simulate(config).stores()
        result = regress.fit(panel.build_panel(stores, "own", "positive", 1))
        e = expected_betas(config, 1, "own", "positive")
        assert abs(result.beta_pre - e.beta_pre) < 3.0 * result.se_pre
        assert abs(result.beta_post - e.beta_post) < 3.0 * result.se_post

    def test_sidecar_schema(self, tmp_path):
        out = tmp_path / "expected.csv"
        write_expected_betas(SMALL, [1, 5], out)
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "mode,polarity,w,beta_pre,beta_post"
        assert len(lines) == 1 + 3 * 2 * 2
