"""Shared fixture helpers: tiny hand-built bundles and random panels."""

from __future__ import annotations

import datetime as dt

import numpy as np
import pytest

from newsprop.firms import FirmRecord, FirmRegistry
from newsprop.graph import SupplyChainNetwork, SupplyChainSnapshot
from newsprop.market import IndexSeries, PRE, POST, PriceSeries
from newsprop.panel import Observation, Panel, Stores
from newsprop.sentiment import NewsEvent, NewsStore


def make_series(firm_id: str, dates, closes) -> PriceSeries:
    return PriceSeries(
        firm_id=firm_id,
        dates=np.array([np.datetime64(d, "D") for d in dates]),
        closes=np.array(closes, dtype=float),
    )


def make_index(market_id: str, dates, values) -> IndexSeries:
    return IndexSeries(
        market_id=market_id,
        dates=np.array([np.datetime64(d, "D") for d in dates]),
        values=np.array(values, dtype=float),
    )


def weekday_dates(start: dt.date, n: int) -> list[dt.date]:
    """First n weekdays on or after start."""
    out = []
    day = start
    while len(out) < n:
        if day.weekday() < 5:
            out.append(day)
        day += dt.timedelta(days=1)
    return out


def make_stores(
    firms=None, prices=None, indices=None, events=None, edges_by_year=None
) -> Stores:
    registry = FirmRegistry({r.firm_id: r for r in (firms or [])})
    news = NewsStore({e.news_id: e for e in (events or [])})
    snapshots = {
        year: SupplyChainSnapshot.from_edges(year, edges)
        for year, edges in (edges_by_year or {}).items()
    }
    return Stores(
        firms=registry,
        prices=dict(prices or {}),
        indices=dict(indices or {}),
        news=news,
        graph=SupplyChainNetwork(snapshots),
    )


def simple_firm(firm_id: str, market="M0", sector="S0") -> FirmRecord:
    return FirmRecord(firm_id=firm_id, market_id=market, sector_code=sector, country="XX")


def simple_event(news_id, date, mentions, p_pos=0.6, p_neu=0.3, p_neg=0.1) -> NewsEvent:
    return NewsEvent(
        news_id=news_id,
        date=date,
        mentions=frozenset(mentions),
        p_pos=p_pos,
        p_neu=p_neu,
        p_neg=p_neg,
    )


def random_panel(rng: np.random.Generator, n_pairs: int, n_sectors: int, w: int = 1) -> Panel:
    """A generic balanced panel with random regressors, for estimator tests."""
    observations = []
    for k in range(n_pairs):
        sector = f"S{rng.integers(0, n_sectors):02d}"
        news_value = float(rng.uniform(0.0, 1.0))
        for period in (PRE, POST):
            observations.append(
                Observation(
                    firm_id=f"F{k:04d}",
                    news_id=f"N{k:05d}",
                    w=w,
                    period=period,
                    y=float(rng.normal(0.0, 1.0)),
                    news_value=news_value,
                    market_x=float(rng.normal(0.0, 1.0)),
                    sector=sector,
                    market="M0",
                )
            )
    return Panel(mode="own", polarity="positive", w=w, observations=observations)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240901)
