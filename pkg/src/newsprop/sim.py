"""Synthetic market generator with analytically known injected effects.

Generates firms, a shared trading calendar, log-random-walk prices, market
indices, single-mention news events with Dirichlet sentiment triples, and a
directed supply chain, then emits the whole bundle in the exact file schemas
the loaders accept. Every draw is reproducible: all generators are NumPy
PCG64 streams, and the seed feeds a root SeedSequence that is split, in this
fixed order, into

    0. registry stream   (sector assignment)
    1. edge stream       (supplier->client coin flips)
    2. market stream     (per-day market factors, one row per market)
    3. firm spawn        (one child stream per firm: idiosyncratic returns
                          first, then event count, event days, sentiment
                          triples, in that order)

so per-firm generation could run on any number of workers without changing a
single draw.

Effect injection: an event about firm j with positiveness q adds
gamma_pre * (q - 0.5) / leak_window percent to j's daily log return on each
of the leak_window trading days before the anchor, and
gamma_post * (q - 0.5) / effect_window percent on each of the effect_window
trading days from the anchor on. Suppliers and clients of j receive the same
pattern with gamma_sup / gamma_cli replacing both direct coefficients. The
anchor is the event's trading position; weekend-dated events shift forward
exactly as the panel's anchor rule does.

``expected_betas`` turns a configuration into the coefficients the pooled
regression is expected to recover. Two pieces feed it:

* block loadings, found by enumerating the pre/post blocks on the position
  axis and averaging the cumulated injected drift inside each block (for
  w >= 2 the log of the block's average price is linearized to the average
  of its log prices; exact for w = 1);
* the population least-squares projection. Because the injected driver is
  centered (q - 0.5) while the regressor is the raw probability, the data
  contain a period-level term -A/2 per row that the intercept-free model
  omits; its projection onto the interactions shifts the expected
  coefficients and is included in closed form via the Dirichlet moments.

The market index averages every firm's log price, so it carries the event's
whole injected footprint (direct drift on the mentioned firm, propagated
drift on that firm's suppliers and clients) at weight 1/market size. The
fitted market-control coefficient converges to exactly 1, which subtracts
that footprint from the recovered signal; ``expected_betas`` nets it out to
first order in 1/market size and in edge_prob.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import SimConfigError
from .firms import FirmRecord, FirmRegistry
from .graph import SupplyChainNetwork, SupplyChainSnapshot
from .market import IndexSeries, PriceSeries
from .panel import Stores
from .sentiment import NewsEvent, NewsStore

BUNDLE_FILES = ("firms", "prices", "indices", "news", "edges")

EXPECTED_HEADER = ("mode", "polarity", "w", "beta_pre", "beta_post")


@dataclass(frozen=True)
class SimConfig:
    n_firms: int = 100
    n_sectors: int = 8
    n_markets: int = 2
    n_days: int = 180
    weekend_pattern: bool = True
    edge_prob: float = 0.01
    news_rate: float = 5.0
    sentiment_alpha: tuple[float, float, float] = (0.25, 0.25, 0.25)
    gamma_pre: float = 0.0
    gamma_post: float = 0.0
    gamma_sup: float = 0.0
    gamma_cli: float = 0.0
    market_vol: float = 0.008
    idio_vol: float = 0.01
    leak_window: int = 1
    effect_window: int = 1
    seed: int = 0
    start_date: dt.date = dt.date(2016, 1, 4)

    def validate(self) -> None:
        if self.n_firms < 1 or self.n_sectors < 1 or self.n_markets < 1:
            raise SimConfigError("n_firms, n_sectors, n_markets must be positive")
        if self.n_markets > self.n_firms:
            raise SimConfigError("every market needs at least one firm")
        if self.leak_window < 1 or self.effect_window < 1:
            raise SimConfigError("leak_window and effect_window must be >= 1")
        if self.n_days < 4 * max(self.leak_window, self.effect_window):
            raise SimConfigError(
                f"n_days={self.n_days} cannot hold windows up to "
                f"{max(self.leak_window, self.effect_window)} days (need >= 4x)"
            )
        if not 0.0 <= self.edge_prob <= 1.0:
            raise SimConfigError("edge_prob must lie in [0, 1]")
        if self.news_rate < 0.0:
            raise SimConfigError("news_rate must be nonnegative")
        if self.market_vol < 0.0 or self.idio_vol < 0.0:
            raise SimConfigError("volatilities must be nonnegative")
        if len(self.sentiment_alpha) != 3 or any(a <= 0.0 for a in self.sentiment_alpha):
            raise SimConfigError("sentiment_alpha must be three positive reals")


@dataclass
class SimBundle:
    """An in-memory dataset bundle plus writers for the five file schemas."""

    config: SimConfig
    firm_records: list[FirmRecord]
    trading_dates: list[dt.date]
    prices: dict[str, PriceSeries]
    indices: dict[str, IndexSeries]
    events: list[NewsEvent]
    edges: list[tuple[int, str, str]]

    def stores(self) -> Stores:
        """Wrap the bundle as panel-ready stores without a file round trip."""
        registry = FirmRegistry({r.firm_id: r for r in self.firm_records})
        by_year: dict[int, set[tuple[str, str]]] = {}
        for year, supplier, client in self.edges:
            by_year.setdefault(year, set()).add((supplier, client))
        network = SupplyChainNetwork(
            {y: SupplyChainSnapshot.from_edges(y, e) for y, e in by_year.items()}
        )
        return Stores(
            firms=registry,
            prices=dict(self.prices),
            indices=dict(self.indices),
            news=NewsStore({e.news_id: e for e in self.events}),
            graph=network,
        )

    def write(self, outdir) -> dict[str, Path]:
        """Emit firms/prices/indices/news/edges CSVs; returns path per file."""
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = {name: outdir / f"{name}.csv" for name in BUNDLE_FILES}

        with open(paths["firms"], "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(("firm_id", "market_id", "sector_code", "country"))
            for r in self.firm_records:
                writer.writerow((r.firm_id, r.market_id, r.sector_code, r.country))

        with open(paths["prices"], "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(("firm_id", "date", "close"))
            for firm_id in sorted(self.prices):
                series = self.prices[firm_id]
                for date, close in zip(series.dates, series.closes):
                    writer.writerow((firm_id, date.item().isoformat(), format(close, ".12g")))

        with open(paths["indices"], "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(("market_id", "date", "value"))
            for market_id in sorted(self.indices):
                series = self.indices[market_id]
                for date, value in zip(series.dates, series.values):
                    writer.writerow((market_id, date.item().isoformat(), format(value, ".12g")))

        with open(paths["news"], "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(("news_id", "date", "firm_id", "p_pos", "p_neu", "p_neg"))
            for e in self.events:
                for firm_id in sorted(e.mentions):
                    writer.writerow(
                        (
                            e.news_id,
                            e.date.isoformat(),
                            firm_id,
                            format(e.p_pos, ".12g"),
                            format(e.p_neu, ".12g"),
                            format(e.p_neg, ".12g"),
                        )
                    )

        with open(paths["edges"], "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(("year", "supplier_id", "client_id"))
            for year, supplier, client in self.edges:
                writer.writerow((year, supplier, client))

        return paths


def _trading_calendar(config: SimConfig) -> list[dt.date]:
    days = [config.start_date + dt.timedelta(days=k) for k in range(config.n_days)]
    if config.weekend_pattern:
        return [d for d in days if d.weekday() < 5]
    return days


def simulate(config: SimConfig) -> SimBundle:
    """Generate one dataset bundle, deterministically for a given seed."""
    config.validate()
    root = np.random.SeedSequence(config.seed)
    ss_registry, ss_edges, ss_market, ss_firms = root.spawn(4)

    n = config.n_firms
    firm_ids = [f"F{i:05d}" for i in range(n)]
    market_ids = [f"M{m:02d}" for m in range(config.n_markets)]
    rng_reg = np.random.default_rng(ss_registry)
    sectors = rng_reg.integers(0, config.n_sectors, size=n)
    firm_records = [
        FirmRecord(
            firm_id=firm_ids[i],
            market_id=market_ids[i % config.n_markets],
            sector_code=f"S{sectors[i]:02d}",
            country="SIM",
        )
        for i in range(n)
    ]

    snapshot_year = config.start_date.year
    rng_edges = np.random.default_rng(ss_edges)
    adjacency = rng_edges.random((n, n)) < config.edge_prob
    np.fill_diagonal(adjacency, False)
    edges = [
        (snapshot_year, firm_ids[i], firm_ids[j])
        for i, j in np.argwhere(adjacency)
    ]
    suppliers_of = {j: np.flatnonzero(adjacency[:, j]) for j in range(n)}
    clients_of = {i: np.flatnonzero(adjacency[i, :]) for i in range(n)}

    trading_dates = _trading_calendar(config)
    n_trading = len(trading_dates)
    date_index = np.array([np.datetime64(d, "D") for d in trading_dates])

    rng_market = np.random.default_rng(ss_market)
    market_factor = rng_market.normal(0.0, config.market_vol, size=(config.n_markets, n_trading))

    returns = np.empty((n, n_trading))
    events: list[tuple[int, dt.date, np.ndarray]] = []  # (firm index, date, triple)
    for i, child in enumerate(ss_firms.spawn(n)):
        rng = np.random.default_rng(child)
        returns[i] = rng.normal(0.0, config.idio_vol, size=n_trading)
        n_events = int(rng.poisson(config.news_rate))
        offsets = rng.integers(0, config.n_days, size=n_events)
        triples = rng.dirichlet(config.sentiment_alpha, size=n_events)
        for k in range(n_events):
            events.append((i, config.start_date + dt.timedelta(days=int(offsets[k])), triples[k]))
    for i in range(n):
        returns[i] += market_factor[i % config.n_markets]

    def inject(firm: int, anchor: int, pre_coef: float, post_coef: float, q: float) -> None:
        # coefficients are percent per day; returns are in log units
        lo = max(anchor - config.leak_window, 0)
        if lo < anchor:
            returns[firm, lo:anchor] += pre_coef * (q - 0.5) / (100.0 * config.leak_window)
        hi = min(anchor + config.effect_window, n_trading)
        if anchor < hi:
            returns[firm, anchor:hi] += post_coef * (q - 0.5) / (100.0 * config.effect_window)

    news_events: list[NewsEvent] = []
    for serial, (i, date, triple) in enumerate(events):
        news_events.append(
            NewsEvent(
                news_id=f"N{serial:07d}",
                date=date,
                mentions=frozenset({firm_ids[i]}),
                p_pos=float(triple[0]),
                p_neu=float(triple[1]),
                p_neg=float(triple[2]),
            )
        )
        anchor = int(np.searchsorted(date_index, np.datetime64(date, "D"), side="left"))
        if anchor >= n_trading:
            continue  # disclosed after the horizon; no tradable reaction to inject
        q = float(triple[0])
        inject(i, anchor, config.gamma_pre, config.gamma_post, q)
        for s in suppliers_of[i]:
            inject(int(s), anchor, config.gamma_sup, config.gamma_sup, q)
        for c in clients_of[i]:
            inject(int(c), anchor, config.gamma_cli, config.gamma_cli, q)

    log_prices = np.log(100.0) + np.cumsum(returns, axis=1)
    prices = {
        firm_ids[i]: PriceSeries(
            firm_id=firm_ids[i], dates=date_index.copy(), closes=np.exp(log_prices[i])
        )
        for i in range(n)
    }
    indices = {}
    for m, market_id in enumerate(market_ids):
        members = np.arange(m, n, config.n_markets)
        indices[market_id] = IndexSeries(
            market_id=market_id,
            dates=date_index.copy(),
            values=np.exp(log_prices[members].mean(axis=0)),
        )

    return SimBundle(
        config=config,
        firm_records=firm_records,
        trading_dates=trading_dates,
        prices=prices,
        indices=indices,
        events=news_events,
        edges=sorted(edges),
    )


# ---------------------------------------------------------------------------
# analytic expectations


@dataclass(frozen=True)
class ExpectedBetas:
    mode: str
    polarity: str
    w: int
    beta_pre: float
    beta_post: float


def drift_block_loadings(w: int, leak_window: int, effect_window: int) -> np.ndarray:
    """Per-unit-gamma drift loadings of the pre/post changes, by enumeration.

    Returns a 2x2 matrix M with rows (pre change, post change) and columns
    (gamma_pre, gamma_post): the expected windowed change in percent per day
    contributed by a unit gamma at unit centered positiveness. Positions are
    enumerated relative to the anchor at 0; daily log drift of an injection
    day is 1 / (100 * window length), and a block's log mean collects every
    injection day at or before each of its positions.
    """
    if w < 1 or leak_window < 1 or effect_window < 1:
        raise ValueError("windows must be >= 1")
    pre_days = range(-leak_window, 0)
    post_days = range(0, effect_window)

    def cumulated(position: int, days: range, length: int) -> float:
        return sum(1 for d in days if d <= position) / (100.0 * length)

    def block_mean(block: range, days: range, length: int) -> float:
        return sum(cumulated(k, days, length) for k in block) / len(block)

    block_a = range(-2 * w, -w)
    block_b = range(-w, 0)
    block_c = range(0, w)
    loadings = np.zeros((2, 2))
    for col, (days, length) in enumerate(
        ((pre_days, leak_window), (post_days, effect_window))
    ):
        mean_a = block_mean(block_a, days, length)
        mean_b = block_mean(block_b, days, length)
        mean_c = block_mean(block_c, days, length)
        loadings[0, col] = 100.0 * (mean_b - mean_a) / w
        loadings[1, col] = 100.0 * (mean_c - mean_b) / w
    return loadings


def _dirichlet_moments(alpha: Sequence[float], polarity: str) -> tuple[float, float, float]:
    """(E r, E r^2, E r*s) where r is the regressed probability, s = p_pos."""
    a_pos, a_neu, a_neg = alpha
    a0 = a_pos + a_neu + a_neg
    a_r = a_pos if polarity == "positive" else a_neg
    mu_r = a_r / a0
    m2_r = a_r * (a_r + 1.0) / (a0 * (a0 + 1.0))
    if polarity == "positive":
        m_rs = m2_r
    else:
        m_rs = a_pos * a_neg / (a0 * (a0 + 1.0))
    return mu_r, m2_r, m_rs


def expected_betas(config: SimConfig, w: int, mode: str, polarity: str) -> ExpectedBetas:
    """Closed-form expected regression coefficients for one configuration.

    Derivation (population, balanced pre/post rows, sector means equal
    population means): with drift slopes A_pre, A_post per unit (q - 0.5),
    each row satisfies

        y = A_pre * PRE * (s - 1/2) + A_post * POST * (s - 1/2) + noise

    while the model regresses y on u = PRE*r and v = POST*r (r = regressed
    probability, s = positiveness). Solving the 2x2 population normal
    equations, with the omitted +-A/2 period term projected in, gives

        beta_pre + beta_post = (A_pre + A_post) * Cov(r, s) / Var(r)
        beta_pre - beta_post = (A_pre - A_post) * (E[rs] - E[r]/2) / E[r^2]

    All moments are Dirichlet closed forms.

    The drift slopes net out the index footprint: for a row exposed through
    firm i, the index of i's market averages in the event's direct drift
    (when the mentioned firm shares the market, probability 1/n_markets; the
    mentioned firm itself in own mode), i's own drift, and the drift of the
    event's other propagation targets that land in the market (expected
    count edge_prob * (n_firms - 1) / n_markets per side). Each enters at
    weight 1/market size and is subtracted in full because the market-control
    coefficient converges to 1. Dual supplier-and-client links are second
    order in edge_prob and ignored.
    """
    if mode not in ("own", "supplier", "client"):
        raise ValueError(f"unknown mode {mode!r}")
    if polarity not in ("positive", "negative"):
        raise ValueError(f"unknown polarity {polarity!r}")

    loadings = drift_block_loadings(w, config.leak_window, config.effect_window)
    direct = loadings @ np.array([config.gamma_pre, config.gamma_post])
    sup = loadings @ np.array([config.gamma_sup, config.gamma_sup])
    cli = loadings @ np.array([config.gamma_cli, config.gamma_cli])

    market_size = config.n_firms / config.n_markets
    neighbors_in_market = config.edge_prob * (config.n_firms - 1) / config.n_markets
    if mode == "own":
        signal = direct
        footprint = direct + neighbors_in_market * (sup + cli)
    elif mode == "supplier":
        signal = sup
        footprint = direct / config.n_markets + (1.0 + neighbors_in_market) * sup
        footprint = footprint + neighbors_in_market * cli
    else:
        signal = cli
        footprint = direct / config.n_markets + (1.0 + neighbors_in_market) * cli
        footprint = footprint + neighbors_in_market * sup
    a_pre, a_post = signal - footprint / market_size

    mu_r, m2_r, m_rs = _dirichlet_moments(config.sentiment_alpha, polarity)
    mu_s = config.sentiment_alpha[0] / sum(config.sentiment_alpha)
    var_r = m2_r - mu_r**2
    cov_rs = m_rs - mu_r * mu_s

    total = (a_pre + a_post) * cov_rs / var_r
    gap = (a_pre - a_post) * (m_rs - mu_r / 2.0) / m2_r
    return ExpectedBetas(
        mode=mode,
        polarity=polarity,
        w=w,
        beta_pre=(total + gap) / 2.0 + 0.0,  # + 0.0 normalizes negative zero
        beta_post=(total - gap) / 2.0 + 0.0,
    )


def write_expected_betas(config: SimConfig, windows: Sequence[int], path) -> None:
    """Sidecar of expected coefficients for every mode/polarity/window cell."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EXPECTED_HEADER)
        for mode in ("own", "supplier", "client"):
            for polarity in ("positive", "negative"):
                for w in windows:
                    e = expected_betas(config, w, mode, polarity)
                    writer.writerow(
                        (
                            mode,
                            polarity,
                            w,
                            format(e.beta_pre, ".12g"),
                            format(e.beta_post, ".12g"),
                        )
                    )
