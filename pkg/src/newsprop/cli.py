"""Command-line driver: validate inputs, run the estimation grid, simulate.

Configuration comes from flags, optionally backed by a plain key=value file
(--config); flags override file values. All outputs are written atomically
(write to a temp file, then rename), so an interrupted run never leaves a
truncated export. Estimation cells (window, mode, polarity) are independent;
a worker pool sized by --threads runs them, and results are emitted in sorted
cell order so output bytes do not depend on the thread count.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as dt
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import graph, market, panel, regress, report, sentiment, sim
from .errors import LoadError
from .firms import load_firms

DEFAULT_WINDOWS = (1, 2, 3, 4, 5, 30, 180, 365)


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_emit(path: Path, write: Callable[[Path], None]) -> None:
    """Run a writer against a temp path, then rename over the target."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    os.close(fd)
    try:
        write(Path(tmp))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_config_file(path) -> dict[str, str]:
    """Parse a plain key=value file; '#' starts a comment, blank lines skipped."""
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _parse_windows(text: str) -> list[int]:
    windows = [int(part) for part in text.split(",") if part.strip()]
    if not windows or any(w < 1 for w in windows):
        raise ValueError(f"windows must be positive integers, got {text!r}")
    if len(set(windows)) != len(windows):
        raise ValueError(f"windows must be distinct, got {text!r}")
    return windows


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _merge(args: argparse.Namespace, file_values: dict[str, str], key: str, parse=str):
    """Flag value if given, else config-file value, else None."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in file_values:
        return parse(file_values[key])
    return None


def _load_bundle(paths: dict[str, str], strict: bool):
    """Run every loader in audit mode; returns (stores, report lines, n rejected)."""
    lines = []
    total_rejected = 0

    firms, rej = load_firms(paths["firms"], strict=False)
    lines.append(f"firms: {len(firms)} accepted, {len(rej)} rejected")
    lines += [f"  firms {r}" for r in rej]
    total_rejected += len(rej)

    prices, rej = market.load_prices(paths["prices"], strict=False)
    n_quotes = sum(len(s) for s in prices.values())
    lines.append(f"prices: {len(prices)} series / {n_quotes} quotes accepted, {len(rej)} rejected")
    lines += [f"  prices {r}" for r in rej]
    total_rejected += len(rej)

    indices, rej = market.load_indices(paths["indices"], strict=False)
    n_quotes = sum(len(s) for s in indices.values())
    lines.append(f"indices: {len(indices)} series / {n_quotes} quotes accepted, {len(rej)} rejected")
    lines += [f"  indices {r}" for r in rej]
    total_rejected += len(rej)

    news, rej = sentiment.load_news(paths["news"], strict=False)
    lines.append(f"news: {len(news)} events accepted, {len(rej)} rejected")
    lines += [f"  news {r}" for r in rej]
    total_rejected += len(rej)

    network = graph.load_edges(paths["edges"])
    n_links = sum(len(network.snapshot(y).edges) for y in network.years)
    lines.append(f"edges: {len(network.years)} snapshots / {n_links} links accepted, 0 rejected")

    stores = panel.Stores(firms=firms, prices=prices, indices=indices, news=news, graph=network)
    if strict and total_rejected:
        raise LoadError(f"strict mode: {total_rejected} rejected rows")
    return stores, lines, total_rejected


def _bundle_paths(args, file_values) -> dict[str, str]:
    paths = {}
    for key in ("firms", "prices", "indices", "news", "edges"):
        value = _merge(args, file_values, key)
        if value is None:
            raise ValueError(f"missing required input path --{key}")
        paths[key] = value
    return paths


def cmd_validate(args: argparse.Namespace) -> int:
    file_values = read_config_file(args.config) if args.config else {}
    strict = args.strict or _parse_bool(file_values.get("strict", "false"))
    try:
        paths = _bundle_paths(args, file_values)
        _, lines, rejected = _load_bundle(paths, strict=False)
    except (OSError, ValueError) as exc:
        print(f"validate: {exc}", file=sys.stderr)
        return 1
    for line in lines:
        print(line)
    print(f"{rejected} rejected")
    if strict and rejected:
        return 1
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    file_values = read_config_file(args.config) if args.config else {}
    strict = args.strict or _parse_bool(file_values.get("strict", "false"))
    robust = args.robust_se or _parse_bool(file_values.get("robust_se", "false"))
    export_panel = args.export_panel or _parse_bool(file_values.get("export_panel", "false"))
    threads = _merge(args, file_values, "threads", int) or 1
    windows = _merge(args, file_values, "windows", _parse_windows) or list(DEFAULT_WINDOWS)
    modes = [m.strip() for m in (_merge(args, file_values, "mode") or "own").split(",") if m.strip()]
    polarities = [
        p.strip() for p in (_merge(args, file_values, "polarity") or "positive").split(",") if p.strip()
    ]
    outdir = Path(_merge(args, file_values, "out") or "out")

    try:
        paths = _bundle_paths(args, file_values)
        stores, _, _ = _load_bundle(paths, strict=strict)
    except (OSError, ValueError) as exc:
        print(f"run: {exc}", file=sys.stderr)
        return 1

    cells = sorted((m, p, w) for m in modes for p in polarities for w in windows)

    def run_cell(cell):
        mode, polarity, w = cell
        built = panel.build_panel(stores, mode=mode, polarity=polarity, w=w)
        result = regress.fit(built, robust=robust)
        return built, result

    fits = {}
    failures = {}
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for cell, outcome in zip(cells, pool.map(lambda c: _guard(run_cell, c), cells)):
            if isinstance(outcome, Exception):
                failures[cell] = outcome
            else:
                fits[cell] = outcome

    for cell in cells:
        mode, polarity, w = cell
        if cell in failures:
            print(f"cell mode={mode} polarity={polarity} w={w}: ERROR {failures[cell]}")
        else:
            built, result = fits[cell]
            print(
                f"cell mode={mode} polarity={polarity} w={w}: "
                f"n_obs={result.n_obs} diff={result.diff:.6g} p={result.diff_p:.3g}"
            )
            if export_panel:
                atomic_emit(
                    outdir / f"panel_{mode}_{polarity}_w{w}.csv",
                    lambda p, built=built: panel.write_panel(built, p),
                )

    results = [fits[cell][1] for cell in cells if cell in fits]
    if results:
        atomic_emit(outdir / "fits.csv", lambda p: regress.write_fits(results, p))
        atomic_emit(
            outdir / "effects.csv",
            lambda p: report.write_effects(report.effect_plot_data(results), p),
        )
        sections = []
        for mode in sorted(set(modes)):
            for polarity in sorted(set(polarities)):
                group = [r for r in results if r.mode == mode and r.polarity == polarity]
                if group:
                    sections.append(report.coefficient_table(group))
        atomic_write_text(outdir / "table.txt", "\n".join(sections))

    if failures:
        print(f"{len(failures)} of {len(cells)} cells failed", file=sys.stderr)
        return 1
    return 0


def _guard(fn, arg):
    try:
        return fn(arg)
    except Exception as exc:  # cell failures are reported, not fatal
        return exc


_SIM_FIELD_PARSERS = {
    "n_firms": int,
    "n_sectors": int,
    "n_markets": int,
    "n_days": int,
    "weekend_pattern": _parse_bool,
    "edge_prob": float,
    "news_rate": float,
    "sentiment_alpha": lambda t: tuple(float(x) for x in t.split(",")),
    "gamma_pre": float,
    "gamma_post": float,
    "gamma_sup": float,
    "gamma_cli": float,
    "market_vol": float,
    "idio_vol": float,
    "leak_window": int,
    "effect_window": int,
    "seed": int,
    "start_date": dt.date.fromisoformat,
}


def sim_config_from_mapping(values: dict[str, str]) -> sim.SimConfig:
    kwargs = {}
    for key, value in values.items():
        if key in ("out", "windows", "strict", "robust_se"):
            continue
        if key not in _SIM_FIELD_PARSERS:
            raise ValueError(f"unknown simulation key {key!r}")
        kwargs[key] = _SIM_FIELD_PARSERS[key](value)
    return sim.SimConfig(**kwargs)


def cmd_simulate(args: argparse.Namespace) -> int:
    file_values = read_config_file(args.config) if args.config else {}
    windows = _merge(args, file_values, "windows", _parse_windows) or list(DEFAULT_WINDOWS)
    outdir = Path(_merge(args, file_values, "out") or "out")
    try:
        config = sim_config_from_mapping(file_values)
        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed)
        bundle = sim.simulate(config)
    except ValueError as exc:
        print(f"simulate: {exc}", file=sys.stderr)
        return 1
    paths = bundle.write(outdir)
    atomic_emit(
        outdir / "expected_betas.csv",
        lambda p: sim.write_expected_betas(config, windows, p),
    )
    for name in sim.BUNDLE_FILES:
        print(f"wrote {paths[name]}")
    print(f"wrote {outdir / 'expected_betas.csv'}")
    print(f"{len(bundle.events)} events, {len(bundle.trading_dates)} trading days")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newsprop",
        description="News-sentiment event studies over firms and their supply-chain partners.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_bundle_flags(p):
        p.add_argument("--firms", help="firm registry CSV")
        p.add_argument("--prices", help="daily close prices CSV")
        p.add_argument("--indices", help="market index CSV")
        p.add_argument("--news", help="news sentiment CSV")
        p.add_argument("--edges", help="supply-chain edge list CSV")
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--strict", action="store_true", help="fail on any rejected row")

    p_validate = sub.add_parser("validate", help="check every input file against its schema")
    add_bundle_flags(p_validate)
    p_validate.set_defaults(func=cmd_validate)

    p_run = sub.add_parser("run", help="build panels, fit every cell, write reports")
    add_bundle_flags(p_run)
    p_run.add_argument("--mode", help="comma list of own,supplier,client (default own)")
    p_run.add_argument("--polarity", help="comma list of positive,negative (default positive)")
    p_run.add_argument("--windows", type=_parse_windows, help="comma list of window days")
    p_run.add_argument("--out", help="output directory (default ./out)")
    p_run.add_argument("--robust-se", dest="robust_se", action="store_true",
                       help="HC1 covariance instead of homoskedastic")
    p_run.add_argument("--export-panel", dest="export_panel", action="store_true",
                       help="also write one panel CSV per cell")
    p_run.add_argument("--threads", type=int, help="worker cap for estimation cells")
    p_run.set_defaults(func=cmd_run)

    p_sim = sub.add_parser("simulate", help="emit a synthetic bundle with known effects")
    p_sim.add_argument("--config", help="key=value simulation parameters")
    p_sim.add_argument("--seed", type=int, help="override the config seed")
    p_sim.add_argument("--windows", type=_parse_windows, help="windows for the expected-beta sidecar")
    p_sim.add_argument("--out", help="output directory (default ./out)")
    p_sim.set_defaults(func=cmd_simulate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
