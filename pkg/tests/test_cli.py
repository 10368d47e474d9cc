from __future__ import annotations

from pathlib import Path

import pytest

from newsprop.cli import main
from newsprop.sim import SimConfig, simulate

BUNDLE_CONFIG = SimConfig(
    n_firms=40,
    n_sectors=5,
    n_markets=2,
    n_days=120,
    edge_prob=0.05,
    news_rate=6.0,
    gamma_pre=0.2,
    gamma_post=0.6,
    gamma_sup=0.05,
    seed=77,
)


@pytest.fixture(scope="module")
def bundle_dir(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("bundle")
    simulate(BUNDLE_CONFIG).write(outdir)
    return outdir


def bundle_flags(outdir) -> list[str]:
    return [
        "--firms", str(outdir / "firms.csv"),
        "--prices", str(outdir / "prices.csv"),
        "--indices", str(outdir / "indices.csv"),
        "--news", str(outdir / "news.csv"),
        "--edges", str(outdir / "edges.csv"),
    ]


def tree_bytes(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


class TestValidate:
    def test_clean_bundle_exits_zero(self, bundle_dir, capsys):
        assert main(["validate", *bundle_flags(bundle_dir)]) == 0
        out = capsys.readouterr().out
        assert "0 rejected" in out

    def test_bad_row_nonzero_only_in_strict(self, bundle_dir, tmp_path, capsys):
        news = tmp_path / "news.csv"
        news.write_text(
            "news_id,date,firm_id,p_pos,p_neu,p_neg\n"
            "n1,2016-02-01,F00001,0.5,0.3,0.2\n"
            "n2,2016-02-02,F00002,0.2,0.2,0.2\n",
            encoding="utf-8",
        )
        flags = bundle_flags(bundle_dir)
        flags[flags.index("--news") + 1] = str(news)
        assert main(["validate", *flags]) == 0
        assert "1 rejected" in capsys.readouterr().out
        assert main(["validate", *flags, "--strict"]) == 1

    def test_unreadable_path_fails(self, bundle_dir, capsys):
        flags = bundle_flags(bundle_dir)
        flags[flags.index("--prices") + 1] = str(bundle_dir / "missing.csv")
        assert main(["validate", *flags]) == 1


class TestRun:
    def test_default_grid_shapes(self, bundle_dir, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(
            [
                "run",
                *bundle_flags(bundle_dir),
                "--windows", "1,2,3",
                "--out", str(out),
            ]
        )
        assert code == 0
        fits = (out / "fits.csv").read_text(encoding="utf-8").splitlines()
        assert len(fits) == 1 + 3
        effects = (out / "effects.csv").read_text(encoding="utf-8").splitlines()
        assert len(effects) == 1 + 6
        assert (out / "table.txt").exists()

    def test_mode_polarity_product(self, bundle_dir, tmp_path):
        out = tmp_path / "out"
        code = main(
            [
                "run",
                *bundle_flags(bundle_dir),
                "--mode", "own,supplier",
                "--polarity", "positive,negative",
                "--windows", "1,2",
                "--out", str(out),
            ]
        )
        assert code == 0
        fits = (out / "fits.csv").read_text(encoding="utf-8").splitlines()
        assert len(fits) == 1 + 2 * 2 * 2

    def test_rerun_byte_identical(self, bundle_dir, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        args = ["run", *bundle_flags(bundle_dir), "--windows", "1,2", "--export-panel"]
        assert main([*args, "--out", str(out_a)]) == 0
        assert main([*args, "--out", str(out_b)]) == 0
        assert tree_bytes(out_a) == tree_bytes(out_b)

    def test_thread_count_does_not_change_output(self, bundle_dir, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        args = ["run", *bundle_flags(bundle_dir), "--windows", "1,2,3"]
        assert main([*args, "--out", str(out_a), "--threads", "1"]) == 0
        assert main([*args, "--out", str(out_b), "--threads", "8"]) == 0
        assert tree_bytes(out_a) == tree_bytes(out_b)

    def test_infeasible_window_fails_cell_and_exit(self, bundle_dir, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(
            ["run", *bundle_flags(bundle_dir), "--windows", "1,365", "--out", str(out)]
        )
        assert code == 1
        printed = capsys.readouterr().out
        assert "ERROR" in printed
        # the feasible cell still produced its artifacts
        fits = (out / "fits.csv").read_text(encoding="utf-8").splitlines()
        assert len(fits) == 2

    def test_config_file_with_flag_override(self, bundle_dir, tmp_path):
        config = tmp_path / "run.cfg"
        lines = ["# estimation inputs"]
        for key in ("firms", "prices", "indices", "news", "edges"):
            lines.append(f"{key} = {bundle_dir / (key + '.csv')}")
        lines += ["windows = 1,2", "out = " + str(tmp_path / "ignored")]
        config.write_text("\n".join(lines) + "\n", encoding="utf-8")
        out = tmp_path / "real"
        assert main(["run", "--config", str(config), "--out", str(out)]) == 0
        assert (out / "fits.csv").exists()
        assert not (tmp_path / "ignored").exists()


class TestSimulate:
    def test_simulate_emits_bundle_and_sidecar(self, tmp_path, capsys):
        config = tmp_path / "sim.cfg"
        config.write_text(
            "n_firms = 20\nn_days = 60\nnews_rate = 3\nseed = 5\n"
            "gamma_pre = 0.0\ngamma_post = 0.0\n",
            encoding="utf-8",
        )
        out = tmp_path / "out"
        assert main(["simulate", "--config", str(config), "--windows", "1,2", "--out", str(out)]) == 0
        for name in ("firms", "prices", "indices", "news", "edges"):
            assert (out / f"{name}.csv").exists()
        sidecar = (out / "expected_betas.csv").read_text(encoding="utf-8").splitlines()
        assert sidecar[0] == "mode,polarity,w,beta_pre,beta_post"
        assert len(sidecar) == 1 + 12
        # zero-effect config: sidecar of zeros
        assert all(row.endswith(",0,0") for row in sidecar[1:])

    def test_seed_flag_overrides_config(self, tmp_path):
        config = tmp_path / "sim.cfg"
        config.write_text("n_firms = 20\nn_days = 60\nnews_rate = 3\nseed = 5\n", encoding="utf-8")
        out_a, out_b, out_c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
        assert main(["simulate", "--config", str(config), "--out", str(out_a)]) == 0
        assert main(["simulate", "--config", str(config), "--out", str(out_b), "--seed", "5"]) == 0
        assert main(["simulate", "--config", str(config), "--out", str(out_c), "--seed", "6"]) == 0
        assert tree_bytes(out_a) == tree_bytes(out_b)
        assert tree_bytes(out_a) != tree_bytes(out_c)

    def test_invalid_config_nonzero_exit(self, tmp_path, capsys):
        config = tmp_path / "sim.cfg"
        config.write_text("n_firms = 20\nn_days = 2\n", encoding="utf-8")
        assert main(["simulate", "--config", str(config), "--out", str(tmp_path / "o")]) == 1

    def test_validate_accepts_simulated_bundle(self, tmp_path, capsys):
        config = tmp_path / "sim.cfg"
        config.write_text("n_firms = 25\nn_days = 80\nnews_rate = 4\nseed = 9\n", encoding="utf-8")
        out = tmp_path / "out"
        assert main(["simulate", "--config", str(config), "--out", str(out)]) == 0
        assert main(["validate", *bundle_flags(out), "--strict"]) == 0
