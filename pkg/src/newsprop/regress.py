"""Least-squares estimation with sector fixed effects absorbed.

The dependent variable is regressed on three columns, PRE x NEWS,
POST x NEWS, and the market control, after every variable has had its
sector-group mean subtracted (within transformation). Group demeaning is
numerically equivalent to including one dummy per sector; the equivalence is
exercised against a brute-force dummy-variable solver in the test suite. The
demeaned system is solved by QR decomposition; the raw normal-equation route
exists only as a test oracle.

Degrees of freedom are n_obs - n_sectors - 3. Sectors with a single
observation are absorbed exactly (their demeaned row is zero) and still count
in the correction. Standard errors are homoskedastic by default, with an
opt-in HC1 heteroskedasticity-robust covariance.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy import linalg, stats

from .errors import (
    CollinearError,
    DegenerateVarianceError,
    EmptyPanelError,
    InsufficientDataError,
)
from .market import PRE
from .panel import Observation, Panel

REGRESSOR_NAMES = ("pre_news", "post_news", "market_x")

FIT_HEADER = (
    "mode",
    "polarity",
    "w",
    "beta_pre",
    "se_pre",
    "beta_post",
    "se_post",
    "beta_x",
    "se_x",
    "diff",
    "diff_se",
    "diff_t",
    "diff_p",
    "n_obs",
)

# relative threshold on QR diagonals for declaring a column dependent
_RANK_RTOL = 1e-8


@dataclass(frozen=True)
class WithinDesign:
    """Sector-demeaned response and regressors, plus the group structure."""

    y: np.ndarray  # (n,)
    X: np.ndarray  # (n, 3) columns pre_news, post_news, market_x
    sector_codes: np.ndarray  # (n,) int group index
    sector_labels: list[str]
    group_means: np.ndarray  # (n_sectors, 4) means of y and the three regressors


@dataclass(frozen=True)
class FitResult:
    mode: str
    polarity: str
    w: int
    beta_pre: float
    beta_post: float
    beta_x: float
    se_pre: float
    se_post: float
    se_x: float
    cov_prepost: float
    n_obs: int
    dof: int
    diff: float
    diff_se: float
    diff_t: float
    diff_p: float


@dataclass(frozen=True)
class DiffTest:
    diff: float
    diff_se: float
    diff_t: float
    diff_p: float


def _observations(panel: Union[Panel, Sequence[Observation]]) -> Sequence[Observation]:
    return panel.observations if isinstance(panel, Panel) else panel


def within_transform(panel: Union[Panel, Sequence[Observation]]) -> WithinDesign:
    """Subtract sector-group means from the response and every regressor.

    Raises EmptyPanelError on an empty panel. Singleton sectors come out as
    all-zero rows; they are absorbed and counted in the dof correction by
    ``fit``.
    """
    obs = _observations(panel)
    if len(obs) == 0:
        raise EmptyPanelError("cannot transform an empty panel")
    y = np.array([o.y for o in obs], dtype=float)
    X = np.empty((len(obs), 3), dtype=float)
    for i, o in enumerate(obs):
        pre = o.period == PRE
        X[i, 0] = o.news_value if pre else 0.0
        X[i, 1] = 0.0 if pre else o.news_value
        X[i, 2] = o.market_x
    sectors = np.array([o.sector for o in obs])
    labels, codes = np.unique(sectors, return_inverse=True)
    n_groups = len(labels)
    counts = np.bincount(codes, minlength=n_groups).astype(float)
    stacked = np.column_stack([y, X])
    sums = np.zeros((n_groups, 4))
    np.add.at(sums, codes, stacked)
    means = sums / counts[:, None]
    demeaned = stacked - means[codes]
    return WithinDesign(
        y=demeaned[:, 0],
        X=demeaned[:, 1:],
        sector_codes=codes,
        sector_labels=[str(s) for s in labels],
        group_means=means,
    )


def _diff_fields(beta: np.ndarray, cov: np.ndarray, dof: int) -> DiffTest:
    diff = float(beta[1] - beta[0])
    var_diff = float(cov[0, 0] + cov[1, 1] - 2.0 * cov[0, 1])
    if var_diff < 0.0:
        if var_diff < -1e-12:
            raise DegenerateVarianceError(f"negative difference variance {var_diff:.3e}")
        var_diff = 0.0
    diff_se = var_diff**0.5
    if diff_se == 0.0:
        if diff != 0.0:
            raise DegenerateVarianceError("zero variance with nonzero difference")
        return DiffTest(diff=0.0, diff_se=0.0, diff_t=0.0, diff_p=1.0)
    diff_t = diff / diff_se
    diff_p = float(2.0 * stats.t.sf(abs(diff_t), dof))
    return DiffTest(diff=diff, diff_se=diff_se, diff_t=diff_t, diff_p=diff_p)


def fit(panel: Panel, robust: bool = False) -> FitResult:
    """Estimate the three-regressor model on the within-transformed panel.

    Parameters
    ----------
    panel : Panel
        Balanced pre/post observations carrying sector codes.
    robust : bool
        Use the HC1 heteroskedasticity-robust covariance instead of the
        homoskedastic sigma^2 (X'X)^-1 default.

    Returns
    -------
    FitResult
        Coefficients, standard errors, the pre/post coefficient covariance,
        and the difference test for beta_post - beta_pre.
    """
    design = within_transform(panel)
    n = len(design.y)
    n_sectors = len(design.sector_labels)
    dof = n - n_sectors - 3
    if dof <= 0:
        raise InsufficientDataError(
            f"{n} observations cannot support {n_sectors} absorbed sectors and 3 slopes"
        )

    X, y = design.X, design.y
    if not np.any(y):
        # a flat response is fit exactly by the zero solution even when the
        # design is degenerate (constant series yield both at once)
        zero = DiffTest(diff=0.0, diff_se=0.0, diff_t=0.0, diff_p=1.0)
        return FitResult(
            mode=panel.mode, polarity=panel.polarity, w=panel.w,
            beta_pre=0.0, beta_post=0.0, beta_x=0.0,
            se_pre=0.0, se_post=0.0, se_x=0.0, cov_prepost=0.0,
            n_obs=n, dof=dof,
            diff=zero.diff, diff_se=zero.diff_se, diff_t=zero.diff_t, diff_p=zero.diff_p,
        )
    col_norms = np.linalg.norm(X, axis=0)
    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    for j in range(3):
        if diag[j] <= _RANK_RTOL * max(col_norms[j], 1e-300):
            raise CollinearError(REGRESSOR_NAMES[j])

    beta = linalg.solve_triangular(R, Q.T @ y)
    resid = y - X @ beta
    rss = float(resid @ resid)
    r_inv = linalg.solve_triangular(R, np.eye(3))
    xtx_inv = r_inv @ r_inv.T
    if robust:
        meat = (X * resid[:, None] ** 2).T @ X
        cov = xtx_inv @ meat @ xtx_inv * (n / dof)
    else:
        cov = (rss / dof) * xtx_inv

    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    d = _diff_fields(beta, cov, dof)
    return FitResult(
        mode=panel.mode,
        polarity=panel.polarity,
        w=panel.w,
        beta_pre=float(beta[0]),
        beta_post=float(beta[1]),
        beta_x=float(beta[2]),
        se_pre=float(se[0]),
        se_post=float(se[1]),
        se_x=float(se[2]),
        cov_prepost=float(cov[0, 1]),
        n_obs=n,
        dof=dof,
        diff=d.diff,
        diff_se=d.diff_se,
        diff_t=d.diff_t,
        diff_p=d.diff_p,
    )


def diff_test(result: FitResult) -> DiffTest:
    """Net-disclosure test beta_post - beta_pre from a finished fit.

    diff_se comes from se_pre^2 + se_post^2 - 2 cov_prepost; the p value is
    the two-sided t tail with the fit's degrees of freedom.
    """
    beta = np.array([result.beta_pre, result.beta_post])
    cov = np.array(
        [
            [result.se_pre**2, result.cov_prepost],
            [result.cov_prepost, result.se_post**2],
        ]
    )
    return _diff_fields(beta, cov, result.dof)


def write_fits(results: Sequence[FitResult], path) -> None:
    """Export fit rows, one line per estimated cell."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(FIT_HEADER)
        for r in results:
            writer.writerow(
                [
                    r.mode,
                    r.polarity,
                    r.w,
                    format(r.beta_pre, ".12g"),
                    format(r.se_pre, ".12g"),
                    format(r.beta_post, ".12g"),
                    format(r.se_post, ".12g"),
                    format(r.beta_x, ".12g"),
                    format(r.se_x, ".12g"),
                    format(r.diff, ".12g"),
                    format(r.diff_se, ".12g"),
                    format(r.diff_t, ".12g"),
                    format(r.diff_p, ".12g"),
                    r.n_obs,
                ]
            )
