"""Discrete regression under fGN (E1), the equivalent Gaussian sequence model
(E3), the conditional-expectation interpolator, approximation-condition
diagnostics, spectral-cutoff rate experiments, and the separation
constructions showing where the discrete and continuous experiments part ways.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import ConsistencyError
from .fracnoise import fbm_cov, seed_sequence, simulate_fgn
from .nhbasis import (
    BasisTable,
    NonharmonicSeries,
    _jacobi_rule_full,
    antiderivative_values,
    build_basis_table,
    frame_ratio_samples,
    rkhs_norm_sq,
    synthesize,
)
from .toeplitz import MeanShiftPair, ToeplitzCov, kl_gaussian_shift

__all__ = [
    "RegressionFunction",
    "E1Sample",
    "E3Sample",
    "RiskReport",
    "SeparationReport",
    "simulate_e1",
    "simulate_e3",
    "estimate_cutoff",
    "sequence_kl",
    "sobolev_test_series",
    "cutoff_frequency",
    "rate_experiment",
    "weighted_mean_estimator",
    "interpolate_L",
    "condition_i_diagnostic",
    "condition_ii_residual",
    "separation_experiment",
    "separation_sweep",
    "sobolev_constraint_check",
    "fit_loglog_slope",
]

#: kl values below this are treated as identically zero when fitting decay
#: exponents (at H = 1/2 the separation pair aliases to the same grid values)
KL_ZERO_FLOOR = 1e-20


# --------------------------------------------------------------------------
# data types
# --------------------------------------------------------------------------


@dataclass
class RegressionFunction:
    """A regression function given as a vectorized callable on [0, 1] or as a
    nonharmonic coefficient series, with optional smoothness metadata."""

    fn: object | None = None
    series: NonharmonicSeries | None = None
    alpha: float | None = None
    C: float | None = None
    symmetric: bool = False

    def __post_init__(self):
        if (self.fn is None) == (self.series is None):
            raise ValueError("provide exactly one of fn or series")

    def values(self, t, table: BasisTable | None = None) -> np.ndarray:
        if self.fn is not None:
            return np.asarray(self.fn(np.asarray(t, dtype=float)), dtype=float)
        if table is None:
            raise ValueError("a BasisTable is required to evaluate a series-backed function")
        return synthesize(self.series, table, t)

    def check_symmetry(self, table: BasisTable | None = None, grid_size: int = 97) -> None:
        """Validate f = -f(1 - .) when the symmetric flag is set."""
        if not self.symmetric:
            return
        t = np.linspace(0.0, 1.0, grid_size)
        v = self.values(t, table)
        w = self.values(1.0 - t, table)
        resid = np.abs(v + w).max()
        if resid > 1e-10:
            raise ValueError(f"symmetry flag set but |f(t) + f(1-t)| reaches {resid:.3e}")


def _as_values(f, t, table=None) -> np.ndarray:
    if isinstance(f, RegressionFunction):
        return f.values(t, table)
    return np.asarray(f(np.asarray(t, dtype=float)), dtype=float)


@dataclass(frozen=True)
class E1Sample:
    """One draw of the discrete regression experiment Y_i = f(i/n) + fGN_i."""

    H: float
    n: int
    seed: object
    y: np.ndarray = field(repr=False)

    @property
    def design(self) -> np.ndarray:
        return np.arange(1, self.n + 1) / self.n


@dataclass(frozen=True)
class E3Sample:
    """One draw of the sequence model: Z_k (k = 0..K) and Z'_k (k = 1..K)."""

    H: float
    n: int
    K: int
    seed: object
    z: np.ndarray = field(repr=False)
    z_prime: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class RiskReport:
    """Monte Carlo risk sweep of the spectral-cutoff estimator."""

    H: float
    beta: float
    C: float
    n_grid: np.ndarray
    cutoffs: np.ndarray
    risks: np.ndarray
    stderrs: np.ndarray
    slope: float
    slope_se: float
    theoretical_slope: float
    replicates: int
    seed: object
    frame_lower: float
    frame_upper: float


@dataclass(frozen=True)
class SeparationReport:
    """Exact discrete KL vs sequence-model KL for one separation pair."""

    case: str
    H: float
    n: int
    c: float
    kl_e1: float
    e3_separation: float


# --------------------------------------------------------------------------
# simulation
# --------------------------------------------------------------------------


def simulate_e1(f, H: float, n: int, seed, table: BasisTable | None = None) -> E1Sample:
    """f(i/n) + exact fGN draw, i = 1..n; deterministic in the seed."""
    design = np.arange(1, n + 1) / n
    mean = _as_values(f, design, table)
    if mean.shape != (n,):
        raise ValueError("regression function must evaluate pointwise on the design")
    y = mean + simulate_fgn(H, n, seed)
    return E1Sample(H=float(H), n=int(n), seed=seed, y=y)


def simulate_e3(theta: NonharmonicSeries, table: BasisTable, n: int, seed) -> E3Sample:
    """Exact sequence-model draw

        Z_k  = Re(theta_k)/sigma_k + n^{H-1} eps_k,   k = 0..K,
        Z'_k = Im(theta_k)/sigma_k + n^{H-1} eps'_k,  k = 1..K,

    with eps and eps' drawn from two independent streams split off the seed.
    """
    if theta.K > table.K:
        raise ValueError("series truncation exceeds table K")
    K = theta.K
    H = table.H
    ss = seed_sequence(seed)
    stream_z, stream_zp = [np.random.default_rng(s) for s in ss.spawn(2)]
    sigma = table.sigma[: K + 1]
    noise = float(n) ** (H - 1.0)
    tpos = theta.theta[K:]
    z = tpos.real / sigma + noise * stream_z.standard_normal(K + 1)
    z_prime = tpos[1:].imag / sigma[1:] + noise * stream_zp.standard_normal(K)
    return E3Sample(H=H, n=int(n), K=K, seed=seed, z=z, z_prime=z_prime)


def estimate_cutoff(sample: E3Sample, table: BasisTable, M: int) -> NonharmonicSeries:
    """Spectral-cutoff estimator: theta_hat_k = sigma_k (Z_k + i Z'_k) for
    0 <= k <= M (Z'_0 = 0), conjugate-mirrored, zero beyond M."""
    if M > sample.K:
        raise ValueError("cutoff M must be <= sample K")
    theta_pos = np.zeros(sample.K + 1, dtype=complex)
    sigma = table.sigma[: sample.K + 1]
    theta_pos[0] = sigma[0] * sample.z[0]
    if M >= 1:
        theta_pos[1 : M + 1] = sigma[1 : M + 1] * (sample.z[1 : M + 1] + 1j * sample.z_prime[:M])
    return NonharmonicSeries.from_positive(theta_pos)


def sequence_kl(a: NonharmonicSeries, b: NonharmonicSeries, table: BasisTable, n: int) -> float:
    """KL divergence between the E3 laws of two coefficient series, computed
    from the sigma_k column:

        (1/2) n^{2-2H} [ (Re d_0 / sigma_0)^2
                         + sum_{k>=1} ((Re d_k)^2 + (Im d_k)^2) / sigma_k^2 ].

    Equals the RKHS-based KL; the identity is one of the package's
    cross-representation checks.
    """
    diff = a - b
    if diff.K > table.K:
        raise ValueError("series truncation exceeds table K")
    d = diff.theta[diff.K :]
    sigma = table.sigma[: diff.K + 1]
    total = (d[0].real / sigma[0]) ** 2
    if diff.K >= 1:
        total += float(np.sum((d[1:].real**2 + d[1:].imag**2) / sigma[1:] ** 2))
    return 0.5 * float(n) ** (2.0 - 2.0 * table.H) * total


# --------------------------------------------------------------------------
# rate experiment
# --------------------------------------------------------------------------


def sobolev_test_series(beta: float, C: float, K: int, seed) -> NonharmonicSeries:
    """Deterministic test function on the Sobolev sphere of radius C:
    |theta_k| proportional to (1 + |k|)^{-beta - 1/2 - 0.01} with seeded
    random signs, rescaled so sum (1+|k|)^{2 beta} |theta_k|^2 = C^2."""
    rng = np.random.default_rng(seed_sequence(seed))
    k = np.arange(K + 1, dtype=float)
    profile = (1.0 + k) ** (-beta - 0.51)
    signs = rng.choice([-1.0, 1.0], size=K + 1)
    series = NonharmonicSeries.from_positive(signs * profile)
    return series.scaled(C / math.sqrt(series.sobolev_norm_sq(beta)))


def cutoff_frequency(n: int, H: float, beta: float, cutoff_const: float = 1.0) -> int:
    """M_n = ceil(c0 * n^{(1-H)/(beta+1-H)}), balancing squared bias M^{-2 beta}
    against noise variance n^{2H-2} M^{2-2H}."""
    return int(math.ceil(cutoff_const * float(n) ** ((1.0 - H) / (beta + 1.0 - H))))


def fit_loglog_slope(x, y) -> tuple[float, float]:
    """OLS slope of log y on log x with its standard error."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    lx_c = lx - lx.mean()
    sxx = float(lx_c @ lx_c)
    slope = float(lx_c @ ly) / sxx
    resid = ly - ly.mean() - slope * lx_c
    dof = max(lx.size - 2, 1)
    return slope, math.sqrt(float(resid @ resid) / dof / sxx)


def rate_experiment(
    H: float,
    beta: float,
    C: float,
    n_grid,
    replicates: int,
    seed: int,
    cutoff_const: float = 1.0,
    K: int | None = None,
    jobs: int = 1,
    frame_draws: int = 8,
) -> RiskReport:
    """Monte Carlo risk of the spectral-cutoff estimator over a grid of sample
    sizes, with the fitted log-log slope.

    Risk is coefficient-space l2, sum_k |theta_hat_k - theta_k|^2, which is
    equivalent to squared L2 risk up to the Riesz frame constants (estimated
    and reported alongside).  Replicate r at grid position i always uses the
    stream (seed, i, r), so results do not depend on the worker count.
    """
    n_grid = np.asarray(sorted(int(v) for v in np.atleast_1d(n_grid)))
    cutoffs = np.array([cutoff_frequency(n, H, beta, cutoff_const) for n in n_grid])
    if K is None:
        K = max(128, 8 * int(cutoffs.max()))
    if cutoffs.max() > K:
        raise ValueError("cutoff exceeds table truncation K")
    table = build_basis_table(H, K)
    theta = sobolev_test_series(beta, C, K, seed_sequence(seed, 0xF))

    risks = np.empty((n_grid.size, replicates))

    def one(task):
        i, r = task
        sample = simulate_e3(theta, table, int(n_grid[i]), seed_sequence(seed, i, r))
        est = estimate_cutoff(sample, table, int(cutoffs[i]))
        risks[i, r] = (est - theta).l2_coeff_norm_sq()

    tasks = [(i, r) for i in range(n_grid.size) for r in range(replicates)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(one, tasks))
    else:
        for task in tasks:
            one(task)

    mean = risks.mean(axis=1)
    stderr = risks.std(axis=1, ddof=1) / math.sqrt(replicates)
    slope, slope_se = fit_loglog_slope(n_grid, mean)
    ratios = frame_ratio_samples(table, n_draws=frame_draws, seed=seed)
    return RiskReport(
        H=float(H),
        beta=float(beta),
        C=float(C),
        n_grid=n_grid,
        cutoffs=cutoffs,
        risks=mean,
        stderrs=stderr,
        slope=slope,
        slope_se=slope_se,
        theoretical_slope=-2.0 * beta * (1.0 - H) / (beta + 1.0 - H),
        replicates=int(replicates),
        seed=seed,
        frame_lower=float(ratios.min()),
        frame_upper=float(ratios.max()),
    )


# --------------------------------------------------------------------------
# estimators and diagnostics on E1
# --------------------------------------------------------------------------


def weighted_mean_estimator(sample: E1Sample, table: BasisTable) -> float:
    """Weighted average with weights proportional to (i/n - (i/n)^2)^{1/2-H}
    over i = 1..n-1 (the i = n weight vanishes), normalized to sum 1.

    At H = 1/2 this is the plain average of the first n-1 observations; for
    H > 1/2 it loads the boundaries and attains the smaller asymptotic
    variance sigma_0^2 n^{2H-2}.
    """
    if abs(sample.H - table.H) > 1e-12:
        raise ValueError("sample and table Hurst indices differ")
    n = sample.n
    if n < 2:
        raise ValueError("n must be >= 2")
    x = np.arange(1, n) / n
    w = (x - x * x) ** (0.5 - table.H)
    w /= w.sum()
    return float(w @ sample.y[: n - 1])


def interpolate_L(H: float, n: int, x, t_grid) -> np.ndarray:
    """Conditional-expectation interpolator of fBM through (i/n, x_i):

        L(t | x) = (K(t, 1/n), ..., K(t, 1)) Cov(B^H_{i/n})^{-1} x.

    The design covariance is dense (not Toeplitz) and solved by Cholesky; a
    pivot ratio beyond 1e14 triggers an ill-conditioning warning.  L is
    linear in x and reproduces x at the design points.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"x must have shape ({n},)")
    design = np.arange(1, n + 1) / n
    cov = fbm_cov(H, design[:, None], design[None, :])
    factor = cho_factor(cov, lower=True)
    diag = np.diag(factor[0])
    ratio = (diag.max() / diag.min()) ** 2
    if ratio > 1e14:
        warnings.warn(
            f"fBM design covariance nearly singular (pivot ratio {ratio:.3e})",
            RuntimeWarning,
        )
    alpha = cho_solve(factor, x)
    t_arr = np.atleast_1d(np.asarray(t_grid, dtype=float))
    kmat = fbm_cov(H, t_arr[:, None], design[None, :])
    out = kmat @ alpha
    return out if np.ndim(t_grid) else float(out[0])


def condition_i_diagnostic(f, H: float, n: int, table: BasisTable | None = None) -> float:
    """Discretization diagnostic

        (n^{1-2H} v 1) * sum_i ( n int_{(i-1)/n}^{i/n} f - f(i/n) )^2

    for a single function; the cell averages use 16-point Gauss-Legendre."""
    xg, wg = np.polynomial.legendre.leggauss(16)
    i = np.arange(1, n + 1)
    centers = (i - 0.5) / n
    nodes = centers[:, None] + xg[None, :] / (2.0 * n)
    cell_means = _as_values(f, nodes, table) @ wg / 2.0
    diffs = cell_means - _as_values(f, i / n, table)
    return max(float(n) ** (1.0 - 2.0 * H), 1.0) * float(diffs @ diffs)


def condition_ii_residual(theta: NonharmonicSeries, table: BasisTable, n: int) -> float:
    """RKHS approximation diagnostic

        n^{1-H} * sqrt( ||F_f||_H^2 - F_n' C^{-1} F_n ),

    where C = [K(i/n, j/n)] and F_n = (F_f(l/n)).  The quadratic form is the
    squared norm of the projection of F_f onto span{K(., j/n)}, so the
    difference is the squared distance to that span; it is clamped at zero
    and anything below -1e-8 raises ConsistencyError (the two norm routes
    would be inconsistent).
    """
    norm_sq = rkhs_norm_sq(theta, table)
    design = np.arange(1, n + 1) / n
    f_n = antiderivative_values(theta, table, design)
    cov = fbm_cov(table.H, design[:, None], design[None, :])
    quad = float(f_n @ cho_solve(cho_factor(cov, lower=True), f_n))
    resid_sq = norm_sq - quad
    if resid_sq < -1e-8:
        raise ConsistencyError(
            f"projection norm exceeds the RKHS norm by {-resid_sq:.3e}; "
            "rkhs_norm_sq and the kernel matrix disagree"
        )
    return float(n) ** (1.0 - table.H) * math.sqrt(max(resid_sq, 0.0))


# --------------------------------------------------------------------------
# separation constructions
# --------------------------------------------------------------------------


def _sine_pair_series(K: int, k: int, amp: float, omega_k: float) -> NonharmonicSeries:
    """Coefficients of amp * sin(omega_k (2t - 1)): theta_{+-k} = -+ amp
    e^{-+ i omega_k} / (2i)."""
    theta_pos = np.zeros(K + 1, dtype=complex)
    theta_pos[k] = amp * np.exp(-1j * omega_k) / 2j
    return NonharmonicSeries.from_positive(theta_pos)


def separation_experiment(
    H: float,
    n: int,
    case: str,
    ball_radius: float = 1.0,
    table: BasisTable | None = None,
) -> SeparationReport:
    """Two regression functions that stay separated in the sequence model
    while their discrete-sample laws merge.

    case "alpha_half" (smoothness exactly 1/2):
        f0 = c n^{-1/2} sin(omega_n (2t-1)),  f1 = c n^{-1/2} sin(omega_{2n} (2t-1)).
    case "alpha_low" (smoothness below 1 - H), with k_n the smallest integer
    exceeding log n:
        f0 = 0,  f1 = c n^{H-1} k_n^{1/2-H}
                      [sin(omega_{k_n} (2t-1)) - sin(omega_{k_n+n} (2t-1))].

    The amplitude uses c = ball_radius / 2 so both functions sit inside the
    relevant Sobolev ball with margin.  Returns the exact discrete KL under
    fGN covariance and the sequence-model KL of the same pair.
    """
    if case not in ("alpha_half", "alpha_low"):
        raise ValueError(f"unknown case {case!r}")
    c = ball_radius / 2.0
    if case == "alpha_half":
        k_hi = 2 * n
    else:
        k_n = int(math.floor(math.log(n))) + 1
        k_hi = k_n + n
    if table is None:
        table = build_basis_table(H, k_hi)
    elif table.K < k_hi:
        raise ValueError(f"table must cover K >= {k_hi}")

    design = np.arange(1, n + 1) / n
    arg = 2.0 * design - 1.0
    if case == "alpha_half":
        amp = c / math.sqrt(n)
        om_a, om_b = table.omega(n), table.omega(2 * n)
        theta0 = _sine_pair_series(table.K, n, amp, om_a)
        theta1 = _sine_pair_series(table.K, 2 * n, amp, om_b)
        mean0 = amp * np.sin(om_a * arg)
        mean1 = amp * np.sin(om_b * arg)
    else:
        amp = c * float(n) ** (H - 1.0) * float(k_n) ** (0.5 - H)
        om_a, om_b = table.omega(k_n), table.omega(k_n + n)
        theta0 = NonharmonicSeries.zeros(table.K)
        theta1 = _sine_pair_series(table.K, k_n, amp, om_a) - _sine_pair_series(
            table.K, k_n + n, amp, om_b
        )
        mean0 = np.zeros(n)
        mean1 = amp * (np.sin(om_a * arg) - np.sin(om_b * arg))

    kl_e1 = kl_gaussian_shift(ToeplitzCov.fgn(H, n), MeanShiftPair(mean0, mean1))
    e3 = sequence_kl(theta0, theta1, table, n)
    return SeparationReport(case=case, H=float(H), n=int(n), c=c, kl_e1=kl_e1, e3_separation=e3)


def separation_sweep(
    H: float,
    n_values,
    case: str = "alpha_half",
    ball_radius: float = 1.0,
) -> tuple[list[SeparationReport], float | None]:
    """Run :func:`separation_experiment` over a grid of n, sharing one basis
    table, and fit the decay exponent of kl_e1.

    Returns (reports, exponent); the exponent is None when every kl_e1 sits
    below the numerical zero floor (exact aliasing, e.g. H = 1/2 in case
    "alpha_half", where both functions vanish on the grid).
    """
    ns = sorted(int(v) for v in np.atleast_1d(n_values))
    n_max = ns[-1]
    if case == "alpha_half":
        k_hi = 2 * n_max
    else:
        k_hi = int(math.floor(math.log(n_max))) + 1 + n_max
    table = build_basis_table(H, k_hi)
    reports = [separation_experiment(H, n, case, ball_radius, table) for n in ns]
    kls = np.array([r.kl_e1 for r in reports])
    if kls.max() < KL_ZERO_FLOOR:
        return reports, None
    exponent, _ = fit_loglog_slope(ns, np.maximum(kls, KL_ZERO_FLOOR))
    return reports, exponent


# --------------------------------------------------------------------------
# Sobolev constraint functionals
# --------------------------------------------------------------------------


def _fd_derivative(fn, order: int, step: float):
    """order-th derivative by iterated 6th-order central differences.  The
    stencil reaches order*3*step outside the evaluation point, so fn must be
    defined slightly beyond [0, 1]."""
    if order == 0:
        return fn
    inner = _fd_derivative(fn, order - 1, step)
    coeff = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0
    offsets = np.arange(-3, 4)

    def deriv(x):
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for c, o in zip(coeff, offsets):
            if c != 0.0:
                acc = acc + c * np.asarray(inner(x + o * step), dtype=float)
        return acc / step

    return deriv


def sobolev_constraint_check(
    f,
    H: float,
    beta: int,
    derivatives: list | None = None,
    n_nodes: int = 256,
    fd_step: float = 1e-3,
) -> np.ndarray:
    """The beta boundary functionals int_0^1 f^(l)(s) (s - s^2)^{1/2-H} ds,
    l = 1..beta; all vanish on the constrained Sobolev class.

    ``derivatives`` supplies the l-th derivatives analytically (preferred);
    otherwise iterated high-order finite differences of f are used, which
    requires f to be evaluable slightly outside [0, 1].
    """
    if beta < 1:
        raise ValueError("beta must be a positive integer")
    q = 0.5 - H
    u, wt = _jacobi_rule_full(n_nodes, q)
    out = np.empty(beta)
    for ell in range(1, beta + 1):
        if derivatives is not None:
            d = np.asarray(derivatives[ell - 1](u), dtype=float)
        else:
            d = _fd_derivative(f, ell, fd_step)(u)
        out[ell - 1] = float(wt @ d)
    return out
