"""Nonharmonic Fourier calculus attached to fractional Brownian motion.

The frequencies are (twice) the positive zeros omega_k of J_{1-H}; the machinery
implemented here follows the spectral decomposition of the fBM reproducing
kernel Hilbert space due to Dzhaparidze & van Zanten (Probab. Theory Related
Fields, 2005):

* constants ``c_H = sin(pi H) Gamma(2H+1)`` and the paired constant
  ``c'_H = Gamma(3/2-H) sqrt(c_H) / (1 + (sqrt(2-2H)-1) delta_{k0})``;
* sampling coefficients ``a_k`` and noise scalings ``sigma_k`` (``sigma_0 =
  a_0``, ``sigma_k = a_k / sqrt(2)``);
* the L2(mu)-orthonormal functions ``phi_k`` (mu(dl) = c_H/(2 pi)
  |l|^{1-2H} dl) and the biorthogonal time-domain family ``g_k``;
* analysis/synthesis of f = sum_k theta_k exp(2 i omega_k t) on [0, 1], the
  RKHS norm ``sum_k |theta_k|^2 / a_k^2``, and the kernel Parseval sum.

Sign convention: the derivative J'_{1-H}(omega_k) alternates in sign, so the
raw sampling coefficients do too.  Tables store ``a_k = |a_k| > 0`` (they act
as noise scalings downstream) together with the sign ``s_k``; ``phi_k`` is
normalized so that ``phi_k(2 omega_k) = +1/a_k``, while ``g_k`` is kept
exactly as its defining integral.  Identities that pair ``g_k`` with ``a_k``
(coefficient extraction, biorthogonality) therefore use the signed value
``s_k a_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import QuadratureError, SymmetryError
from .specfun import ZeroTable, bessel_j, bessel_j_prime, bessel_zeros, gamma_fn

__all__ = [
    "HurstConfig",
    "BasisTable",
    "NonharmonicSeries",
    "RkhsElement",
    "build_basis_table",
    "phi_k",
    "g_k_eval",
    "biorth_matrix",
    "analyze",
    "synthesize",
    "antiderivative_values",
    "rkhs_norm_sq",
    "kernel_parseval_check",
    "kernel_parseval_grid",
    "parseval_tail_bound",
    "kl_rkhs",
    "frame_ratio_samples",
]

#: default Gauss-Jacobi node count for the (u - u^2)^{1/2-H} weight
DEFAULT_QUAD_NODES = 256

#: |Im f| threshold accepted when synthesizing a conjugate-symmetric series
SYNTHESIS_IMAG_TOL = 1e-10


# --------------------------------------------------------------------------
# constants
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HurstConfig:
    """Hurst index with its derived spectral constants."""

    H: float
    c_H: float = field(init=False)
    c_H_prime_0: float = field(init=False)
    c_H_prime_k: float = field(init=False)

    def __post_init__(self):
        H = float(self.H)
        if not (0.0 < H < 1.0):
            raise ValueError(f"Hurst index must lie in (0, 1), got {H}")
        c_h = math.sin(math.pi * H) * gamma_fn(2.0 * H + 1.0)
        base = gamma_fn(1.5 - H) * math.sqrt(c_h)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "c_H", c_h)
        object.__setattr__(self, "c_H_prime_k", base)
        object.__setattr__(self, "c_H_prime_0", base / math.sqrt(2.0 - 2.0 * H))

    def c_prime(self, k) -> float | np.ndarray:
        k_arr = np.asarray(k)
        out = np.where(k_arr == 0, self.c_H_prime_0, self.c_H_prime_k)
        return float(out) if k_arr.ndim == 0 else out

    def identity_residual(self) -> float:
        """Relative residual of the duplication/reflection identity

        c_H / (2 pi) = 2^{4H-3} H G(H+1/2) G(3-2H) / ((1-H) G(1-H)^2 G(3/2-H)).
        """
        H = self.H
        lhs = self.c_H / (2.0 * math.pi)
        rhs = (
            2.0 ** (4.0 * H - 3.0)
            * H
            * gamma_fn(H + 0.5)
            * gamma_fn(3.0 - 2.0 * H)
            / ((1.0 - H) * gamma_fn(1.0 - H) ** 2 * gamma_fn(1.5 - H))
        )
        return abs(lhs - rhs) / abs(rhs)


# --------------------------------------------------------------------------
# coefficient series
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class NonharmonicSeries:
    """Coefficients theta_k, -K <= k <= K, of f = sum theta_k e^{2 i omega_k t}.

    Conjugate symmetry theta_{-k} = conj(theta_k) is enforced on construction
    by averaging theta_k with conj(theta_{-k}); it makes the synthesized
    function real-valued.  Stored as a flat complex array with index
    ``j = k + K``.
    """

    K: int
    theta: np.ndarray = field(repr=False)

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=complex)
        if th.shape != (2 * self.K + 1,):
            raise ValueError(f"theta must have shape ({2 * self.K + 1},)")
        th = 0.5 * (th + np.conj(th[::-1]))
        th.flags.writeable = False
        object.__setattr__(self, "theta", th)

    @classmethod
    def zeros(cls, K: int) -> "NonharmonicSeries":
        return cls(K, np.zeros(2 * K + 1, dtype=complex))

    @classmethod
    def from_positive(cls, theta_pos) -> "NonharmonicSeries":
        """Build from theta_k for k = 0..K; theta_0 must be (numerically) real."""
        tp = np.asarray(theta_pos, dtype=complex)
        if tp.ndim != 1 or tp.size == 0:
            raise ValueError("theta_pos must be a nonempty 1-D array")
        if abs(tp[0].imag) > 1e-12 * max(1.0, abs(tp[0])):
            raise ValueError("theta_0 must be real for a conjugate-symmetric series")
        K = tp.size - 1
        full = np.concatenate([np.conj(tp[:0:-1]), [tp[0].real], tp[1:]])
        return cls(K, full)

    def coeff(self, k) -> complex | np.ndarray:
        k_arr = np.asarray(k)
        out = self.theta[np.atleast_1d(k_arr).astype(int) + self.K]
        return complex(out[0]) if k_arr.ndim == 0 else out

    def padded(self, K: int) -> "NonharmonicSeries":
        if K < self.K:
            raise ValueError("can only pad to a larger K")
        if K == self.K:
            return self
        pad = K - self.K
        return NonharmonicSeries(K, np.pad(self.theta, (pad, pad)))

    def _binary(self, other: "NonharmonicSeries", sign: float) -> "NonharmonicSeries":
        K = max(self.K, other.K)
        return NonharmonicSeries(K, self.padded(K).theta + sign * other.padded(K).theta)

    def __add__(self, other):
        return self._binary(other, 1.0)

    def __sub__(self, other):
        return self._binary(other, -1.0)

    def scaled(self, c: float) -> "NonharmonicSeries":
        return NonharmonicSeries(self.K, c * self.theta)

    def sobolev_norm_sq(self, alpha: float) -> float:
        """sum_k (1 + |k|)^{2 alpha} |theta_k|^2 (caller supplies the exponent)."""
        k = np.arange(-self.K, self.K + 1)
        return float(np.sum((1.0 + np.abs(k)) ** (2.0 * alpha) * np.abs(self.theta) ** 2))

    def in_sobolev_ball(self, alpha: float, C: float) -> bool:
        return self.sobolev_norm_sq(alpha) <= C * C

    def l2_coeff_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.theta) ** 2))


@dataclass(frozen=True)
class RkhsElement:
    """Element F(t) = sum_k theta_k * conj(F_indicator(t; 2 omega_k)) of the
    fBM RKHS, represented by its nonharmonic coefficients."""

    series: NonharmonicSeries

    def values(self, table: "BasisTable", t) -> np.ndarray:
        return antiderivative_values(self.series, table, t)


def _as_series(obj) -> NonharmonicSeries:
    return obj.series if isinstance(obj, RkhsElement) else obj


# --------------------------------------------------------------------------
# basis table
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BasisTable:
    """Frequencies omega_k, coefficients a_k (> 0, with signs held separately)
    and noise scalings sigma_k for |k| <= K."""

    config: HurstConfig
    K: int
    zeros: ZeroTable
    a: np.ndarray = field(repr=False)
    sign: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)

    @property
    def H(self) -> float:
        return self.config.H

    def omega(self, k):
        return self.zeros.omega(k)

    def a_abs(self, k):
        """|a_k| (stored value), defined for any |k| <= K since a_{-k} = a_k."""
        k_arr = np.asarray(k)
        out = self.a[np.abs(np.atleast_1d(k_arr)).astype(int)]
        return float(out[0]) if k_arr.ndim == 0 else out

    def a_signed(self, k):
        """s_k a_k, the raw sampling coefficient of the underlying expansion."""
        k_arr = np.asarray(k)
        idx = np.abs(np.atleast_1d(k_arr)).astype(int)
        out = self.sign[idx] * self.a[idx]
        return float(out[0]) if k_arr.ndim == 0 else out

    def sigma_at(self, k):
        k_arr = np.asarray(k)
        out = self.sigma[np.abs(np.atleast_1d(k_arr)).astype(int)]
        return float(out[0]) if k_arr.ndim == 0 else out

    def with_perturbed_a(self, eps: float) -> "BasisTable":
        """Test-only fault injection: multiply the stored a_k by (1 + eps),
        leaving sigma_k at the unperturbed values.  Downstream consistency
        checks that pair the two columns must then fail."""
        a = self.a * (1.0 + eps)
        a.flags.writeable = False
        return replace(self, a=a)


def build_basis_table(H: float, K: int, root_tol: float = 1e-12) -> BasisTable:
    """Zeros omega_k, coefficients a_k and scalings sigma_k for |k| <= K.

    a_0^{-1} = sqrt(pi/c_H) sqrt(1-H) 2^{2H-3/2} / Gamma(2-H) and, for k >= 1,
    a_k^{-1} = sqrt(pi/c_H) 2^{H-1} omega_k^H J'_{1-H}(omega_k); the stored
    a_k is the absolute value, the sign of J' is kept in ``sign``.
    sigma_0 = a_0 and sigma_k = a_k / sqrt(2).
    """
    config = HurstConfig(H)
    if K < 1:
        raise ValueError("K must be >= 1")
    zeros = bessel_zeros(H, K, root_tol=root_tol)
    pref = math.sqrt(math.pi / config.c_H)
    a0_inv = pref * math.sqrt(1.0 - H) * 2.0 ** (2.0 * H - 1.5) / gamma_fn(2.0 - H)
    jp = bessel_j_prime(1.0 - H, zeros.omegas)
    raw_inv = pref * 2.0 ** (H - 1.0) * zeros.omegas**H * jp
    if np.any(raw_inv == 0.0):
        raise QuadratureError("vanishing J'_{1-H}(omega_k); zero table is inconsistent")
    a = np.empty(K + 1)
    sign = np.empty(K + 1)
    a[0] = 1.0 / a0_inv
    sign[0] = 1.0
    a[1:] = 1.0 / np.abs(raw_inv)
    sign[1:] = np.sign(raw_inv)
    sigma = a / math.sqrt(2.0)
    sigma[0] = a[0]
    for arr in (a, sign, sigma):
        arr.flags.writeable = False
    return BasisTable(config=config, K=K, zeros=zeros, a=a, sign=sign, sigma=sigma)


# --------------------------------------------------------------------------
# phi_k and g_k
# --------------------------------------------------------------------------

# switch to the Taylor form of N(l)/(l - omega_k) inside this window
_SINGULARITY_WINDOW = 1e-4


def _n_odd(H: float, lam: np.ndarray) -> np.ndarray:
    """Odd extension of lambda^H J_{1-H}(lambda) to the real line."""
    s = np.sign(lam)
    x = np.abs(lam)
    return s * x**H * bessel_j(1.0 - H, x)


def phi_k(table: BasisTable, k: int, two_lambda) -> complex | np.ndarray:
    """Orthonormal basis function phi_k evaluated at the point ``two_lambda``.

    phi_k(2 l) = s_k sqrt(pi/c_H) 2^{H-1} (1 + (sqrt(2-2H)-1) delta_{k0})
                 e^{i (omega_k - l)} l^H J_{1-H}(l) / (l - omega_k),

    with the removable singularity at l = omega_k filled by its limit, so
    phi_k(2 omega_k) = 1 / a_k, and negative l handled through the odd
    extension of l^H J_{1-H}(l).
    """
    if abs(k) > table.K:
        raise IndexError(f"|k| must be <= K = {table.K}")
    H = table.H
    lam = 0.5 * np.asarray(two_lambda, dtype=float)
    scalar = lam.ndim == 0
    lam = np.atleast_1d(lam)
    om = table.omega(k)

    kappa = math.sqrt(math.pi / table.config.c_H) * 2.0 ** (H - 1.0)
    if k == 0:
        kappa *= math.sqrt(2.0 - 2.0 * H)
    s_k = 1.0 if k == 0 else float(table.sign[abs(k)])

    ratio = np.empty(lam.shape)
    near = np.abs(lam - om) < _SINGULARITY_WINDOW
    far = ~near
    if np.any(far):
        ratio[far] = _n_odd(H, lam[far]) / (lam[far] - om)
    if np.any(near):
        if k == 0:
            # N(l)/l = 2^{H-1} sum_m (-1)^m (l/2)^{2m} / (m! Gamma(m+2-H))
            x = lam[near]
            q = 0.25 * x * x
            ratio[near] = 2.0 ** (H - 1.0) * (
                1.0 / gamma_fn(2.0 - H) - q / gamma_fn(3.0 - H) + q * q / (2.0 * gamma_fn(4.0 - H))
            )
        else:
            # Taylor about the zero: N'(om) + (l-om) N''(om)/2 with
            # N'(om) = om^H J'(om), N''(om) = (2H-1) om^{H-1} J'(om)
            jp = bessel_j_prime(1.0 - H, abs(om))
            if om < 0:
                # N is odd, so N' is even and N'' is odd
                n1 = abs(om) ** H * jp
                n2 = -(2.0 * H - 1.0) * abs(om) ** (H - 1.0) * jp
            else:
                n1 = om**H * jp
                n2 = (2.0 * H - 1.0) * om ** (H - 1.0) * jp
            ratio[near] = n1 + 0.5 * (lam[near] - om) * n2
    out = s_k * kappa * np.exp(1j * (om - lam)) * ratio
    return complex(out[0]) if scalar else out


@lru_cache(maxsize=32)
def _jacobi_rule_full(n: int, q: float):
    """Nodes/weights with the weight built in: int_0^1 u^q (1-u)^q f(u) du."""
    x, w = roots_jacobi(n, q, q)
    return 0.5 * (x + 1.0), w * 2.0 ** (-2.0 * q - 1.0)


@lru_cache(maxsize=32)
def _jacobi_rule_left(n: int, q: float):
    """Nodes/weights for int_0^1 v^q h(v) dv (singularity at 0 only)."""
    x, w = roots_jacobi(n, 0.0, q)
    return 0.5 * (x + 1.0), w * 2.0 ** (-q - 1.0)


def g_k_eval(table: BasisTable, k: int, s, n_nodes: int = DEFAULT_QUAD_NODES):
    """g_k(s) on (0, 1) in the differentiated form

        g_k(s) = (s - s^2)^{1/2-H}
                 + 2 i omega_k e^{2 i omega_k s} int_0^s e^{-2 i omega_k u}
                   (u - u^2)^{1/2-H} du.

    The incomplete integral maps onto [0, 1] and uses a Gauss-Jacobi rule
    carrying the u^{1/2-H} endpoint factor, so it keeps full accuracy for
    H > 1/2 where the integrand is singular at u = 0.
    """
    if abs(k) > table.K:
        raise IndexError(f"|k| must be <= K = {table.K}")
    H = table.H
    q = 0.5 - H
    s_arr = np.asarray(s, dtype=float)
    scalar = s_arr.ndim == 0
    s_arr = np.atleast_1d(s_arr)
    if np.any(s_arr <= 0.0) or np.any(s_arr >= 1.0):
        raise ValueError("g_k is defined on the open interval (0, 1)")
    om = table.omega(k)
    w_s = (s_arr - s_arr**2) ** q
    if k == 0:
        out = w_s.astype(complex)
    else:
        v, wt = _jacobi_rule_left(n_nodes, q)
        u = s_arr[:, None] * v[None, :]
        integrand = (1.0 - u) ** q * np.exp(-2j * om * u)
        partial = s_arr ** (1.0 + q) * (integrand @ wt)
        out = w_s + 2j * om * np.exp(2j * om * s_arr) * partial
    return complex(out[0]) if scalar else out


def biorth_matrix(table: BasisTable, kmax: int, n_nodes: int = DEFAULT_QUAD_NODES) -> np.ndarray:
    """Gram matrix M[k, l] = <s_k a_k e^{i omega_k} g_k / c'_H, e^{2 i omega_l .}>
    over k, l in {-kmax, ..., kmax}; biorthogonality makes this the identity.

    The s-integration of the double integral hiding in g_k is carried out in
    closed form, which reduces every entry to the two Gauss-Jacobi sums
    f1(omega) = int w(u) e^{-2 i omega u} du and f2(omega) = int w(u) u
    e^{-2 i omega u} du evaluated at the 2*kmax+1 table frequencies.
    """
    if kmax > table.K:
        raise ValueError("kmax must be <= table K")
    q = 0.5 - table.H
    idx = np.arange(-kmax, kmax + 1)
    om = table.omega(idx)
    u, wt = _jacobi_rule_full(n_nodes, q)
    ph = np.exp(-2j * np.outer(om, u))
    f1 = ph @ wt
    f2 = ph @ (wt * u)

    delta = om[:, None] - om[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        t_off = (np.exp(2j * delta) * f1[:, None] - f1[None, :]) / (2j * delta)
    t_diag = f1 - f2
    eye = np.eye(idx.size, dtype=bool)
    t = np.where(eye, t_diag[:, None], t_off)

    gram = f1[None, :] + 2j * om[:, None] * t
    coef = table.a_signed(idx) * np.exp(1j * om) / table.config.c_prime(idx)
    return coef[:, None] * gram


# --------------------------------------------------------------------------
# analysis / synthesis
# --------------------------------------------------------------------------


def _analyze_once(f, table: BasisTable, kmax: int, n_nodes: int, n_inner: int) -> np.ndarray:
    q = 0.5 - table.H
    u, wt = _jacobi_rule_full(n_nodes, q)
    j1 = float(wt @ np.asarray(f(u), dtype=float))

    xg, wg = np.polynomial.legendre.leggauss(n_inner)
    span = 1.0 - u
    nodes = u[:, None] + span[:, None] * 0.5 * (xg[None, :] + 1.0)
    weights = span[:, None] * 0.5 * wg[None, :]
    fvals = weights * np.asarray(f(nodes), dtype=float)

    theta_pos = np.empty(kmax + 1, dtype=complex)
    for k in range(kmax + 1):
        om = table.omega(k)
        if k == 0:
            inner = j1
        else:
            g_tail = (fvals * np.exp(-2j * om * nodes)).sum(axis=1)
            j2 = wt @ (np.exp(2j * om * u) * g_tail)
            inner = j1 - 2j * om * j2
        coef = table.a_signed(k) * np.exp(-1j * om) / table.config.c_prime(k)
        theta_pos[k] = coef * inner
    return theta_pos


def analyze(
    f,
    table: BasisTable,
    kmax: int | None = None,
    n_nodes: int = DEFAULT_QUAD_NODES,
    n_inner: int | None = None,
    check_tol: float | None = 1e-6,
) -> NonharmonicSeries:
    """Coefficients theta_k = (s_k a_k e^{-i omega_k} / c'_H) <f, g_k>_{L2[0,1]}.

    Parameters
    ----------
    f : callable
        Real-valued, square-integrable on [0, 1]; must accept ndarray input.
    kmax : int, optional
        Truncation (defaults to the table's K).
    n_nodes, n_inner : int
        Outer Gauss-Jacobi rule (weight (u - u^2)^{1/2-H}) and inner
        Gauss-Legendre panel for the tail integrals of g_k.
    check_tol : float or None
        When set, the rule is re-run at twice the resolution and any
        coefficient moving by more than this raises QuadratureError naming
        the offending k.

    Conjugate symmetry is enforced exactly: for real f the negative-k
    coefficients are the conjugates of the positive ones, so averaging
    theta_k with conj(theta_{-k}) amounts to mirroring the k >= 0 values.
    """
    kmax = table.K if kmax is None else kmax
    if kmax > table.K:
        raise ValueError("kmax must be <= table K")
    if n_inner is None:
        n_inner = max(96, 4 * kmax)
    theta = _analyze_once(f, table, kmax, n_nodes, n_inner)
    if check_tol is not None:
        fine = _analyze_once(f, table, kmax, 2 * n_nodes, 2 * n_inner)
        err = np.abs(fine - theta)
        if np.any(err > check_tol):
            bad = np.nonzero(err > check_tol)[0]
            raise QuadratureError(
                f"analysis quadrature not converged at k = {bad.tolist()} "
                f"(max change {err.max():.3e} > {check_tol:g})"
            )
        theta = fine
    theta[0] = theta[0].real
    return NonharmonicSeries.from_positive(theta)


def synthesize(series: NonharmonicSeries, table: BasisTable, t) -> np.ndarray:
    """Pointwise f(t) = sum_{|k| <= K} theta_k e^{2 i omega_k t}.

    The conjugate-symmetric coefficients make f real; an imaginary residue
    above 1e-10 raises SymmetryError, otherwise it is discarded.
    """
    if series.K > table.K:
        raise ValueError("series truncation exceeds table K")
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    om = table.omega(np.arange(-series.K, series.K + 1))
    vals = np.exp(2j * np.outer(t_arr, om)) @ series.theta
    resid = np.abs(vals.imag).max() if vals.size else 0.0
    if resid > SYNTHESIS_IMAG_TOL:
        raise SymmetryError(f"imaginary residue {resid:.3e} exceeds {SYNTHESIS_IMAG_TOL:g}")
    out = vals.real
    return float(out[0]) if scalar else out


def antiderivative_values(series: NonharmonicSeries, table: BasisTable, t) -> np.ndarray:
    """F(t) = int_0^t f, evaluated in closed form from the coefficients:
    theta_0 t + sum_{k != 0} theta_k (e^{2 i omega_k t} - 1) / (2 i omega_k)."""
    if series.K > table.K:
        raise ValueError("series truncation exceeds table K")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    k = np.arange(-series.K, series.K + 1)
    om = table.omega(k)
    out = series.coeff(0).real * t_arr
    nz = k != 0
    if np.any(nz):
        phase = np.exp(2j * np.outer(t_arr, om[nz]))
        out = out + ((phase - 1.0) @ (series.theta[nz] / (2j * om[nz]))).real
    if np.ndim(t) == 0:
        return float(out[0])
    return out


def rkhs_norm_sq(elem, table: BasisTable) -> float:
    """Squared RKHS norm sum_{|k| <= K} |theta_k|^2 / a_k^2."""
    series = _as_series(elem)
    if series.K > table.K:
        raise ValueError("series truncation exceeds table K")
    k = np.arange(-series.K, series.K + 1)
    return float(np.sum(np.abs(series.theta) ** 2 / table.a_abs(k) ** 2))


def kl_rkhs(f, g, noise_level: float, table: BasisTable) -> float:
    """KL divergence (1/2) ||F_f - F_g||_H^2 / noise_level^2 between the
    shifted-path laws; the discrete regression model corresponds to
    noise_level = n^{H-1}."""
    if noise_level <= 0.0:
        raise ValueError("noise_level must be positive")
    diff = _as_series(f) - _as_series(g)
    return 0.5 * rkhs_norm_sq(diff, table) / noise_level**2


# --------------------------------------------------------------------------
# kernel Parseval sum
# --------------------------------------------------------------------------


def _indicator_transform(table: BasisTable, t: np.ndarray) -> np.ndarray:
    """F(indicator_[0,t))(2 omega_k) = (1 - e^{-2 i omega_k t}) / (2 i omega_k)
    for k = 1..K, as a (K, len(t)) array."""
    om = table.zeros.omegas
    return (1.0 - np.exp(-2j * np.outer(om, t))) / (2j * om[:, None])


def kernel_parseval_grid(table: BasisTable, s, t) -> np.ndarray:
    """Truncated Parseval reconstruction of the fBM kernel on a grid:

        a_0^2 s t + sum_{k=1}^{K} 2 a_k^2 Re[ F_s,k conj(F_t,k) ].

    Compare against fbm_cov; the truncation error is bounded by
    :func:`parseval_tail_bound`.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    fs = _indicator_transform(table, s_arr)
    ft = _indicator_transform(table, t_arr)
    a2 = table.a[1:] ** 2
    cross = np.einsum("ki,kj->ij", a2[:, None] * fs, np.conj(ft)).real
    return table.a[0] ** 2 * np.outer(s_arr, t_arr) + 2.0 * cross


def kernel_parseval_check(table: BasisTable, s: float, t: float) -> float:
    """Scalar version of :func:`kernel_parseval_grid`."""
    return float(kernel_parseval_grid(table, [float(s)], [float(t)])[0, 0])


def parseval_tail_bound(table: BasisTable) -> float:
    """Bound on the kernel sum truncation: each dropped +/-k pair contributes
    at most 2 a_k^2 / omega_k^2 <= 2 cbar^2 (1+k)^{1-2H} / ((k - 1/4)^2 pi^2),
    with cbar the largest a_k (1+k)^{H-1/2} observed in the table."""
    H = table.H
    k = np.arange(table.K + 1)
    cbar = float(np.max(table.a * (1.0 + k) ** (H - 0.5)))
    ks = np.arange(table.K + 1, table.K + 200001, dtype=float)
    head = np.sum((1.0 + ks) ** (1.0 - 2.0 * H) / (ks - 0.25) ** 2)
    x0 = table.K + 200000.5
    remainder = 1.01 * x0 ** (-2.0 * H) / (2.0 * H)
    return 2.0 * cbar**2 / math.pi**2 * (head + remainder)


# --------------------------------------------------------------------------
# empirical Riesz frame ratios
# --------------------------------------------------------------------------


def frame_ratio_samples(
    table: BasisTable,
    n_draws: int = 20,
    seed: int = 0,
    kmax: int | None = None,
    grid_size: int = 16384,
) -> np.ndarray:
    """Ratios ||sum theta_k e^{2 i omega_k .}||_{L2[0,1]}^2 / sum |theta_k|^2
    for random conjugate-symmetric coefficient draws.

    The extremes over draws estimate the Riesz frame bounds; at H = 1/2 both
    are 1 (orthonormal case).
    """
    from scipy.integrate import simpson

    kmax = min(table.K, 50) if kmax is None else kmax
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    tgrid = np.linspace(0.0, 1.0, grid_size + 1)
    ratios = np.empty(n_draws)
    for i in range(n_draws):
        tp = rng.standard_normal(kmax + 1) + 1j * rng.standard_normal(kmax + 1)
        tp[0] = tp[0].real
        series = NonharmonicSeries.from_positive(tp)
        f = synthesize(series, table, tgrid)
        ratios[i] = simpson(f * f, x=tgrid) / series.l2_coeff_norm_sq()
    return ratios
