"""Figure rendering for the CLI report path.

Every tabular command that writes a delimited file can drop a companion PNG
next to it.  Figures are derived from the same row dictionaries that go into
the CSV, so they never influence the delimited output.  matplotlib is
imported lazily with the Agg backend (batch use only).
"""

from __future__ import annotations

import math


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _col(rows, name):
    return [row[name] for row in rows]


def render_figure(command: str, rows: list[dict], params: dict, path) -> bool:
    """Render the figure for ``command`` from its report rows; returns False
    when the command has no figure."""
    fn = _RENDERERS.get(command)
    if fn is None or not rows:
        return False
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    fn(ax, rows, params)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return True


def _zeros(ax, rows, params):
    k = _col(rows, "k")
    dev = _col(rows, "omega_over_pi_minus_k")
    band = max(0.125, abs(1.0 - 2.0 * params.get("hurst", 0.5)) / 4.0)
    ax.plot(k, dev, "o-", ms=3, lw=0.8)
    ax.axhline(band, color="tab:red", lw=0.8, ls="--", label=f"band ±{band:g}")
    ax.axhline(-band, color="tab:red", lw=0.8, ls="--")
    ax.axhline(0.25, color="k", lw=0.8, ls=":", label="Kadec 1/4")
    ax.axhline(-0.25, color="k", lw=0.8, ls=":")
    ax.set_xlabel("k")
    ax.set_ylabel(r"$\omega_k/\pi - k$")
    ax.set_title(f"Bessel zero offsets, H={params.get('hurst')}")
    ax.legend(fontsize=8)


def _coeffs(ax, rows, params):
    k = [row["k"] for row in rows if row["k"] >= 1]
    a = [row["a_k"] for row in rows if row["k"] >= 1]
    H = params.get("hurst", 0.5)
    ax.loglog([1 + v for v in k], a, "o", ms=3, label=r"$a_k$")
    ref = [a[0] * ((1 + kk) / (1 + k[0])) ** (0.5 - H) for kk in k]
    ax.loglog([1 + v for v in k], ref, "-", lw=1, label=rf"slope $1/2-H = {0.5 - H:+.2f}$")
    ax.set_xlabel("1 + k")
    ax.set_ylabel(r"$a_k$")
    ax.set_title(f"Coefficient decay, H={H}")
    ax.legend(fontsize=8)


def _simulate(ax, rows, params):
    idx = _col(rows, "index")
    val = _col(rows, "value")
    ax.plot(idx, val, lw=0.7)
    ax.set_xlabel("index")
    ax.set_ylabel("value")
    ax.set_title(f"fGN path, H={params.get('hurst')}, n={len(rows)}")


def _bounds(ax, rows, params):
    n = _col(rows, "n")
    ax.semilogx(n, _col(rows, "lower_bound"), "v-", label="spectral lower bound", ms=4)
    ax.semilogx(n, _col(rows, "dense_min"), "o--", label=r"$\lambda_{\min}$ (dense)", ms=4)
    ax.semilogx(n, _col(rows, "dense_max"), "s--", label=r"$\lambda_{\max}$ (dense)", ms=4)
    ax.semilogx(n, _col(rows, "upper_bound"), "^-", label="spectral upper bound", ms=4)
    ax.set_xlabel("n")
    ax.set_ylabel("eigenvalue")
    ax.set_yscale("log")
    ax.set_title(f"Toeplitz eigenvalue bounds, H={params.get('hurst')}")
    ax.legend(fontsize=8)


def _rates(ax, rows, params):
    n = _col(rows, "n")
    risk = _col(rows, "risk")
    err = _col(rows, "stderr")
    ax.errorbar(n, risk, yerr=err, fmt="o", ms=4, capsize=3, label="MC risk")
    slope = params.get("slope")
    if slope is not None:
        fit = [risk[0] * (v / n[0]) ** slope for v in n]
        ax.plot(n, fit, "-", lw=1, label=f"fit slope {slope:+.3f}")
    target = params.get("theoretical_slope")
    if target is not None:
        ref = [risk[0] * (v / n[0]) ** target for v in n]
        ax.plot(n, ref, "--", lw=1, label=f"theory slope {target:+.3f}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel(r"$\ell^2$ risk")
    ax.set_title(
        f"Spectral-cutoff risk, H={params.get('hurst')}, beta={params.get('beta')}"
    )
    ax.legend(fontsize=8)


def _diagnose(ax, rows, params):
    n = _col(rows, "n")
    ax.loglog(n, _col(rows, "condition_i"), "o-", ms=4, label="discretization (i)")
    cond2 = [max(v, 1e-300) for v in _col(rows, "condition_ii")]
    ax.loglog(n, cond2, "s-", ms=4, label="RKHS approximation (ii)")
    ax.set_xlabel("n")
    ax.set_ylabel("diagnostic value")
    ax.set_title(f"Approximation-condition diagnostics, H={params.get('hurst')}")
    ax.legend(fontsize=8)


_RENDERERS = {
    "zeros": _zeros,
    "coeffs": _coeffs,
    "simulate": _simulate,
    "bounds": _bounds,
    "rates": _rates,
    "diagnose": _diagnose,
}
