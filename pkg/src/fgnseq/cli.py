"""Batch command-line front end.

Subcommands emit CSV or JSON reports; commands with tabular output also render
a companion PNG next to the output file (suppress with --no-plot).  All
stochastic commands require an explicit --seed; reruns with the same flags are
byte-identical, including across --jobs settings.

Exit codes: 0 success, 2 configuration error, 3 check failure, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, experiments, fracnoise, nhbasis, specfun, toeplitz, verify
from .errors import NumericalError

#: floats in CSV output carry 17 significant digits (round-trip exact)
_FLOAT_FMT = ".17g"


class UsageError(Exception):
    pass


def _hurst_type(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid Hurst index {text!r}")
    if not (0.0 < value < 1.0):
        raise argparse.ArgumentTypeError(f"Hurst index must lie in (0, 1), got {value}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def parse_grid(spec: str) -> list[int]:
    """Grid syntax: 'a:b:step' (arithmetic), 'a:b:xF' (geometric with factor
    F), or a comma list 'v1,v2,...'."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid must be a:b:step or a:b:xF, got {spec!r}")
        a, b = int(parts[0]), int(parts[1])
        step = parts[2]
        values = []
        if step.startswith("x"):
            factor = float(step[1:])
            if factor <= 1.0:
                raise UsageError("geometric grid factor must exceed 1")
            v = float(a)
            while round(v) <= b:
                values.append(int(round(v)))
                v *= factor
        else:
            inc = int(step)
            if inc < 1:
                raise UsageError("arithmetic grid step must be >= 1")
            values = list(range(a, b + 1, inc))
        if not values:
            raise UsageError(f"grid {spec!r} is empty")
        return values
    try:
        return [int(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"cannot parse grid {spec!r}")


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), _FLOAT_FMT)
    return str(value)


def _write_text(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def _csv_text(columns: list[str], rows: list[dict]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _json_text(command: str, params: dict, seed, rows: list[dict], checks: list[dict]) -> str:
    def clean(v):
        if isinstance(v, (np.integer,)):
            return int(v)
        if isinstance(v, (np.floating,)):
            return float(v)
        if isinstance(v, (np.bool_,)):
            return bool(v)
        return v

    report = {
        "experiment": command,
        "params": {k: clean(v) for k, v in params.items()},
        "seed": clean(seed),
        "metrics": [{k: clean(v) for k, v in row.items()} for row in rows],
        "checks": [{k: clean(v) for k, v in chk.items()} for chk in checks],
    }
    return json.dumps(report, indent=2) + "\n"


def _emit(args, command: str, columns: list[str], rows: list[dict], params: dict, checks=None):
    checks = checks or []
    if args.format == "json":
        text = _json_text(command, params, getattr(args, "seed", None), rows, checks)
    else:
        text = _csv_text(columns, rows)
    _write_text(args.out, text)
    if args.out and not args.no_plot:
        from .figures import render_figure

        render_figure(command, rows, params, Path(args.out).with_suffix(".png"))


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_zeros(args) -> int:
    zt = specfun.bessel_zeros(args.hurst, args.count)
    rows = [
        {
            "k": k,
            "omega_k": zt.omegas[k - 1],
            "omega_over_pi_minus_k": zt.omegas[k - 1] / math.pi - k,
        }
        for k in range(1, args.count + 1)
    ]
    _emit(args, "zeros", ["k", "omega_k", "omega_over_pi_minus_k"], rows,
          {"hurst": args.hurst, "count": args.count})
    return 0


def cmd_coeffs(args) -> int:
    table = nhbasis.build_basis_table(args.hurst, args.count)
    rows = [
        {"k": k, "omega_k": table.omega(k), "a_k": table.a[k], "sigma_k": table.sigma[k]}
        for k in range(args.count + 1)
    ]
    _emit(args, "coeffs", ["k", "omega_k", "a_k", "sigma_k"], rows,
          {"hurst": args.hurst, "count": args.count})
    return 0


def cmd_simulate(args) -> int:
    x = fracnoise.simulate_fgn(args.hurst, args.n, args.seed)
    if args.cumulative:
        x = fracnoise.fbm_from_fgn(x)
    rows = [{"index": i + 1, "value": float(v)} for i, v in enumerate(x)]
    _emit(args, "simulate", ["index", "value"], rows,
          {"hurst": args.hurst, "n": args.n, "cumulative": args.cumulative})
    return 0


def cmd_bounds(args) -> int:
    from scipy.linalg import toeplitz as dense_toeplitz

    rows = []
    for n in args.n_grid:
        ev = np.linalg.eigvalsh(dense_toeplitz(fracnoise.fgn_autocov(args.hurst, np.arange(n))))
        rows.append(
            {
                "n": n,
                "H": args.hurst,
                "lower_bound": toeplitz.eig_lower_bound(args.hurst, n),
                "dense_min": float(ev.min()),
                "dense_max": float(ev.max()),
                "upper_bound": toeplitz.eig_upper_bound(args.hurst, n),
            }
        )
    _emit(args, "bounds", ["n", "H", "lower_bound", "dense_min", "dense_max", "upper_bound"],
          rows, {"hurst": args.hurst, "n_grid": args.n_grid})
    return 0


def cmd_rates(args) -> int:
    report = experiments.rate_experiment(
        args.hurst,
        args.beta,
        args.ball_radius,
        args.n_grid,
        args.replicates,
        args.seed,
        cutoff_const=args.cutoff_const,
        K=args.count,
        jobs=args.jobs,
    )
    rows = [
        {
            "n": int(n),
            "cutoff": int(m),
            "risk": float(r),
            "stderr": float(se),
            "slope": report.slope,
            "slope_se": report.slope_se,
            "theoretical_slope": report.theoretical_slope,
        }
        for n, m, r, se in zip(report.n_grid, report.cutoffs, report.risks, report.stderrs)
    ]
    params = {
        "hurst": args.hurst,
        "beta": args.beta,
        "ball_radius": args.ball_radius,
        "replicates": args.replicates,
        "cutoff_const": args.cutoff_const,
        "slope": report.slope,
        "slope_se": report.slope_se,
        "theoretical_slope": report.theoretical_slope,
        "frame_lower": report.frame_lower,
        "frame_upper": report.frame_upper,
    }
    _emit(args, "rates",
          ["n", "cutoff", "risk", "stderr", "slope", "slope_se", "theoretical_slope"],
          rows, params)
    return 0


def cmd_diagnose(args) -> int:
    kmax = args.count
    table = nhbasis.build_basis_table(args.hurst, kmax)
    theta = experiments.sobolev_test_series(args.alpha, args.ball_radius, kmax, args.seed)
    f = experiments.RegressionFunction(series=theta, alpha=args.alpha, C=args.ball_radius)
    rows = []
    for n in args.n_grid:
        rows.append(
            {
                "n": n,
                "condition_i": experiments.condition_i_diagnostic(f, args.hurst, n, table),
                "condition_ii": experiments.condition_ii_residual(theta, table, n),
            }
        )
    _emit(args, "diagnose", ["n", "condition_i", "condition_ii"], rows,
          {"hurst": args.hurst, "alpha": args.alpha, "ball_radius": args.ball_radius,
           "count": kmax, "n_grid": args.n_grid})
    return 0


def _run_verify(args, areas=None) -> int:
    results = verify.run_checks(
        hurst=args.hurst,
        seed=args.seed,
        perturb_ak=args.perturb_ak,
        areas=areas,
        jobs=args.jobs,
    )
    checks = [r.as_dict() for r in results]
    rows = checks  # CSV view has the same columns
    command = "verify" if areas is None else "verify-basis"
    _emit(args, command, ["check_name", "value", "tolerance", "pass"], rows,
          {"hurst": args.hurst, "perturb_ak": args.perturb_ak, "areas": areas or list(verify.AREAS)},
          checks=checks)
    n_fail = sum(1 for r in results if not r.passed)
    if n_fail:
        sys.stderr.write(f"{n_fail} of {len(results)} checks failed\n")
        return 3
    return 0


def cmd_verify(args) -> int:
    return _run_verify(args, areas=None)


def cmd_verify_basis(args) -> int:
    return _run_verify(args, areas=["basis"])


# --------------------------------------------------------------------------
# parser assembly
# --------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, stochastic: bool = False) -> None:
    p.add_argument("--out", help="output file path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="output format (default csv)")
    p.add_argument("--config", help="key=value file supplying flag defaults; flags win")
    p.add_argument("--no-plot", action="store_true",
                   help="suppress the companion PNG next to --out")
    p.add_argument("--jobs", type=_positive_int, default=1,
                   help="worker threads for replicate loops (output invariant)")
    if stochastic:
        p.add_argument("--seed", type=int, required=True,
                       help="RNG seed (required; no wall-clock default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fgnseq",
        description="Tables, simulators and verification suites for regression "
        "under fractional Gaussian noise and its sequence-model counterpart.",
    )
    parser.add_argument("--version", action="version", version=f"fgnseq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeros", help="Bessel zero table omega_k")
    p.add_argument("--hurst", type=_hurst_type, required=True)
    p.add_argument("--count", "-K", type=_positive_int, default=20)
    _add_common(p)
    p.set_defaults(fn=cmd_zeros)

    p = sub.add_parser("coeffs", help="basis table (k, omega_k, a_k, sigma_k)")
    p.add_argument("--hurst", type=_hurst_type, required=True)
    p.add_argument("--count", "-K", type=_positive_int, default=50)
    _add_common(p)
    p.set_defaults(fn=cmd_coeffs)

    p = sub.add_parser("simulate", help="exact fGN path as CSV (index, value)")
    p.add_argument("--hurst", type=_hurst_type, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--cumulative", action="store_true",
                   help="emit partial sums (fBM at integer times) instead of increments")
    _add_common(p, stochastic=True)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("bounds", help="Toeplitz eigenvalue bounds vs dense spectra")
    p.add_argument("--hurst", type=_hurst_type, required=True)
    p.add_argument("--n-grid", type=str, default="16,64,256")
    _add_common(p)
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("rates", help="spectral-cutoff Monte Carlo risk sweep")
    p.add_argument("--hurst", type=_hurst_type, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--ball-radius", type=float, default=1.0)
    p.add_argument("--n-grid", type=str, default="256:16384:x2")
    p.add_argument("--replicates", type=_positive_int, default=200)
    p.add_argument("--cutoff-const", type=float, default=1.0)
    p.add_argument("--count", "-K", type=_positive_int, default=None,
                   help="basis truncation (default: 8x the largest cutoff)")
    _add_common(p, stochastic=True)
    p.set_defaults(fn=cmd_rates)

    p = sub.add_parser("diagnose", help="approximation-condition diagnostics per n")
    p.add_argument("--hurst", type=_hurst_type, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--ball-radius", type=float, default=1.0)
    p.add_argument("--count", "-K", type=_positive_int, default=32)
    p.add_argument("--n-grid", type=str, default="64:1024:x2")
    _add_common(p, stochastic=True)
    p.set_defaults(fn=cmd_diagnose)

    for name, fn in (("verify", cmd_verify), ("verify-basis", cmd_verify_basis)):
        p = sub.add_parser(name, help="run the invariant check suite")
        p.add_argument("--hurst", type=_hurst_type, default=None,
                       help="restrict every H sweep to this value")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--perturb-ak", type=float, default=0.0,
                       help="test-only fault injection: scale tabulated a_k by 1+eps")
        _add_common(p)
        p.set_defaults(fn=fn, format="json")
    return parser


def _config_args(path: str) -> list[str]:
    """Translate a key=value file into CLI flags (keys use - or _)."""
    args = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line is not key=value: {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on") and key in ("no-plot", "no_plot", "cumulative"):
            args.append(flag)
        else:
            args.extend([flag, value])
    return args


def _inject_config(argv: list[str]) -> list[str]:
    """Load --config key=values as defaults: they are spliced in right after
    the subcommand, so explicit flags (parsed later) win."""
    path = None
    stripped = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config requires a path")
            path = argv[i + 1]
            i += 2
            continue
        if tok.startswith("--config="):
            path = tok.split("=", 1)[1]
            i += 1
            continue
        stripped.append(tok)
        i += 1
    if path is None:
        return argv
    if not stripped:
        raise UsageError("--config requires a subcommand")
    return stripped[:1] + _config_args(path) + stripped[1:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        argv = _inject_config(argv)
        args = parser.parse_args(argv)
        if isinstance(getattr(args, "n_grid", None), str):
            args.n_grid = parse_grid(args.n_grid)
        return args.fn(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 4


if __name__ == "__main__":
    sys.exit(main())
