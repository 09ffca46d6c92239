"""Numerics for regression under fractional Gaussian noise.

Subpackages follow the pipeline: `specfun` (Gamma/Bessel/zeros) feeds
`nhbasis` (the nonharmonic basis, coefficients and kernel identities),
`fracnoise` and `toeplitz` cover the noise process and its stationary linear
algebra, and `experiments` runs the discrete-regression and sequence-model
simulations with their diagnostics.  `cli` exposes everything as batch
commands emitting CSV/JSON (and figures next to them).
"""

__version__ = "0.1.0"

from . import errors, experiments, fracnoise, nhbasis, specfun, toeplitz

__all__ = [
    "errors",
    "experiments",
    "fracnoise",
    "nhbasis",
    "specfun",
    "toeplitz",
    "__version__",
]
