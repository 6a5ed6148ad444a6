"""Grid kernels for mask-product evaluation.

The inner loops that dominate the numeric probes -- evaluating the truncated
transform over a sample grid and squared-mask sums -- are compiled with numba
when it is available.  Setting the environment variable
``MORANSPEC_PURE_NUMPY=1`` (or running without numba installed) selects the
vectorized pure-numpy implementations instead; both paths compute the same
quantities.  ``benchmarks/bench_kernels.py`` times one against the other.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

PURE_NUMPY = os.environ.get("MORANSPEC_PURE_NUMPY", "") == "1"
HAVE_NUMBA = numba is not None and not PURE_NUMPY

_TWO_PI = 2.0 * np.pi


def _mu_hat_grid_numpy(pos: np.ndarray, offsets: np.ndarray, xi: np.ndarray) -> np.ndarray:
    out = np.ones(xi.shape, dtype=np.complex128)
    for k in range(offsets.size - 1):
        level = pos[offsets[k]:offsets[k + 1]]
        phases = np.exp(-1j * _TWO_PI * np.outer(xi, level))
        out *= phases.sum(axis=1) / level.size
    return out


def _mask_abs2_grid_numpy(digits: np.ndarray, xi: np.ndarray) -> np.ndarray:
    phases = np.exp(-1j * _TWO_PI * np.outer(xi, digits))
    vals = phases.sum(axis=1) / digits.size
    return (vals * vals.conjugate()).real


if numba is not None:

    @numba.njit(cache=True)
    def _mu_hat_grid_numba(pos, offsets, xi):  # pragma: no cover - jitted
        out = np.empty(xi.size, np.complex128)
        for i in range(xi.size):
            acc = 1.0 + 0.0j
            for k in range(offsets.size - 1):
                s = 0.0 + 0.0j
                for j in range(offsets[k], offsets[k + 1]):
                    s += np.exp(-1j * _TWO_PI * pos[j] * xi[i])
                acc *= s / (offsets[k + 1] - offsets[k])
            out[i] = acc
        return out

    @numba.njit(cache=True)
    def _mask_abs2_grid_numba(digits, xi):  # pragma: no cover - jitted
        out = np.empty(xi.size, np.float64)
        for i in range(xi.size):
            s = 0.0 + 0.0j
            for j in range(digits.size):
                s += np.exp(-1j * _TWO_PI * digits[j] * xi[i])
            v = s / digits.size
            out[i] = (v * np.conj(v)).real
        return out


def mu_hat_grid(pos: np.ndarray, offsets: np.ndarray, xi: np.ndarray,
                force: str | None = None) -> np.ndarray:
    """Product over levels of the mean of exp(-2*pi*i*pos*xi), per grid point.

    pos holds the atom positions of all levels back to back (level k occupies
    pos[offsets[k]:offsets[k+1]]); xi is the evaluation grid.
    """
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    xi = np.ascontiguousarray(xi, dtype=np.float64)
    use_numba = HAVE_NUMBA if force is None else force == "numba"
    if use_numba and numba is not None:
        return _mu_hat_grid_numba(pos, offsets, xi)
    return _mu_hat_grid_numpy(pos, offsets, xi)


def mask_abs2_grid(digits: np.ndarray, xi: np.ndarray,
                   force: str | None = None) -> np.ndarray:
    """|mask|^2 of a single digit set over a grid."""
    digits = np.ascontiguousarray(digits, dtype=np.float64)
    xi = np.ascontiguousarray(xi, dtype=np.float64)
    use_numba = HAVE_NUMBA if force is None else force == "numba"
    if use_numba and numba is not None:
        return _mask_abs2_grid_numba(digits, xi)
    return _mask_abs2_grid_numpy(digits, xi)
