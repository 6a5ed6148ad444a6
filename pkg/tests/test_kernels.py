import os
import subprocess
import sys

import numpy as np
import pytest

from moranspec import fourier, kernels, periodic


SEQ = periodic([(4, [0, 1]), (6, [0, 2, 4])])


def test_backends_agree_on_mu_hat_grid():
    if kernels.numba is None:
        pytest.skip("numba unavailable")
    pos, offsets = fourier.atom_positions(SEQ, 14)
    xi = np.linspace(-3, 3, 257)
    a = kernels.mu_hat_grid(pos, offsets, xi, force="numpy")
    b = kernels.mu_hat_grid(pos, offsets, xi, force="numba")
    assert np.max(np.abs(a - b)) < 1e-12


def test_backends_agree_on_mask_abs2():
    if kernels.numba is None:
        pytest.skip("numba unavailable")
    digits = np.array([0.0, 2.0, 3.0, 7.0])
    xi = np.linspace(-2, 2, 199)
    a = kernels.mask_abs2_grid(digits, xi, force="numpy")
    b = kernels.mask_abs2_grid(digits, xi, force="numba")
    assert np.max(np.abs(a - b)) < 1e-12


def test_mask_abs2_values():
    digits = np.array([0.0, 2.0])
    xi = np.array([0.0, 0.25, 0.5])
    got = kernels.mask_abs2_grid(digits, xi)
    assert got == pytest.approx([1.0, 0.0, 1.0], abs=1e-12)


def test_env_flag_selects_pure_numpy():
    # the fallback flag must disable the jitted path at import time
    code = (
        "import moranspec.kernels as k; "
        "print(k.HAVE_NUMBA)"
    )
    env = dict(os.environ, MORANSPEC_PURE_NUMPY="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True,
    )
    assert out.stdout.strip() == "False"
    env.pop("MORANSPEC_PURE_NUMPY")
    out2 = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True,
    )
    expected = "True" if kernels.numba is not None else "False"
    assert out2.stdout.strip() == expected


def test_results_identical_under_fallback_flag():
    code = (
        "import numpy as np\n"
        "from moranspec import fourier, periodic\n"
        "s = periodic([(4, [0, 1]), (6, [0, 2, 4])])\n"
        "v = fourier.mu_hat_grid(s, 10, np.linspace(-1, 1, 33))\n"
        "print(repr(np.abs(v).sum()))\n"
    )
    runs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, MORANSPEC_PURE_NUMPY=flag)
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True,
        )
        assert out.returncode == 0, out.stderr
        runs[flag] = float(out.stdout.strip().replace("np.float64(", "").rstrip(")"))
    assert runs["0"] == pytest.approx(runs["1"], abs=1e-12)
