import os
import subprocess
import sys

import numpy as np
import pytest

from dglattice import backend
from dglattice import _kernels_py


def test_backend_identifies_itself():
    assert backend.BACKEND in ("compiled", "python")


def test_compiled_matches_fallback_bitwise():
    speedups = pytest.importorskip("dglattice._speedups")
    rng = np.random.default_rng(17)
    for _ in range(40):
        width = int(rng.integers(1, 200))
        u = rng.standard_normal(width) + 1j * rng.standard_normal(width)
        g = rng.standard_normal(width) + 1j * rng.standard_normal(width)
        alpha, beta, delta, gamma, mu = rng.standard_normal(5) * 2
        a = _kernels_py.rhs(u.copy(), g, alpha, beta, delta, gamma, mu)
        b = speedups.rhs(u.copy(), g, alpha, beta, delta, gamma, mu)
        assert np.array_equal(a, b)


def test_pure_python_env_override():
    env = dict(os.environ, DGLATTICE_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from dglattice.backend import BACKEND; print(BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"
