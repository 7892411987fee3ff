"""Parity between the numba kernels and the numpy fallback."""
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from rankone import kernels
from rankone._accel import HAVE_NUMBA
from rankone.orbits import _inverse_index

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")

NP = kernels.backend("numpy")


@pytest.fixture(scope="module")
def NB():
    return kernels.backend("numba")


def _sorted_rows(a):
    a = np.asarray(a)
    return a[np.lexsort(a.T[::-1])] if a.size else a


def _so21_gens():
    from rankone.orbits import modular_spec
    spec = modular_spec()
    mats = [g.as_float() for g in spec.generators]
    return np.array([m.ravel() for m in mats]), spec


def test_backend_selector():
    assert kernels.backend("numpy") is NP
    with pytest.raises(ValueError):
        kernels.backend("fortran")


def test_expand_float_parity(NB):
    gens, spec = _so21_gens()
    G = gens.shape[0]
    cur = np.vstack([np.eye(3).ravel(), gens])
    last = np.array([-1] + list(range(G)), np.int64)
    inv = np.array([_inverse_index(spec, j) for j in range(G)], np.int64)
    a = NP.expand_float(cur, gens, 3, 50.0, last, inv)
    b = NB.expand_float(cur, gens, 3, 50.0, last, inv)
    assert a[0].shape == b[0].shape
    assert np.allclose(_sorted_rows(a[0]), _sorted_rows(b[0]), rtol=0, atol=1e-12)
    assert np.allclose(np.sort(a[1]), np.sort(b[1]))


def test_expand_exact_parity(NB):
    rng = np.random.default_rng(3)
    cur = rng.integers(-5, 6, size=(7, 9)).astype(np.int64)
    gens = rng.integers(-5, 6, size=(4, 9)).astype(np.int64)
    a = NP.expand_exact(cur, gens, 3, 1, 40)
    b = NB.expand_exact(cur, gens, 3, 1, 40)
    assert np.array_equal(_sorted_rows(a[0]), _sorted_rows(b[0]))
    assert a[2] == b[2]
    a = NP.expand_exact(cur, gens, 3, 2, 40)
    b = NB.expand_exact(cur, gens, 3, 2, 40)
    assert a[2] == b[2]


def test_dedup_exact_parity(NB):
    rng = np.random.default_rng(4)
    ref = rng.integers(0, 3, size=(30, 4)).astype(np.int64)
    cand = rng.integers(0, 3, size=(60, 4)).astype(np.int64)
    assert np.array_equal(NP.dedup_exact(ref, cand), NB.dedup_exact(ref, cand))


def test_dedup_float_parity(NB):
    rng = np.random.default_rng(5)
    base = rng.normal(size=(40, 9)) * 10
    ref = base[:20]
    cand = np.vstack([base[10:], base[:5] + 1e-12, rng.normal(size=(5, 9))])
    proj = rng.normal(size=9)
    ka, ca = NP.dedup_float(ref, cand, proj, 1e-9)
    kb, cb = NB.dedup_float(ref, cand, proj, 1e-9)
    assert np.array_equal(ka, kb) and ca == cb
    # rows equal to earlier rows are dropped, the rest kept
    # base[10:20] and the perturbed copies repeat the reference block
    assert ka.sum() == 20 + 5


def test_quadrature_parity(NB):
    from rankone import harmonic
    ts = np.linspace(0, 25, 11)
    gx, gw, tx, tw = harmonic._GX, harmonic._GW, harmonic._TX, harmonic._TW
    xr = np.full(ts.shape, 0.7)
    xi = np.full(ts.shape, 0.3)
    a = NP.kint_real(xr, xi, ts, 1.0, 0.5, gx, gw)
    b = NB.kint_real(xr, xi, ts, 1.0, 0.5, gx, gw)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)
    a = NP.kint_complex(xr, xi, ts, 2.0, 1.0, gx, gw, tx, tw)
    b = NB.kint_complex(xr, xi, ts, 2.0, 1.0, gx, gw, tx, tw)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_free_walk_parity(NB, k):
    assert np.allclose(NP.free_return_logprobs(k, 200), NB.free_return_logprobs(k, 200),
                       rtol=1e-12)


@pytest.mark.parametrize("d", [1, 2])
def test_lattice_walk_parity(NB, d):
    a = NP.lattice_return_logprobs(d, 60)
    b = NB.lattice_return_logprobs(d, 60)
    assert np.allclose(a, b, rtol=1e-12)
    # P(return at step 2) on Z^d is 1/(2d)
    assert math.exp(a[0]) == pytest.approx(1 / (2 * d))


def test_env_flag_selects_numpy():
    env = dict(os.environ, RANKONE_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c",
                          "from rankone import kernels; print(kernels.ACTIVE_BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@pytest.mark.parametrize("name", ["numpy", "numba"])
def test_free_walk_long_run_stays_finite(name):
    # the return mass sits exponentially far below the peak shell after a few
    # thousand steps; the DP must not underflow there
    logp = kernels.backend(name).free_return_logprobs(2, 4000)
    assert np.all(np.isfinite(logp))
    assert math.exp(logp[-1] / 8000) == pytest.approx(math.sqrt(3) / 2, rel=2e-3)
