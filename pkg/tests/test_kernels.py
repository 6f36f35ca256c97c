import itertools
import os
import subprocess
import sys

import numpy as np
import pytest

from quasihull import _pykernels, kernels
from quasihull.ads3 import FORM22

try:
    from quasihull import _ckernels
except ImportError:  # pragma: no cover - extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def null_vectors(rng, n):
    t = rng.uniform(-np.pi, np.pi, (n, 2))
    return np.column_stack([np.cos(t[:, 0]), np.sin(t[:, 0]), np.cos(t[:, 1]), np.sin(t[:, 1])])


def brute_support(vectors, tol):
    out = set()
    for tri in itertools.combinations(range(len(vectors)), 3):
        m = vectors[list(tri)]
        _, s, vt = np.linalg.svd(m)
        if s[-1] < 1e-9:
            continue
        n = vt[-1]
        side = vectors @ n
        if np.all(side >= -tol) or np.all(side <= tol):
            out.add(tri)
    return out


def test_pure_env_forces_numpy_backend():
    code = "from quasihull import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, QUASIHULL_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@pytest.mark.parametrize("seed", range(5))
def test_support_planes_match_enumeration(seed):
    rng = np.random.default_rng(seed)
    v = null_vectors(rng, 7)
    triples, normals = _pykernels.support_planes(v, 1e-9)
    assert {tuple(t) for t in triples} == brute_support(v, 1e-9)
    assert np.allclose(np.linalg.norm(normals, axis=1), 1.0)
    assert np.all(normals @ v.T >= -1e-9)


@needs_ext
@pytest.mark.parametrize("seed", range(5))
def test_backends_agree_on_support_planes(seed):
    rng = np.random.default_rng(seed)
    v = null_vectors(rng, 9)
    t1, n1 = _pykernels.support_planes(v, 1e-9)
    t2, n2 = _ckernels.support_planes(v, 1e-9)
    a = sorted(zip(map(tuple, t1), map(tuple, np.round(n1, 12))))
    b = sorted(zip(map(tuple, t2), map(tuple, np.round(n2, 12))))
    assert [x[0] for x in a] == [x[0] for x in b]
    assert np.allclose([x[1] for x in a], [x[1] for x in b], atol=1e-12)


@needs_ext
@pytest.mark.parametrize("seed", range(5))
def test_backends_agree_on_min_pairing(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(40, 4)) + np.array([2.0, 0, 0, 0])
    b = rng.normal(size=(30, 4)) + np.array([2.0, 0, 0, 0])
    r1 = _pykernels.min_pairing(a, b, FORM22)
    r2 = _ckernels.min_pairing(a, b, FORM22)
    assert r1[0] == pytest.approx(r2[0], rel=1e-12)
    assert r1[1:] == r2[1:]


def test_min_pairing_brute_force(rng):
    a = rng.normal(size=(15, 4)) + np.array([2.0, 0, 0, 0])
    b = rng.normal(size=(12, 4)) + np.array([2.0, 0, 0, 0])
    best = np.inf
    for x in a:
        for y in b:
            qx, qy = -x @ FORM22 @ x, -y @ FORM22 @ y
            if qx > 0 and qy > 0:
                r = abs(x @ FORM22 @ y) / np.sqrt(qx * qy)
                if r <= 1:
                    best = min(best, r)
    value, _, _ = kernels.min_pairing(a, b, FORM22)
    assert value == pytest.approx(best, rel=1e-12)
