"""Agreement between the numba kernels and the pure-numpy fallbacks."""

import numpy as np
import pytest

from cmainj import _kernels as k

pairs = [
    ("sphere_batch", lambda x: (x,)),
    ("rosenbrock_batch", lambda x: (x,)),
    ("rastrigin_batch", lambda x: (x,)),
]


@pytest.fixture(scope="module")
def batch():
    rng = np.random.default_rng(0)
    return np.ascontiguousarray(rng.standard_normal((64, 12)) * 3.0)


@pytest.mark.parametrize("name,argf", pairs)
def test_objective_kernels_agree(name, argf, batch):
    if not k.NUMBA_ENABLED:
        pytest.skip("numba backend disabled")
    np_fn = getattr(k, name + "_np")
    nb_fn = getattr(k, name + "_nb")
    a = np_fn(*argf(batch))
    b = nb_fn(*argf(batch))
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


def test_weighted_outer_agrees():
    if not k.NUMBA_ENABLED:
        pytest.skip("numba backend disabled")
    rng = np.random.default_rng(1)
    y = np.ascontiguousarray(rng.standard_normal((5, 8)))
    w = np.ascontiguousarray(rng.uniform(0.1, 1.0, 5))
    a = k.weighted_outer_np(y, w)
    b = k.weighted_outer_nb(y, w)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)
    assert np.allclose(a, a.T)


def test_mahalanobis_norms_agree():
    if not k.NUMBA_ENABLED:
        pytest.skip("numba backend disabled")
    rng = np.random.default_rng(2)
    a = rng.standard_normal((6, 6))
    invroot = np.ascontiguousarray((a + a.T) / 2)
    y = np.ascontiguousarray(rng.standard_normal((20, 6)))
    assert np.allclose(
        k.mahalanobis_norms_np(invroot, y),
        k.mahalanobis_norms_nb(invroot, y),
        rtol=1e-12,
    )


def test_selected_backend_exports():
    assert k.backend() in ("numba", "numpy")
    x = np.ascontiguousarray(np.array([[3.0, 4.0]]))
    assert k.sphere_batch(x)[0] == pytest.approx(25.0)
    assert k.rosenbrock_batch(np.ascontiguousarray(np.array([[1.0, 1.0]])))[0] == 0.0
    assert k.rastrigin_batch(np.ascontiguousarray(np.zeros((1, 4))))[0] == pytest.approx(0.0)
