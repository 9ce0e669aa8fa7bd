import math

import numpy as np
import pytest

from blochfb import (
    EmptyWindowError,
    SimConfig,
    TooFewBatchesError,
    batch_means_error,
    pool_batches,
    simulate_trajectory,
    time_average,
)
from blochfb.stats import batch_means_matrix


class _FakeRecord:
    def __init__(self, times, states):
        self.times = np.asarray(times)
        self.states = np.asarray(states)


def test_time_average_constant_record():
    n = 100
    rec = _FakeRecord(np.arange(n) * 0.1, np.tile([0.0, 0.0, -1.0], (n, 1)))
    v = time_average(rec, burn_in=2.0)
    assert (v.x, v.y, v.z) == (0.0, 0.0, -1.0)


def test_time_average_alternating_record():
    n = 100
    states = np.tile([1.0, 0.0, 0.0], (n, 1))
    states[1::2, 0] = -1.0
    rec = _FakeRecord(np.arange(n) * 0.1, states)
    v = time_average(rec, burn_in=-1.0)
    assert abs(v.x) < 1e-15 and v.y == 0.0 and v.z == 0.0


def test_time_average_empty_window_raises():
    rec = _FakeRecord(np.arange(10) * 0.1, np.zeros((10, 3)))
    with pytest.raises(EmptyWindowError):
        time_average(rec, burn_in=5.0)


def test_batch_means_iid_normal():
    rng = np.random.default_rng(5)
    series = rng.normal(size=10_000)  # 100 batches of 100 at dt=1, L=100
    mean, se, nb = batch_means_error(series, batch_length=100.0, dt=1.0)
    assert nb == 100
    assert abs(mean) < 0.05
    assert se == pytest.approx(0.01, rel=0.3)


def test_batch_means_constant_series():
    mean, se, nb = batch_means_error(np.full(1000, 2.5), batch_length=10.0, dt=1.0)
    assert mean == 2.5
    assert se == 0.0


def test_batch_means_ar1_oracle():
    # AR(1) with rho = 0.9 at unit lag; the variance of the sample mean is
    # var * (1+rho)/(1-rho) / N for N >> correlation time.
    rho = 0.9
    n = 200_000
    rng = np.random.default_rng(17)
    eps = rng.normal(0.0, math.sqrt(1 - rho * rho), size=n)
    x = np.empty(n)
    x[0] = rng.normal()
    for i in range(1, n):
        x[i] = rho * x[i - 1] + eps[i]
    _, se, nb = batch_means_error(x, batch_length=2000.0, dt=1.0)
    analytic = math.sqrt(1.0 * (1 + rho) / (1 - rho) / n)
    assert nb == 100
    assert se == pytest.approx(analytic, rel=0.3)


def test_batch_means_too_few_batches():
    with pytest.raises(TooFewBatchesError):
        batch_means_error(np.zeros(100), batch_length=50.0, dt=1.0)


def test_batch_means_invariant_to_batch_reordering():
    rng = np.random.default_rng(8)
    series = rng.normal(size=1000)
    mean1, se1, _ = batch_means_error(series, batch_length=100.0, dt=1.0)
    # permute whole batches
    batches = series.reshape(10, 100)[np.array([3, 1, 4, 0, 9, 2, 7, 5, 8, 6])]
    mean2, se2, _ = batch_means_error(batches.ravel(), batch_length=100.0, dt=1.0)
    assert mean1 == pytest.approx(mean2, abs=1e-12)
    assert se1 == pytest.approx(se2, abs=1e-12)


def test_doubling_horizon_shrinks_error_sqrt2():
    rho = 0.5
    rng = np.random.default_rng(23)
    n = 400_000
    eps = rng.normal(0.0, math.sqrt(1 - rho * rho), size=n)
    x = np.empty(n)
    x[0] = 0.0
    for i in range(1, n):
        x[i] = rho * x[i - 1] + eps[i]
    _, se_half, _ = batch_means_error(x[: n // 2], batch_length=1000.0, dt=1.0)
    _, se_full, _ = batch_means_error(x, batch_length=1000.0, dt=1.0)
    assert se_half / se_full == pytest.approx(math.sqrt(2), rel=0.25)


def test_pool_batches_purity_delta_method():
    rng = np.random.default_rng(31)
    bm = np.column_stack([
        rng.normal(0.6, 0.01, size=64),
        np.zeros(64),
        rng.normal(0.7, 0.01, size=64),
    ])
    est = pool_batches(bm, batch_length=10.0)
    assert est.purity == pytest.approx(est.mean.x**2 + est.mean.z**2, abs=1e-12)
    # delta method: sigma_P ~ sqrt((2x sx)^2 + (2z sz)^2) for independent comps
    approx = math.hypot(2 * est.mean.x * est.std_error[0], 2 * est.mean.z * est.std_error[2])
    assert est.purity_err == pytest.approx(approx, rel=0.2)
    assert est.n_batches == 64


def test_pool_batches_requires_eight():
    with pytest.raises(TooFewBatchesError):
        pool_batches(np.zeros((7, 3)), 10.0)


def test_batch_means_matrix_shapes():
    series = np.arange(30, dtype=float).reshape(10, 3)
    bm = batch_means_matrix(series, 3)
    assert bm.shape == (3, 3)
    assert np.allclose(bm[0], series[:3].mean(axis=0))


def test_record_time_average_matches_manual():
    cfg = SimConfig(gamma=1.0, theta0=math.pi, tau=0.0, dt=1e-3, t_end=2.0,
                    burn_in=0.5, seed=2, mode="theta")
    rec = simulate_trajectory(cfg)
    v = time_average(rec, 0.5)
    manual = rec.states[rec.times > 0.5].mean(axis=0)
    assert np.allclose([v.x, v.y, v.z], manual, atol=1e-15)
