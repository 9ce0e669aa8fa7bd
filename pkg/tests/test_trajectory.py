import math

import numpy as np
import pytest

from blochfb import (
    BlochVector,
    PolarState,
    SimConfig,
    StateBlowupError,
    bloch_from_polar,
    delta_theta_variance_at,
    drift_steady_state,
    equator_endpoint_ensemble,
    equator_step,
    feedback_gains,
    homodyne_sample,
    sbe_step,
    simulate_ensemble,
    simulate_linear_excited,
    simulate_trajectory,
    theta_step,
)
from blochfb.markov import AtomParams, Gains
from blochfb.stats import batch_means_matrix, pool_batches


# ---------------------------------------------------------------------------
# step functions
# ---------------------------------------------------------------------------


def test_homodyne_sample_values():
    assert homodyne_sample(0.0, 0.01, 1e-3, 1.0) == 0.01
    assert homodyne_sample(1.0, 0.0, 1e-3, 1.0) == pytest.approx(1e-3)
    # delayed-angle form: I dt = sqrt(g) sin(theta_tau) dt + dW_tau
    th = 0.7
    assert homodyne_sample(math.sin(th), 2e-3, 1e-3, 4.0) == pytest.approx(
        2.0 * math.sin(th) * 1e-3 + 2e-3
    )


def test_sbe_step_markov_fixed_point():
    g = feedback_gains(math.pi / 6, 1.0)
    v = bloch_from_polar(PolarState(math.pi / 6, 1.0))
    dt = 1e-4
    for dW in (0.0, 4 * math.sqrt(dt), -4 * math.sqrt(dt), 2e-3):
        s = homodyne_sample(v.x, dW, dt, 1.0)
        out = sbe_step(v, s, g, 1.0, dW, dt, markov_cross=True)
        res = max(abs(out.x - v.x), abs(out.y - v.y), abs(out.z - v.z))
        assert res < 1e-6


def test_sbe_step_ground_limit_drift():
    # lam = alpha = 0, dW = 0, from the excited pole: dz = -2 gamma dt
    g = Gains(lam=0.0, alpha=0.0)
    dt = 1e-4
    out = sbe_step(BlochVector(0, 0, 1), 0.0, g, 1.0, 0.0, dt)
    assert out.z == pytest.approx(1.0 - 2 * dt, abs=1e-15)
    assert out.x == 0.0 and out.y == 0.0


def test_sbe_step_keeps_plane():
    rng = np.random.default_rng(0)
    g = feedback_gains(1.0, 1.0)
    for _ in range(50):
        v = BlochVector(rng.uniform(-0.7, 0.7), 0.0, rng.uniform(-0.7, 0.7))
        out = sbe_step(v, rng.normal() * 0.01, g, 1.0, rng.normal() * 0.01, 1e-3)
        assert out.y == 0.0


def test_sbe_step_blowup():
    g = Gains(lam=-40.0, alpha=0.0)
    v = BlochVector(0.6, 0.0, -0.6)
    with pytest.raises(StateBlowupError):
        sbe_step(v, 0.5, g, 1.0, 0.0, 1e-2)


def test_theta_step_fixed_point_any_noise():
    g = feedback_gains(math.pi / 6, 1.0)
    th0 = math.pi / 6
    for dW in (0.0, 0.02, -0.04):
        out = theta_step(th0, th0, dW, dW, g, 1.0, 1e-4)
        assert abs(out - th0) < 1e-13


def test_theta_step_ground_fixed_point():
    g = feedback_gains(math.pi, 1.0)
    out = theta_step(math.pi, math.pi, 0.037, 0.011, g, 1.0, 1e-3)
    assert abs(out - math.pi) < 1e-15


def test_theta_step_linearized_excited_limit():
    # near theta0 = 0 the increment reduces to
    # [-2 g dth(t-tau) + (3g/2) dth] dt - 2 sqrt(g) [dW(t-tau) - dW(t)]
    g = feedback_gains(0.0, 1.0)
    dt = 1e-4
    dth, dth_tau = 1e-5, -2e-5
    dW, dW_tau = 3e-3, -1e-3
    out = theta_step(dth, dth_tau, dW, dW_tau, g, 1.0, dt)
    linear = dth + (-2 * dth_tau + 1.5 * dth) * dt - 2.0 * (dW_tau - dW)
    assert out == pytest.approx(linear, abs=1e-12)


def test_theta_step_wraps():
    g = feedback_gains(math.pi, 1.0)
    out = theta_step(3.1, 0.0, 0.5, 0.0, g, 1.0, 1e-3)
    assert -math.pi < out <= math.pi


def test_equator_step_absorbing_and_arithmetic():
    assert equator_step(1.0, 0.5, 1.0) == 1.0
    assert equator_step(-1.0, -0.5, 1.0) == -1.0
    assert equator_step(0.0, 0.02, 1.0) == pytest.approx(0.02)


# ---------------------------------------------------------------------------
# config and record plumbing
# ---------------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(dt=0.02)  # too coarse
    with pytest.raises(ValueError):
        SimConfig(tau=0.0205, dt=1e-3)  # not a multiple
    with pytest.raises(ValueError):
        SimConfig(burn_in=10.0, t_end=5.0)
    with pytest.raises(ValueError):
        SimConfig(mode="heisenberg")
    with pytest.raises(ValueError):
        SimConfig(initial_state=BlochVector(1.0, 1.0, 1.0))
    cfg = SimConfig(tau=0.02, dt=1e-3)
    assert cfg.capacity == 20


def test_record_length_and_times():
    cfg = SimConfig(gamma=1.0, theta0=0.3, tau=0.0, dt=1e-3, t_end=2.0,
                    burn_in=0.0, seed=1, mode="theta")
    rec = simulate_trajectory(cfg)
    assert len(rec.times) == 2001
    assert len(rec.theta) == 2001
    assert rec.states.shape == (2001, 3)
    assert rec.times[-1] == pytest.approx(2.0)


def test_bitwise_reproducibility():
    cfg = SimConfig(gamma=1.0, theta0=0.5, tau=0.01, dt=1e-3, t_end=5.0,
                    burn_in=0.0, seed=42, mode="bloch3d")
    a = simulate_trajectory(cfg, stream_index=3)
    b = simulate_trajectory(cfg, stream_index=3)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.theta, b.theta)
    c = simulate_trajectory(cfg, stream_index=4)
    assert not np.array_equal(a.states, c.states)


def test_warmup_feedback_is_inactive():
    # Until t = tau the delayed current is zero, so a theta trajectory with
    # huge lam must coincide with a no-feedback one over the warmup window.
    base = dict(gamma=1.0, theta0=0.5, dt=1e-3, t_end=0.5, burn_in=0.0,
                seed=6, mode="theta")
    cfg_fb = SimConfig(tau=0.2, **base)
    rec_fb = simulate_trajectory(cfg_fb)
    cfg_free = SimConfig(tau=0.2, gains=Gains(lam=0.0, alpha=feedback_gains(0.5, 1.0).alpha), **base)
    rec_free = simulate_trajectory(cfg_free)
    k = cfg_fb.capacity
    assert np.array_equal(rec_fb.theta[: k + 1], rec_free.theta[: k + 1])
    assert not np.allclose(rec_fb.theta[k + 5 :], rec_free.theta[k + 5 :])


def test_theta_mode_requires_pure_start():
    with pytest.raises(ValueError):
        simulate_trajectory(SimConfig(mode="theta", t_end=1.0, burn_in=0.0,
                                      initial_state=BlochVector(0.2, 0.0, 0.2)))


def test_equator_zero_delay_requires_axis_start():
    with pytest.raises(ValueError):
        simulate_trajectory(SimConfig(mode="equator", t_end=1.0, burn_in=0.0))


def test_equator_zero_delay_runs_and_clamps():
    cfg = SimConfig(mode="equator", tau=0.0, dt=1e-3, t_end=30.0, burn_in=0.0,
                    seed=3, initial_state=BlochVector(0.0, 0.0, 0.0))
    rec = simulate_trajectory(cfg)
    x = rec.states[:, 0]
    assert np.all(np.abs(x) <= 1.0)
    assert np.all(rec.states[:, 1] == 0.0)
    assert np.all(rec.states[:, 2] == 0.0)
    # paths park near one of the absorbing points on this horizon
    assert abs(x[-1]) > 0.9


def test_blowup_reports_step_index():
    cfg = SimConfig(mode="bloch3d", tau=0.0, dt=1e-2, gamma=1.0, t_end=1.0,
                    burn_in=0.0, seed=1, gains=Gains(lam=-40.0, alpha=0.0),
                    initial_state=BlochVector(0.6, 0.0, -0.6))
    with pytest.raises(StateBlowupError) as err:
        simulate_trajectory(cfg)
    assert err.value.step >= 1


# ---------------------------------------------------------------------------
# physics invariants
# ---------------------------------------------------------------------------


def test_markovian_theta_converges_and_stays():
    # capture from the ground state takes several lifetimes; once caught the
    # angle contracts onto the target and never leaves
    cfg = SimConfig(gamma=1.0, theta0=math.pi / 6, tau=0.0, dt=1e-4, t_end=20.0,
                    burn_in=0.0, seed=9, mode="theta")
    rec = simulate_trajectory(cfg)
    tail = rec.theta[rec.times >= 18.0]
    assert np.abs(tail - math.pi / 6).max() < 1e-4


def test_delayed_theta_keeps_fluctuating():
    cfg = SimConfig(gamma=1.0, theta0=math.pi / 6, tau=0.02, dt=1e-4, t_end=10.0,
                    burn_in=0.0, seed=1, mode="theta")
    rec = simulate_trajectory(cfg)
    tail = rec.theta[rec.times >= 5.0]
    assert tail.std() > 1e-2
    assert abs(tail.mean() - math.pi / 6) < 0.2


def test_pure_state_stays_pure_bloch3d():
    cfg = SimConfig(gamma=1.0, theta0=math.pi / 6, tau=0.02, dt=1e-3, t_end=10.0,
                    burn_in=0.0, seed=5, mode="bloch3d",
                    initial_state=bloch_from_polar(PolarState(math.pi / 6, 1.0)))
    rec = simulate_trajectory(cfg)
    r = np.sqrt((rec.states**2).sum(axis=1))
    assert np.abs(1.0 - r).max() < 1e-12
    assert rec.guard_renorms == 0


def test_zero_delay_reduction_bloch3d_vs_theta():
    base = dict(gamma=1.0, theta0=math.pi / 6, tau=0.0, dt=1e-4, t_end=10.0,
                burn_in=0.0, seed=5)
    rb = simulate_trajectory(SimConfig(mode="bloch3d", **base))
    rt = simulate_trajectory(SimConfig(mode="theta", **base))
    diff = np.abs(np.unwrap(rb.theta) - np.unwrap(rt.theta)).max()
    assert diff < 5e-3
    base["dt"] = 5e-5
    rb2 = simulate_trajectory(SimConfig(mode="bloch3d", **base))
    rt2 = simulate_trajectory(SimConfig(mode="theta", **base))
    diff2 = np.abs(np.unwrap(rb2.theta) - np.unwrap(rt2.theta)).max()
    assert diff2 < diff


def test_mirror_symmetry_exact():
    # theta -> -theta, alpha -> -alpha, dW -> -dW maps trajectories to their
    # mirror images bit for bit (lam is even in theta0).
    rng = np.random.default_rng(12)
    dt = 1e-3
    n, k = 5000, 20
    dw = (rng.standard_normal(n) * math.sqrt(dt)).tolist()
    gp = feedback_gains(math.pi / 6, 1.0)
    gm = feedback_gains(-math.pi / 6, 1.0)
    th_p, th_m = [2.0], [-2.0]
    for i in range(n):
        tdp = th_p[i - k] if i >= k else 0.0
        tdm = th_m[i - k] if i >= k else 0.0
        wdp = dw[i - k] if i >= k else 0.0
        th_p.append(theta_step(th_p[i], tdp, dw[i], wdp, gp, 1.0, dt))
        th_m.append(theta_step(th_m[i], tdm, -dw[i], -wdp, gm, 1.0, dt))
    assert np.array_equal(np.asarray(th_m), -np.asarray(th_p))


def test_gamma_scaling_maps_paths_exactly():
    # gamma only sets the time unit: rescaling (gamma, tau, dt, t_end) by
    # (2, 1/2, 1/2, 1/2) with the same noise stream must reproduce the same
    # discrete path step for step (any misplaced gamma factor breaks this)
    base = dict(theta0=math.pi / 6, burn_in=0.0, seed=13)
    for mode in ("theta", "bloch3d"):
        a = simulate_trajectory(SimConfig(gamma=1.0, tau=0.02, dt=1e-3, t_end=10.0,
                                          mode=mode, **base))
        b = simulate_trajectory(SimConfig(gamma=2.0, tau=0.01, dt=5e-4, t_end=5.0,
                                          mode=mode, **base))
        assert np.allclose(a.states, b.states, atol=1e-12)


def test_ensemble_mean_matches_master_equation():
    # no feedback, driving alpha = 0.5: the trajectory average must land on
    # the master-equation steady state (the unraveling averages correctly)
    cfg = SimConfig(gamma=1.0, tau=0.0, dt=1e-3, t_end=10.0, burn_in=5.0,
                    seed=4, mode="bloch3d", gains=Gains(lam=0.0, alpha=0.5))
    est = simulate_ensemble(cfg, n_traj=10_000, batch_length=5.0)
    ss = drift_steady_state(AtomParams(1.0, 0.5))
    for mean, err, target in zip(est.mean.as_array(), est.std_error, ss.as_array()):
        assert abs(mean - target) <= 3 * err + 1e-12


def test_equator_martingale_quick():
    finals = equator_endpoint_ensemble(2000, 3.0, gamma=1.0, dt=1e-3, seed=2, x0=0.0)
    se = finals.std(ddof=1) / math.sqrt(len(finals))
    assert abs(finals.mean()) < 3 * se
    assert np.abs(finals).max() <= 1.0


def test_ensemble_scalar_and_vector_paths_agree():
    cfg = SimConfig(gamma=1.0, theta0=math.pi / 6, tau=0.02, dt=1e-3, t_end=130.0,
                    burn_in=10.0, seed=21, mode="theta")
    est_vec = simulate_ensemble(cfg, n_traj=6)
    blocks = []
    for idx in range(6):
        rec = simulate_trajectory(cfg, stream_index=idx)
        blocks.append(batch_means_matrix(rec.states[rec.times > cfg.burn_in], 10_000))
    est_scalar = pool_batches(np.concatenate(blocks, axis=0), 10.0, 6)
    assert est_vec.purity == pytest.approx(est_scalar.purity, abs=1e-12)
    assert np.allclose(est_vec.mean.as_array(), est_scalar.mean.as_array(), atol=1e-12)


def test_bloch3d_driver_composes_sbe_step_with_radial_rule():
    # one driver step == public sbe_step displacement, rescaled to the radius
    # of the exact impurity update
    from blochfb import NoiseStream

    gamma, dt = 1.0, 1e-3
    for v0, markov, tau in (
        (bloch_from_polar(PolarState(0.9, 1.0)), True, 0.0),
        (BlochVector(0.3, 0.1, -0.4), True, 0.0),
        (BlochVector(0.3, 0.1, -0.4), False, dt),
    ):
        cfg = SimConfig(gamma=gamma, theta0=0.7, tau=tau, dt=dt, t_end=dt,
                        burn_in=0.0, seed=31, mode="bloch3d", initial_state=v0)
        rec = simulate_trajectory(cfg, stream_index=2)
        dW = float(NoiseStream(31, 2, dt).increments(1)[0])
        g = feedback_gains(0.7, gamma)
        s_d = homodyne_sample(v0.x, dW, dt, gamma) if tau == 0.0 else 0.0
        raw = sbe_step(v0, s_d, g, gamma, dW, dt, markov_cross=markov)
        eps0 = max(0.0, 1.0 - v0.norm2())
        eps1 = eps0 * (1.0 - gamma * (eps0 + v0.y**2 + v0.z**2) * dt
                       - 2.0 * math.sqrt(gamma) * v0.x * dW)
        scale = math.sqrt((1.0 - eps1) / raw.norm2())
        expected = np.array([raw.x, raw.y, raw.z]) * scale
        assert np.allclose(rec.states[1], expected, atol=1e-15)


def test_markovian_excited_ensemble_is_pure():
    # tau = 0 at the excited target: the time-averaged state converges to a
    # pure state once the transient is discarded
    cfg = SimConfig(gamma=1.0, theta0=0.0, tau=0.0, dt=1e-3, t_end=1050.0,
                    burn_in=50.0, seed=1, mode="theta")
    est = simulate_ensemble(cfg, n_traj=1)
    assert est.purity > 1.0 - 1e-3


def test_ensemble_results_independent_of_chunking(monkeypatch):
    import blochfb.trajectory as traj

    cfg = SimConfig(gamma=1.0, theta0=0.3, tau=0.01, dt=1e-3, t_end=60.0,
                    burn_in=10.0, seed=14, mode="theta")
    whole = simulate_ensemble(cfg, n_traj=24, batch_length=10.0)
    monkeypatch.setattr(traj, "_CHUNK_FLOATS", 300_000)  # forces ~5 chunks
    pieces = simulate_ensemble(cfg, n_traj=24, batch_length=10.0)
    assert whole.purity == pieces.purity
    assert whole.mean == pieces.mean

    finals = equator_endpoint_ensemble(500, 2.0, dt=1e-3, seed=5)
    monkeypatch.setattr(traj, "_CHUNK_FLOATS", 100_000)
    finals2 = equator_endpoint_ensemble(500, 2.0, dt=1e-3, seed=5)
    assert np.array_equal(finals, finals2)


def test_ground_target_is_exactly_stabilized():
    cfg = SimConfig(gamma=1.0, theta0=math.pi, tau=0.1, dt=1e-3, t_end=150.0,
                    burn_in=20.0, seed=8, mode="theta")
    est = simulate_ensemble(cfg, n_traj=1)
    assert est.purity > 1.0 - 1e-12
    assert est.mean.z == pytest.approx(-1.0, abs=1e-9)


def test_purity_scan_point_quick():
    cfg = SimConfig(gamma=1.0, theta0=0.0, tau=0.05, dt=1e-3, t_end=250.0,
                    burn_in=50.0, seed=1, mode="theta")
    est = simulate_ensemble(cfg, n_traj=1)
    assert est.purity == pytest.approx(0.8, abs=0.05)


def test_linearized_excited_variance_matches_quadrature():
    series = simulate_linear_excited(1.0, 0.02, 1e-3, 1050.0, seed=9)
    post = series[50_000:]
    var_sim = float(np.mean(post**2))
    # batch-means error bar for the squared series
    sq = post**2
    m = sq[: 100 * (sq.size // 100)].reshape(100, -1).mean(axis=1)
    se = m.std(ddof=1) / math.sqrt(len(m))
    var_quad = delta_theta_variance_at(1.0, 0.02)
    assert abs(var_sim - var_quad) < 3 * se


def test_linear_excited_zero_delay_damps_to_zero():
    series = simulate_linear_excited(1.0, 0.0, 1e-3, 50.0, seed=3)
    # tau = 0: dot(dth) = -gamma/2 dth with cancelling noise, decays from 0 stays 0
    assert np.abs(series).max() < 1e-12
