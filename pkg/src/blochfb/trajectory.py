"""Conditioned-trajectory integrators for the delayed-feedback atom.

Per time step the measured current sample is I dt = sqrt(gamma) x_c dt + dW,
and the feedback rotates the state about y in proportion to the sample taken
tau = capacity * dt earlier.  The same Wiener increment therefore appears
twice on a trajectory: in the measurement back-action at t - tau and in the
feedback drive at t.  During warmup (t < tau) the loop carries no signal and
the delayed sample is 0.

Three integrators share this plumbing:

* ``bloch3d`` -- Euler-Maruyama on the full 3-component stochastic Bloch
  equations.  With a finite delay the feedback increment is independent of
  the current measurement noise and the textbook Ito form applies verbatim.
  In the zero-delay limit the two increments coincide and the products
  dW(t - tau) dW(t) -> dt generate an extra drift (the feedback acts on the
  just-measured state); ``sbe_step`` adds that cross term when asked, which
  reproduces the instantaneous-feedback master-equation unraveling exactly.
  The driver integrates the impurity eps = 1 - r^2 in its own (exactly
  multiplicative) variable, so conditioned pure states stay pure to machine
  precision rather than diffusing off the sphere at O(sqrt(dt)).
* ``theta`` -- pure states in the x-z plane stay pure (dr = 0), leaving a
  single angle equation.  This is the production integrator for purity
  statistics.
* ``equator`` -- at zero delay the equatorial feedback reduces to the
  bounded martingale dx = sqrt(gamma) (1 - x^2) dW; with a delay the full
  planar dynamics are run through the bloch3d stepper with the equatorial
  gain choice (lam = -sqrt(gamma)/2, alpha = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bloch import GROUND, BlochVector, polar_from_bloch, wrap_angle
from .errors import StateBlowupError, TooFewBatchesError
from .markov import Gains, equatorial_gains, feedback_gains
from .sde import NoiseStream, round_tau
from .stats import DEFAULT_BATCH_LENGTH, EnsembleEstimate, batch_means_matrix, pool_batches

MODES = ("bloch3d", "theta", "equator")

#: Pre-drawn noise budget (floats) per vectorized ensemble chunk.
_CHUNK_FLOATS = 20_000_000

#: Type alias: one homodyne sample is the current increment I dt, units
#: (inverse time)^(1/2) * time.
HomodyneSample = float


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce one trajectory or ensemble.

    ``tau`` must be an exact integer multiple of ``dt`` (use
    :func:`blochfb.sde.round_tau`); interpolating white noise between steps
    is meaningless.  ``initial_state`` defaults to the ground state.
    """

    gamma: float = 1.0
    theta0: float = 0.0
    tau: float = 0.0
    dt: float = 1e-3
    t_end: float = 100.0
    burn_in: float = 50.0
    seed: int = 1
    mode: str = "theta"
    initial_state: BlochVector = field(default=GROUND)
    #: Explicit (lam, alpha) override; None designs them from theta0
    #: (equator mode then uses the equatorial choice).
    gains: Gains | None = None

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.dt > 0.01 / self.gamma + 1e-15:
            raise ValueError(f"dt = {self.dt} too coarse; need dt <= 0.01/gamma")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not (0.0 <= self.burn_in < self.t_end):
            raise ValueError(
                f"need 0 <= burn_in < t_end, got {self.burn_in}, {self.t_end}"
            )
        cap, tau_r = round_tau(self.tau, self.dt)
        if abs(tau_r - self.tau) > 1e-9 * max(self.tau, self.dt):
            raise ValueError(
                f"tau = {self.tau} is not a multiple of dt = {self.dt}; "
                f"nearest is {tau_r} (capacity {cap})"
            )
        if self.tau > 0.0 and cap < 1:
            raise ValueError(f"tau = {self.tau} smaller than one step dt = {self.dt}")
        if not self.initial_state.is_physical():
            raise ValueError(f"initial state {self.initial_state} outside the Bloch ball")

    @property
    def capacity(self) -> int:
        return round_tau(self.tau, self.dt)[0]

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def burn_steps(self) -> int:
        return int(round(self.burn_in / self.dt))


@dataclass(frozen=True)
class TrajectoryRecord:
    """One conditioned trajectory, recorded at every step.

    ``theta`` holds the principal-value Bloch angle; ``states`` the Bloch
    components, one row per time.  ``guard_renorms`` counts bloch3d steps
    whose impurity update had to be floored at zero (attempted exit from the
    unit ball), ``clamp_count`` equatorial clamps at x = +-1.
    """

    config: SimConfig
    stream_index: int
    times: np.ndarray
    theta: np.ndarray
    states: np.ndarray
    guard_renorms: int = 0
    clamp_count: int = 0
    bit_generator: str = "PCG64"


def homodyne_sample(x_c: float, dW: float, dt: float, gamma: float) -> HomodyneSample:
    """One step of integrated photocurrent, I dt = sqrt(gamma) x_c dt + dW."""
    return math.sqrt(gamma) * x_c * dt + dW


def sbe_step(
    v: BlochVector,
    i_delayed: HomodyneSample,
    g: Gains,
    gamma: float,
    dW: float,
    dt: float,
    markov_cross: bool = False,
) -> BlochVector:
    """One Euler-Maruyama step of the delayed stochastic Bloch equations.

    Drift matrix rows (-gamma/2 - 2 lam^2, 0, 2 alpha), (0, -gamma/2, 0),
    (-2 alpha, 0, -gamma - 2 lam^2) act on (x, y, z) with the constant decay
    term -gamma on dz; the delayed feedback enters as a rotation increment
    2 lam * i_delayed about y; the measurement back-action is
    sqrt(gamma) (1 - x^2 + z, -x y, -x - x z) dW.

    ``markov_cross=True`` adds the zero-delay Ito cross drift
    -2 sqrt(gamma) lam (x (1 + z), 0, 1 - x^2 + z) dt, required when
    ``i_delayed`` contains the same increment as ``dW`` (capacity-0 loop).

    Raises StateBlowupError if the updated state leaves |v| <= 2.
    """
    x, y, z = _sbe_update(
        v.x, v.y, v.z, i_delayed, g.lam, g.alpha, gamma, dW, dt, markov_cross
    )
    norm2 = x * x + y * y + z * z
    if norm2 > 4.0:
        raise StateBlowupError(0, math.sqrt(norm2))
    return BlochVector(x, y, z)


def _sbe_update(x, y, z, s_d, lam, alpha, gamma, dW, dt, markov_cross):
    """One raw Euler-Maruyama displacement of the delayed Bloch equations."""
    sg = math.sqrt(gamma)
    lam2 = 2.0 * lam * lam
    dx = ((-0.5 * gamma - lam2) * x + 2.0 * alpha * z) * dt \
        + 2.0 * lam * z * s_d + sg * (1.0 - x * x + z) * dW
    dy = -0.5 * gamma * y * dt - sg * x * y * dW
    dz = (-2.0 * alpha * x - (gamma + lam2) * z - gamma) * dt \
        - 2.0 * lam * x * s_d - sg * x * (1.0 + z) * dW
    if markov_cross:
        c = -2.0 * sg * lam * dt
        dx += c * x * (1.0 + z)
        dz += c * (1.0 - x * x + z)
    return x + dx, y + dy, z + dz


def theta_step(
    theta_now: float,
    theta_delayed: float,
    dW_now: float,
    dW_delayed: float,
    g: Gains,
    gamma: float,
    dt: float,
) -> float:
    """One step of the pure-state angle equation.

    d theta = [2 alpha + 2 lam I(t - tau) + (gamma/2)(2 + cos theta) sin theta] dt
              + sqrt(gamma) (1 + cos theta) dW(t),
    with I(t - tau) dt = sqrt(gamma) sin(theta(t - tau)) dt + dW(t - tau)
    (pass zeros during warmup).  The result is wrapped to (-pi, pi].
    """
    sg = math.sqrt(gamma)
    current = sg * math.sin(theta_delayed) * dt + dW_delayed
    s = math.sin(theta_now)
    c = math.cos(theta_now)
    theta = theta_now \
        + (2.0 * g.alpha + 0.5 * gamma * (2.0 + c) * s) * dt \
        + 2.0 * g.lam * current \
        + sg * (1.0 + c) * dW_now
    return wrap_angle(theta)


def equator_step(x: float, dW: float, gamma: float) -> float:
    """Zero-delay equatorial update dx = sqrt(gamma) (1 - x^2) dW, clamped to [-1, 1]."""
    x = x + math.sqrt(gamma) * (1.0 - x * x) * dW
    if x > 1.0:
        return 1.0
    if x < -1.0:
        return -1.0
    return x


def _gains_for(cfg: SimConfig) -> Gains:
    if cfg.gains is not None:
        return cfg.gains
    if cfg.mode == "equator":
        return equatorial_gains(cfg.gamma)
    return feedback_gains(cfg.theta0, cfg.gamma)


def simulate_trajectory(cfg: SimConfig, stream_index: int = 0) -> TrajectoryRecord:
    """Integrate one conditioned trajectory; deterministic given (seed, stream_index)."""
    n = cfg.n_steps
    times = np.arange(n + 1) * cfg.dt
    noise = NoiseStream(cfg.seed, stream_index, cfg.dt).increments(n)

    if cfg.mode == "theta":
        theta = _run_theta(cfg, noise)
        states = np.column_stack((np.sin(theta), np.zeros(n + 1), np.cos(theta)))
        return TrajectoryRecord(cfg, stream_index, times, theta, states)

    if cfg.mode == "equator" and cfg.capacity == 0:
        xs, clamps = _run_equator1d(cfg, noise)
        states = np.column_stack((xs, np.zeros(n + 1), np.zeros(n + 1)))
        theta = np.arctan2(xs, 0.0)
        return TrajectoryRecord(cfg, stream_index, times, theta, states,
                                clamp_count=clamps)

    states, guards = _run_bloch3d(cfg, noise, _gains_for(cfg))
    theta = np.arctan2(states[:, 0], states[:, 2])
    return TrajectoryRecord(cfg, stream_index, times, theta, states,
                            guard_renorms=guards)


def _run_theta(cfg: SimConfig, noise: np.ndarray) -> np.ndarray:
    p = polar_from_bloch(cfg.initial_state)
    if abs(p.r - 1.0) > 1e-9:
        raise ValueError(
            f"theta mode needs a pure in-plane start, got r = {p.r:.6g}"
        )
    g = _gains_for(cfg)
    gamma, dt, k = cfg.gamma, cfg.dt, cfg.capacity
    sg = math.sqrt(gamma)
    sg_dt = sg * dt
    half_g = 0.5 * gamma
    two_alpha = 2.0 * g.alpha
    two_lam = 2.0 * g.lam
    sin, cos = math.sin, math.cos
    pi, twopi = math.pi, 2.0 * math.pi

    dw = noise.tolist()
    out = [p.theta]
    theta = p.theta
    # The delayed pair (theta, dW) is read straight out of the recorded
    # history; k = 0 reads the current step, the Markovian limit.
    for i in range(len(dw)):
        dW = dw[i]
        if i >= k:
            current = sg_dt * sin(out[i - k]) + dw[i - k]
        else:
            current = 0.0
        c = cos(theta)
        theta = theta \
            + (two_alpha + half_g * (2.0 + c) * sin(theta)) * dt \
            + two_lam * current + sg * (1.0 + c) * dW
        if theta > pi:
            theta -= twopi
        elif theta <= -pi:
            theta += twopi
        out.append(theta)
    return np.asarray(out)


def _run_equator1d(cfg: SimConfig, noise: np.ndarray):
    v0 = cfg.initial_state
    if abs(v0.y) > 1e-12 or abs(v0.z) > 1e-12:
        raise ValueError(
            "equator mode with tau = 0 integrates the on-axis martingale; "
            f"pass initial_state = BlochVector(x, 0, 0), got {v0}"
        )
    sg = math.sqrt(cfg.gamma)
    x = v0.x
    out = [x]
    clamps = 0
    for dW in noise.tolist():
        x = x + sg * (1.0 - x * x) * dW
        if x > 1.0:
            x = 1.0
            clamps += 1
        elif x < -1.0:
            x = -1.0
            clamps += 1
        out.append(x)
    return np.asarray(out), clamps


def _run_bloch3d(cfg: SimConfig, noise: np.ndarray, g: Gains):
    gamma, dt, k = cfg.gamma, cfg.dt, cfg.capacity
    markov = k == 0
    sg = math.sqrt(gamma)
    sg_dt = sg * dt
    lam, alpha = g.lam, g.alpha
    lam2 = 2.0 * lam * lam
    a11 = -0.5 * gamma - lam2
    a33 = -gamma - lam2
    two_alpha = 2.0 * alpha
    two_lam = 2.0 * lam
    cross = -2.0 * sg * lam * dt
    sqrt = math.sqrt

    dw = noise.tolist()
    x, y, z = cfg.initial_state.x, cfg.initial_state.y, cfg.initial_state.z
    # Impurity eps = 1 - r^2 obeys the exactly multiplicative SDE
    # d eps = -gamma eps (eps + y^2 + z^2) dt - 2 sqrt(gamma) x eps dW,
    # so it is integrated in its own variable: the Cartesian Euler step sets
    # the direction, eps the radius.  This keeps pure states exactly pure
    # (the dr = 0 reduction) instead of letting the (dW^2 - dt) quadratic
    # noise random-walk the radius at O(sqrt(dt)).
    eps = 1.0 - (x * x + y * y + z * z)
    if eps < 0.0:
        eps = 0.0
    xs = [x]
    ys = [y]
    zs = [z]
    samples: list[float] = []
    guards = 0
    for i in range(len(dw)):
        dW = dw[i]
        s = sg_dt * x + dW
        samples.append(s)
        s_d = samples[i - k] if i >= k else 0.0
        dx = (a11 * x + two_alpha * z) * dt + two_lam * z * s_d \
            + sg * (1.0 - x * x + z) * dW
        dy = -0.5 * gamma * y * dt - sg * x * y * dW
        dz = (-two_alpha * x + a33 * z - gamma) * dt - two_lam * x * s_d \
            - sg * x * (1.0 + z) * dW
        if markov:
            dx += cross * x * (1.0 + z)
            dz += cross * (1.0 - x * x + z)
        eps = eps * (1.0 - gamma * (eps + y * y + z * z) * dt - 2.0 * sg * x * dW)
        if eps < 0.0:
            eps = 0.0
            guards += 1
        elif eps > 1.0:
            eps = 1.0
        x += dx
        y += dy
        z += dz
        n2 = x * x + y * y + z * z
        if n2 > 4.0:
            raise StateBlowupError(i + 1, sqrt(n2))
        if n2 > 0.0:
            scale = sqrt((1.0 - eps) / n2)
            x *= scale
            y *= scale
            z *= scale
        xs.append(x)
        ys.append(y)
        zs.append(z)
    return np.column_stack((xs, ys, zs)), guards


def simulate_linear_excited(
    gamma: float,
    tau: float,
    dt: float,
    t_end: float,
    seed: int = 1,
    stream_index: int = 0,
) -> np.ndarray:
    """Integrate the excited-target angle deviation in linearized form.

    d(dtheta) = [-2 gamma dtheta(t - tau) + (3 gamma / 2) dtheta(t)] dt
                - 2 sqrt(gamma) [dW(t - tau) - dW(t)],
    starting from dtheta = 0; returns the full series (including warmup).
    """
    k, tau_r = round_tau(tau, dt)
    if abs(tau_r - tau) > 1e-9 * max(tau, dt):
        raise ValueError(f"tau = {tau} not a multiple of dt = {dt}")
    n = int(round(t_end / dt))
    dw = NoiseStream(seed, stream_index, dt).increments(n).tolist()
    two_g = 2.0 * gamma
    three_half_g = 1.5 * gamma
    two_sg = 2.0 * math.sqrt(gamma)
    d = 0.0
    out = [d]
    for i in range(n):
        if i >= k:
            d_del = out[i - k]
            dw_del = dw[i - k]
        else:
            d_del = 0.0
            dw_del = 0.0
        d = d + (-two_g * d_del + three_half_g * d) * dt - two_sg * (dw_del - dw[i])
        out.append(d)
    return np.asarray(out)


# ---------------------------------------------------------------------------
# Ensembles
# ---------------------------------------------------------------------------


def simulate_ensemble(
    cfg: SimConfig,
    n_traj: int,
    batch_length: float | None = None,
    stream_offset: int = 0,
) -> EnsembleEstimate:
    """Time-and-ensemble average of the conditioned state past burn-in.

    Each trajectory runs on its own noise stream (stream_index
    stream_offset..stream_offset+n_traj-1, so sweeps can keep grid points
    independent).  Post-burn-in samples are split into contiguous batches of
    ``batch_length`` (default 10/gamma); all batches are pooled for the mean
    state, its standard errors, and the purity of the averaged state.
    """
    if n_traj < 1:
        raise ValueError(f"n_traj must be >= 1, got {n_traj}")
    if batch_length is None:
        batch_length = DEFAULT_BATCH_LENGTH / cfg.gamma
    batch_steps = int(round(batch_length / cfg.dt))
    if batch_steps < 1:
        raise ValueError(f"batch_length {batch_length} shorter than one step")
    post = cfg.n_steps - cfg.burn_steps
    if post // batch_steps < 1:
        raise TooFewBatchesError(
            f"horizon gives {post} post-burn-in steps, shorter than one batch "
            f"({batch_steps} steps)"
        )
    if n_traj <= 4:
        blocks = []
        for idx in range(n_traj):
            rec = simulate_trajectory(cfg, stream_index=stream_offset + idx)
            kept = rec.states[rec.times > cfg.burn_in]
            blocks.append(batch_means_matrix(kept, batch_steps))
        batch_means = np.concatenate(blocks, axis=0)
    else:
        batch_means = _ensemble_batch_means(cfg, n_traj, batch_steps, stream_offset)
    return pool_batches(batch_means, batch_length, n_trajectories=n_traj)


def _spawn_noise(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, index))))


def _ensemble_batch_means(
    cfg: SimConfig, n_traj: int, batch_steps: int, stream_offset: int = 0
) -> np.ndarray:
    """Vectorized chunked runner; returns pooled (n_batches_total, 3) batch means."""
    n = cfg.n_steps
    chunk = max(1, min(n_traj, _CHUNK_FLOATS // max(n, 1)))
    sqrt_dt = math.sqrt(cfg.dt)
    all_means = []
    for start in range(0, n_traj, chunk):
        m = min(chunk, n_traj - start)
        noise = np.empty((m, n))
        for j in range(m):
            noise[j] = _spawn_noise(cfg.seed, stream_offset + start + j).standard_normal(n)
        noise *= sqrt_dt
        if cfg.mode == "theta":
            bm = _theta_chunk(cfg, noise, batch_steps)
        elif cfg.mode == "equator" and cfg.capacity == 0:
            bm = _equator_chunk(cfg, noise, batch_steps)
        else:
            bm = _bloch_chunk(cfg, noise, batch_steps)
        all_means.append(bm.reshape(-1, 3))
    return np.concatenate(all_means, axis=0)


def _batch_collector(cfg: SimConfig, m: int, batch_steps: int):
    """Closure accumulating per-step (x, y, z) rows into per-batch means."""
    burn = cfg.burn_steps
    n_b = (cfg.n_steps - burn) // batch_steps
    sums = np.zeros((m, 3))
    means = np.zeros((m, n_b, 3))
    state = {"filled": 0, "b": 0}

    def push(sample_index: int, x, y, z):
        if sample_index <= burn or state["b"] >= n_b:
            return
        sums[:, 0] += x
        sums[:, 1] += y
        sums[:, 2] += z
        state["filled"] += 1
        if state["filled"] == batch_steps:
            means[:, state["b"], :] = sums / batch_steps
            state["b"] += 1
            state["filled"] = 0
            sums[:] = 0.0

    return push, means


def _theta_chunk(cfg: SimConfig, noise: np.ndarray, batch_steps: int) -> np.ndarray:
    m, n = noise.shape
    p = polar_from_bloch(cfg.initial_state)
    if abs(p.r - 1.0) > 1e-9:
        raise ValueError(f"theta mode needs a pure in-plane start, got r = {p.r:.6g}")
    g = _gains_for(cfg)
    gamma, dt, k = cfg.gamma, cfg.dt, cfg.capacity
    sg = math.sqrt(gamma)
    theta = np.full(m, p.theta)
    s = np.sin(theta)
    c = np.cos(theta)
    buf_s = np.zeros((max(k, 1), m))
    buf_dw = np.zeros((max(k, 1), m))
    push, means = _batch_collector(cfg, m, batch_steps)
    zeros = np.zeros(m)
    for i in range(n):
        dW = noise[:, i]
        if k == 0:
            current = sg * s * dt + dW
        elif i >= k:
            pos = i % k
            current = sg * buf_s[pos] * dt + buf_dw[pos]
        else:
            current = zeros
        if k > 0:
            pos = i % k
            buf_s[pos] = s
            buf_dw[pos] = dW
        theta = theta + (2.0 * g.alpha + 0.5 * gamma * (2.0 + c) * s) * dt \
            + 2.0 * g.lam * current + sg * (1.0 + c) * dW
        s = np.sin(theta)
        c = np.cos(theta)
        push(i + 1, s, zeros, c)
    return means


def _equator_chunk(cfg: SimConfig, noise: np.ndarray, batch_steps: int) -> np.ndarray:
    m, n = noise.shape
    v0 = cfg.initial_state
    if abs(v0.y) > 1e-12 or abs(v0.z) > 1e-12:
        raise ValueError("equator mode with tau = 0 needs an on-axis start (y = z = 0)")
    sg = math.sqrt(cfg.gamma)
    x = np.full(m, v0.x)
    push, means = _batch_collector(cfg, m, batch_steps)
    zeros = np.zeros(m)
    for i in range(n):
        x = x + sg * (1.0 - x * x) * noise[:, i]
        np.clip(x, -1.0, 1.0, out=x)
        push(i + 1, x, zeros, zeros)
    return means


def _bloch_chunk(cfg: SimConfig, noise: np.ndarray, batch_steps: int) -> np.ndarray:
    m, n = noise.shape
    g = _gains_for(cfg)
    gamma, dt, k = cfg.gamma, cfg.dt, cfg.capacity
    markov = k == 0
    sg = math.sqrt(gamma)
    lam, alpha = g.lam, g.alpha
    lam2 = 2.0 * lam * lam
    a11 = -0.5 * gamma - lam2
    a33 = -gamma - lam2
    cross = -2.0 * sg * lam * dt
    v0 = cfg.initial_state
    x = np.full(m, v0.x)
    y = np.full(m, v0.y)
    z = np.full(m, v0.z)
    eps = np.full(m, max(0.0, 1.0 - v0.norm2()))
    buf = np.zeros((max(k, 1), m))
    push, means = _batch_collector(cfg, m, batch_steps)
    for i in range(n):
        dW = noise[:, i]
        sample = sg * x * dt + dW
        if k == 0:
            s_d = sample
        elif i >= k:
            # Copy before the slot is overwritten below.
            s_d = buf[i % k].copy()
        else:
            s_d = 0.0
        if k > 0:
            buf[i % k] = sample
        dx = (a11 * x + 2.0 * alpha * z) * dt + 2.0 * lam * z * s_d \
            + sg * (1.0 - x * x + z) * dW
        dy = -0.5 * gamma * y * dt - sg * x * y * dW
        dz = (-2.0 * alpha * x + a33 * z - gamma) * dt - 2.0 * lam * x * s_d \
            - sg * x * (1.0 + z) * dW
        if markov:
            dx = dx + cross * x * (1.0 + z)
            dz = dz + cross * (1.0 - x * x + z)
        # Radius from the exact impurity SDE, direction from the Euler step
        # (see _run_bloch3d).
        eps = eps * (1.0 - gamma * (eps + y * y + z * z) * dt - 2.0 * sg * x * dW)
        np.clip(eps, 0.0, 1.0, out=eps)
        x = x + dx
        y = y + dy
        z = z + dz
        n2 = x * x + y * y + z * z
        if np.any(n2 > 4.0):
            raise StateBlowupError(i + 1, float(np.sqrt(n2.max())))
        scale = np.sqrt((1.0 - eps) / np.maximum(n2, 1e-300))
        x = x * scale
        y = y * scale
        z = z * scale
        push(i + 1, x, y, z)
    return means


def equator_endpoint_ensemble(
    n_paths: int,
    t_end: float,
    gamma: float = 1.0,
    dt: float = 1e-3,
    seed: int = 1,
    x0: float = 0.0,
) -> np.ndarray:
    """Final x of n_paths zero-delay equatorial martingale paths.

    Each path runs on its own (seed, index) noise stream.  Used for the
    ensemble-mean-is-conserved check; E[x(t)] = x(0) for all t.
    """
    n = int(round(t_end / dt))
    sg = math.sqrt(gamma)
    sqrt_dt = math.sqrt(dt)
    out = np.empty(n_paths)
    chunk = max(1, _CHUNK_FLOATS // max(n, 1))
    for start in range(0, n_paths, chunk):
        m = min(chunk, n_paths - start)
        noise = np.empty((m, n))
        for j in range(m):
            noise[j] = _spawn_noise(seed, start + j).standard_normal(n)
        noise *= sqrt_dt
        x = np.full(m, float(x0))
        for i in range(n):
            x = x + sg * (1.0 - x * x) * noise[:, i]
            np.clip(x, -1.0, 1.0, out=x)
        out[start : start + m] = x
    return out
