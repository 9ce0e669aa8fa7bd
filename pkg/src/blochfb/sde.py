"""Ito noise generation, delayed-signal buffering, and the Euler-Maruyama step.

Noise streams are PCG64 generators keyed by (seed, stream_index), so ensemble
members get independent, individually reproducible increment sequences.
Gaussian increments come from numpy's exact rejection sampler (correct tails,
which matter for the hopping statistics), scaled to variance dt.

The delay is always an exact integer number of steps: interpolating white
noise has no pointwise meaning, so tau is constrained to capacity * dt.
"""

from __future__ import annotations

import math

import numpy as np

_BLOCK = 8192


class NoiseStream:
    """Deterministic stream of Wiener increments dW ~ Normal(0, dt).

    Increments are drawn in blocks from a single underlying generator, so
    ``next_increment`` and ``increments`` walk the identical sequence.
    """

    def __init__(self, seed: int, stream_index: int = 0, dt: float = 1e-3):
        if dt <= 0.0:
            raise ValueError(f"dt must be positive, got {dt}")
        self.seed = int(seed)
        self.stream_index = int(stream_index)
        self.dt = float(dt)
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence((self.seed, self.stream_index)))
        )
        self._sqrt_dt = math.sqrt(dt)
        self._buf = np.empty(0)
        self._pos = 0

    def next_increment(self) -> float:
        """One Wiener increment; advances the stream."""
        if self._pos >= self._buf.size:
            self._buf = self._gen.standard_normal(_BLOCK)
            self._pos = 0
        v = self._buf[self._pos]
        self._pos += 1
        return float(v * self._sqrt_dt)

    def increments(self, n: int) -> np.ndarray:
        """The next n increments as an array (same sequence as next_increment)."""
        out = np.empty(n)
        avail = self._buf.size - self._pos
        take = min(avail, n)
        if take > 0:
            out[:take] = self._buf[self._pos : self._pos + take]
            self._pos += take
        if take < n:
            # Draw the remainder block-aligned so both access paths agree.
            rest = n - take
            full = (rest // _BLOCK) * _BLOCK
            if full:
                out[take : take + full] = self._gen.standard_normal(full)
            if rest > full:
                self._buf = self._gen.standard_normal(_BLOCK)
                self._pos = rest - full
                out[take + full :] = self._buf[: self._pos]
        return out * self._sqrt_dt


class DelayLine:
    """Fixed-length circular buffer returning the sample pushed capacity steps ago.

    capacity = round(tau / dt).  Until the buffer has filled, the delayed
    signal is the warmup value 0.0: no measurement record has traversed the
    loop yet, so the feedback current is defined to vanish.  capacity = 0 is
    the Markovian limit and returns the pushed sample immediately.
    """

    def __init__(self, capacity: int, warmup_value: float = 0.0):
        if capacity < 0:
            raise ValueError(f"capacity must be >= 0, got {capacity}")
        self.capacity = int(capacity)
        self.warmup_value = float(warmup_value)
        self.fill_count = 0
        self._buf = [0.0] * self.capacity
        self._ptr = 0

    @property
    def is_warm(self) -> bool:
        return self.fill_count >= self.capacity

    def push_and_read(self, sample: float) -> float:
        """Store ``sample``; return the one pushed exactly capacity pushes earlier."""
        if self.capacity == 0:
            self.fill_count += 1
            return sample
        ptr = self._ptr
        if self.fill_count >= self.capacity:
            out = self._buf[ptr]
        else:
            out = self.warmup_value
        self._buf[ptr] = sample
        self._ptr = ptr + 1 if ptr + 1 < self.capacity else 0
        self.fill_count += 1
        return out


def euler_maruyama_step(
    state: np.ndarray,
    drift: np.ndarray,
    diffusion: np.ndarray,
    dW: float,
    dt: float,
) -> np.ndarray:
    """One Ito step: state + drift * dt + diffusion * dW.

    Exact affine update, no renormalization; dimension mismatches raise.
    """
    state = np.asarray(state, dtype=float)
    drift = np.asarray(drift, dtype=float)
    diffusion = np.asarray(diffusion, dtype=float)
    if not (state.shape == drift.shape == diffusion.shape):
        raise ValueError(
            f"shape mismatch: state {state.shape}, drift {drift.shape}, "
            f"diffusion {diffusion.shape}"
        )
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    return state + drift * dt + diffusion * dW


def round_tau(tau: float, dt: float) -> tuple[int, float]:
    """Nearest representable delay: (capacity, capacity * dt)."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if tau < 0.0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    capacity = int(round(tau / dt))
    return capacity, capacity * dt
