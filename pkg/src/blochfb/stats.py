"""Time averaging, burn-in handling, and batch-means error bars.

Trajectory samples decorrelate on the scale of one atomic lifetime, so means
are pooled over contiguous batches much longer than that (default 10/gamma)
and the spread of batch means gives the standard error.  The purity reported
for an averaged state is purity(mean Bloch vector) -- per-step purity is
identically 1 on a pure trajectory and is not the quantity of interest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bloch import BlochVector
from .errors import EmptyWindowError, TooFewBatchesError

#: Minimum number of batches for a reportable error bar.
MIN_BATCHES = 8

#: Default batch length in units of 1/gamma (ten correlation times).
DEFAULT_BATCH_LENGTH = 10.0


@dataclass(frozen=True)
class EnsembleEstimate:
    """Pooled time/ensemble average of the conditioned state.

    ``mean`` is the averaged Bloch vector, ``std_error`` its componentwise
    batch-means standard errors.  ``purity`` is purity(mean) with a
    delta-method error bar from the batch covariance.
    """

    mean: BlochVector
    std_error: tuple[float, float, float]
    purity: float
    purity_err: float
    n_batches: int
    batch_length: float
    n_trajectories: int = 1


def time_average(rec, burn_in: float) -> BlochVector:
    """Arithmetic mean of the recorded states with t > burn_in.

    ``rec`` is a TrajectoryRecord (anything with .times and .states).
    """
    mask = rec.times > burn_in
    if not mask.any():
        raise EmptyWindowError(
            f"burn_in {burn_in} leaves no samples (horizon {rec.times[-1]})"
        )
    kept = rec.states[mask]
    m = kept.mean(axis=0)
    return BlochVector(float(m[0]), float(m[1]), float(m[2]))


def batch_means_error(
    series, batch_length: float, dt: float
) -> tuple[float, float, int]:
    """Mean and batch-means standard error of a stationary scalar series.

    The series is split into floor(T / batch_length) contiguous batches
    (trailing remainder dropped); the error is std(batch means)/sqrt(n).
    Raises TooFewBatchesError below MIN_BATCHES batches.
    """
    series = np.asarray(series, dtype=float)
    batch_steps = int(round(batch_length / dt))
    if batch_steps < 1:
        raise ValueError(f"batch_length {batch_length} shorter than one step {dt}")
    n_batches = series.size // batch_steps
    if n_batches < MIN_BATCHES:
        raise TooFewBatchesError(
            f"{n_batches} batches of {batch_steps} steps from {series.size} samples; "
            f"need >= {MIN_BATCHES}"
        )
    trimmed = series[: n_batches * batch_steps].reshape(n_batches, batch_steps)
    means = trimmed.mean(axis=1)
    mean = float(means.mean())
    if n_batches > 1:
        stderr = float(means.std(ddof=1) / np.sqrt(n_batches))
    else:
        stderr = 0.0
    return mean, stderr, n_batches


def batch_means_matrix(series: np.ndarray, batch_steps: int) -> np.ndarray:
    """Per-batch means of a (n_samples, k) array -> (n_batches, k)."""
    series = np.asarray(series, dtype=float)
    n_batches = series.shape[0] // batch_steps
    trimmed = series[: n_batches * batch_steps]
    return trimmed.reshape(n_batches, batch_steps, -1).mean(axis=1)


def pool_batches(
    batch_means: np.ndarray,
    batch_length: float,
    n_trajectories: int = 1,
) -> EnsembleEstimate:
    """Pool (n_batches, 3) Bloch batch means into an EnsembleEstimate.

    Batches from different trajectories may be concatenated: equal-length
    batches make the grand mean the plain average, and independence across
    batches is exactly what the batch-means construction assumes.
    """
    bm = np.asarray(batch_means, dtype=float)
    if bm.ndim != 2 or bm.shape[1] != 3:
        raise ValueError(f"expected (n_batches, 3) batch means, got {bm.shape}")
    n_b = bm.shape[0]
    if n_b < MIN_BATCHES:
        raise TooFewBatchesError(f"{n_b} batches; need >= {MIN_BATCHES}")
    mean = bm.mean(axis=0)
    cov = np.cov(bm, rowvar=False, ddof=1) / n_b  # covariance of the grand mean
    stderr = np.sqrt(np.diag(cov))
    # Delta method for P = |mean|^2: grad = 2 * mean.
    grad = 2.0 * mean
    var_p = float(grad @ cov @ grad)
    return EnsembleEstimate(
        mean=BlochVector(float(mean[0]), float(mean[1]), float(mean[2])),
        std_error=(float(stderr[0]), float(stderr[1]), float(stderr[2])),
        purity=float(mean @ mean),
        purity_err=float(np.sqrt(max(var_p, 0.0))),
        n_batches=n_b,
        batch_length=batch_length,
        n_trajectories=n_trajectories,
    )
