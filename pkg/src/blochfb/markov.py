"""Closed forms for the driven atom and for instantaneous-feedback design.

The no-feedback master equation is
    rho_dot = gamma D[sigma] rho - i alpha [sigma_y, rho],
whose stationary Bloch vector is an ellipse in the lower half plane.  Adding
current feedback with amplitude lambda turns the ensemble evolution into
    rho_dot = -i[alpha sigma_y, rho] + D[sqrt(gamma) sigma - i lambda sigma_y] rho,
and choosing
    lambda = -(sqrt(gamma)/2) (1 + cos(theta0)),
    alpha  = (gamma/4) sin(theta0) cos(theta0)
makes the pure state at Bloch angle theta0 stationary (every angle except the
equator, where the stationary state is degenerate and hence not stable).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch import (
    SIGMA_MINUS,
    SIGMA_Y,
    BlochVector,
    DensityMatrix,
    PolarState,
    bloch_from_density,
    bloch_from_polar,
)

#: |cos(theta0)| below this counts as "on the equator" for the advisory flag.
#: Loose on purpose: stabilization already degenerates for targets this close.
EQUATOR_TOL = 1e-6


@dataclass(frozen=True)
class AtomParams:
    """Decay rate gamma (> 0) and coherent driving amplitude alpha.

    alpha is half the Rabi frequency; both carry units of inverse time.
    """

    gamma: float
    alpha: float = 0.0

    def __post_init__(self):
        if not (self.gamma > 0.0):
            raise ValueError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class Gains:
    """Feedback amplitude lam (units gamma^1/2) and driving amplitude alpha.

    ``equatorial`` is an advisory flag: the target sits on the equator, where
    the stabilized state is known to be degenerate.  It is not an error;
    the equatorial regime is deliberately simulatable.
    """

    lam: float
    alpha: float
    equatorial: bool = False


def drift_steady_state(p: AtomParams) -> BlochVector:
    """Stationary Bloch vector of the driven, damped atom (no feedback)."""
    denom = p.gamma * p.gamma + 8.0 * p.alpha * p.alpha
    return BlochVector(
        x=-4.0 * p.alpha * p.gamma / denom,
        y=0.0,
        z=-p.gamma * p.gamma / denom,
    )


def feedback_gains(theta0: float, gamma: float) -> Gains:
    """Driving and feedback amplitudes that pin the pure state at theta0."""
    if not (gamma > 0.0):
        raise ValueError(f"gamma must be positive, got {gamma}")
    if not math.isfinite(theta0) or abs(theta0) > math.pi + 1e-9:
        raise ValueError(f"theta0 must lie in (-pi, pi], got {theta0}")
    c = math.cos(theta0)
    lam = -0.5 * math.sqrt(gamma) * (1.0 + c)
    alpha = 0.25 * gamma * math.sin(theta0) * c
    return Gains(lam=lam, alpha=alpha, equatorial=abs(c) < EQUATOR_TOL)


def _lindblad(a: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """D[A]B = A B A^dag - {A^dag A, B} / 2."""
    ada = a.conj().T @ a
    return a @ rho @ a.conj().T - 0.5 * (ada @ rho + rho @ ada)


def feedback_liouvillian_apply(m: DensityMatrix, g: Gains, gamma: float) -> np.ndarray:
    """rho_dot under the feedback-modified master equation, as a 2x2 array.

    Evaluates -i[alpha sigma_y, rho] + D[sqrt(gamma) sigma - i lam sigma_y] rho
    by explicit 2x2 algebra.  The result is traceless and Hermitian; the input
    is validated (InvalidDensityError on malformed matrices).
    """
    bloch_from_density(m)  # validation only
    rho = m.as_array()
    a = math.sqrt(gamma) * SIGMA_MINUS - 1.0j * g.lam * SIGMA_Y
    h = g.alpha * SIGMA_Y
    return -1.0j * (h @ rho - rho @ h) + _lindblad(a, rho)


def markov_locus(theta0_grid, gamma: float) -> list[tuple[float, BlochVector, bool]]:
    """Pure-state locus reachable with instantaneous feedback.

    Returns one (theta0, state, unstable) triple per grid angle.  Every angle
    maps to the unit-circle point; the equatorial angles are flagged unstable
    rather than dropped, since they are still stationary solutions.
    """
    if len(theta0_grid) == 0:
        raise ValueError("theta0 grid must be non-empty")
    out = []
    for theta0 in theta0_grid:
        g = feedback_gains(theta0, gamma)
        point = bloch_from_polar_pure(theta0)
        out.append((theta0, point, g.equatorial))
    return out


def bloch_from_polar_pure(theta0: float) -> BlochVector:
    """Unit-circle point at Bloch angle theta0 (r = 1)."""
    return bloch_from_polar(PolarState(theta0, 1.0))


def equatorial_gains(gamma: float) -> Gains:
    """Gains for the equatorial target theta0 = pi/2: lam = -sqrt(gamma)/2, alpha = 0."""
    return Gains(lam=-0.5 * math.sqrt(gamma), alpha=0.0, equatorial=True)
