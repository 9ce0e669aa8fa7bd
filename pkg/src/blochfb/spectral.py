"""Closed-form results for stabilizing the excited state with a delayed loop.

Linearizing the angle equation about theta0 = 0 gives a delayed linear SDE
whose Fourier solution yields the steady-state angle variance

    <dtheta^2> = (1/(pi gamma)) Int_0^inf  16 sin^2(w tau / 2) dw /
                 [ (3/2 - 2 cos(w tau))^2 + (w/gamma - 2 sin(w tau))^2 ],

with small-delay asymptote <dtheta^2> ~= 4 gamma tau, hence the purity law
P = 1 - 4 gamma tau (valid for gamma tau < 0.25, accurate in practice to
roughly 0.17/gamma).  The linear delay system itself destabilizes at
tau* = 2 arccos(3/4) / (sqrt(7) gamma), where the denominator acquires a
real zero.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import OutOfValidityError, PoleEncounteredError, ResolutionTooCoarseError

#: Validity bound for the linear purity law: P > 0 requires gamma*tau < 0.25.
PURITY_LAW_LIMIT = 0.25

#: Below this denominator value the integrand is treated as singular.
POLE_TOL = 1e-12


def analytic_purity(gamma: float, tau: float) -> float:
    """Purity of the average state near the excited target: 1 - 4 gamma tau."""
    if gamma <= 0.0 or tau < 0.0:
        raise ValueError(f"need gamma > 0 and tau >= 0, got {gamma}, {tau}")
    if gamma * tau >= PURITY_LAW_LIMIT:
        raise OutOfValidityError(
            f"gamma*tau = {gamma * tau:.4g} >= {PURITY_LAW_LIMIT}: purity law invalid"
        )
    return 1.0 - 4.0 * gamma * tau


def stability_threshold(gamma: float) -> float:
    """Smallest delay at which the linearized loop loses stability.

    The spectral denominator has a real zero when cos(w tau) = 3/4 and
    w = 2 gamma sin(w tau) hold simultaneously; the first such delay is
    tau* = 2 arccos(3/4) / (sqrt(7) gamma).
    """
    if gamma <= 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return 2.0 * math.acos(0.75) / (math.sqrt(7.0) * gamma)


def spectral_integrand(omega, gamma: float, tau: float):
    """Spectral density of the angle variance (prefactor 1/(pi gamma) included).

    Accepts scalar or array omega.  Raises PoleEncounteredError if the
    denominator drops below POLE_TOL anywhere on the evaluation points, which
    happens when tau reaches the stability threshold.
    """
    omega = np.asarray(omega, dtype=float)
    wt = omega * tau
    num = 16.0 * np.sin(0.5 * wt) ** 2
    denom = (1.5 - 2.0 * np.cos(wt)) ** 2 + (omega / gamma - 2.0 * np.sin(wt)) ** 2
    if np.any(denom < POLE_TOL):
        raise PoleEncounteredError(
            f"denominator < {POLE_TOL} at tau = {tau}: at/above the stability threshold"
        )
    out = num / denom / (math.pi * gamma)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class SpectralParams:
    """Quadrature configuration for the angle-variance integral.

    Defaults resolve the cos(w tau) oscillation comfortably: a cutoff of
    200/tau leaves a closed-form tail below 1% of the asymptote, and the grid
    keeps >= 40 points per 2 pi / tau period.
    """

    gamma: float
    tau: float
    omega_max: float | None = None
    n_points: int | None = None

    def resolved(self) -> tuple[float, int]:
        if self.gamma <= 0.0 or self.tau < 0.0:
            raise ValueError(f"need gamma > 0 and tau >= 0, got {self.gamma}, {self.tau}")
        if self.tau == 0.0:
            return (self.omega_max or 100.0 * self.gamma), (self.n_points or 2001)
        omega_max = self.omega_max if self.omega_max is not None else 200.0 / self.tau
        if omega_max < 100.0 / self.tau:
            raise ResolutionTooCoarseError(
                f"omega_max = {omega_max:.4g} < 100/tau = {100.0 / self.tau:.4g}"
            )
        period = 2.0 * math.pi / self.tau
        if self.n_points is None:
            # The integrand varies on two scales: the cos(w tau) oscillation
            # and a width-gamma feature at small w; resolve both.
            h = min(period, self.gamma) / 40.0
            n_points = min(2_000_001, max(4001, int(math.ceil(omega_max / h)) | 1))
        else:
            n_points = self.n_points
            if (n_points - 1) * period < 20.0 * omega_max:
                raise ResolutionTooCoarseError(
                    f"n_points = {n_points} gives fewer than 20 samples per "
                    f"period 2*pi/tau = {period:.4g} over [0, {omega_max:.4g}]"
                )
        return omega_max, n_points


def delta_theta_variance(p: SpectralParams) -> float:
    """Steady-state <dtheta^2> by quadrature plus an analytic tail.

    Composite Simpson on a uniform grid over [0, omega_max]; beyond the
    cutoff the integrand averages to (1/(pi gamma)) * 8 gamma^2 / w^2, so the
    tail contributes 8 gamma / (pi omega_max) in closed form.
    """
    if p.tau == 0.0:
        return 0.0
    tau_star = stability_threshold(p.gamma)
    if p.tau >= tau_star:
        raise PoleEncounteredError(
            f"tau = {p.tau:.4g} >= stability threshold {tau_star:.4g}"
        )
    if p.tau > 0.9 * tau_star:
        warnings.warn(
            f"tau = {p.tau:.4g} is within 10% of the stability threshold "
            f"{tau_star:.4g}; the linearization behind this integral is "
            "unreliable well before that",
            stacklevel=2,
        )
    omega_max, n_points = p.resolved()
    grid = np.linspace(0.0, omega_max, n_points)
    values = spectral_integrand(grid, p.gamma, p.tau)
    body = float(simpson(values, x=grid))
    tail = 8.0 * p.gamma / (math.pi * omega_max)
    return body + tail


def delta_theta_variance_at(gamma: float, tau: float, **kwargs) -> float:
    """Convenience wrapper building SpectralParams from keywords."""
    return delta_theta_variance(SpectralParams(gamma=gamma, tau=tau, **kwargs))
