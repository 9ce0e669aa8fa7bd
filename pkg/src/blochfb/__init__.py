"""Quantum-trajectory simulation of homodyne feedback on a two-level atom.

The package covers the instantaneous-feedback closed forms (steady states,
gain design, feedback Liouvillian), conditioned-trajectory integrators with
a finite feedback loop delay, ensemble statistics with batch-means error
bars, and the spectral/closed-form results for the excited-state target,
including the purity law P = 1 - 4 gamma tau.
"""

from .bloch import (
    EPS_PURE,
    GROUND,
    EXCITED,
    BlochVector,
    DensityMatrix,
    PolarState,
    bloch_from_density,
    bloch_from_polar,
    density_from_bloch,
    polar_from_bloch,
    purity,
    wrap_angle,
)
from .errors import (
    BlochFBError,
    EmptyWindowError,
    InvalidDensityError,
    OutOfPlaneError,
    OutOfValidityError,
    PoleEncounteredError,
    ResolutionTooCoarseError,
    StateBlowupError,
    TooFewBatchesError,
)
from .markov import (
    AtomParams,
    Gains,
    drift_steady_state,
    equatorial_gains,
    feedback_gains,
    feedback_liouvillian_apply,
    markov_locus,
)
from .sde import DelayLine, NoiseStream, euler_maruyama_step, round_tau
from .spectral import (
    SpectralParams,
    analytic_purity,
    delta_theta_variance,
    delta_theta_variance_at,
    spectral_integrand,
    stability_threshold,
)
from .stats import EnsembleEstimate, batch_means_error, pool_batches, time_average
from .trajectory import (
    SimConfig,
    TrajectoryRecord,
    equator_endpoint_ensemble,
    equator_step,
    homodyne_sample,
    sbe_step,
    simulate_ensemble,
    simulate_linear_excited,
    simulate_trajectory,
    theta_step,
)

__version__ = "0.1.0"
