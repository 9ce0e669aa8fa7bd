"""Two-level state representations: Bloch vector, polar form, density matrix.

Conventions: basis ordering is (|e>, |g>), so sigma_z = diag(1, -1) and the
excited state sits at the north pole z = +1.  The lowering operator is
sigma = |g><e|, and the quadratures are sigma_x = sigma + sigma^dag,
sigma_y = i sigma - i sigma^dag (the standard Pauli matrices in this basis).
The polar angle theta is measured from +z, theta = atan2(x, z), range
(-pi, pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDensityError, OutOfPlaneError

#: Tolerance for "physical" Bloch vectors (|v|^2 <= 1 + EPS_PURE) and for the
#: in-plane check of the polar parametrization.
EPS_PURE = 1e-9

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
#: Lowering operator |g><e| in the (|e>, |g>) basis.
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class BlochVector:
    """Conditioned state of the atom as Pauli expectation values (x, y, z)."""

    x: float
    y: float
    z: float

    def norm2(self) -> float:
        return self.x * self.x + self.y * self.y + self.z * self.z

    def is_physical(self, eps: float = EPS_PURE) -> bool:
        return self.norm2() <= 1.0 + eps

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


#: Ground state |g><g|, the no-driving fixed point of spontaneous emission.
GROUND = BlochVector(0.0, 0.0, -1.0)
#: Excited state |e><e|.
EXCITED = BlochVector(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class PolarState:
    """In-plane state written as x = r sin(theta), z = r cos(theta).

    ``degenerate`` marks the r = 0 case where theta is undefined and returned
    as 0 by convention.
    """

    theta: float
    r: float
    degenerate: bool = False


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 density matrix entries in the (|e>, |g>) basis."""

    ee: complex
    eg: complex
    ge: complex
    gg: complex

    def as_array(self) -> np.ndarray:
        return np.array([[self.ee, self.eg], [self.ge, self.gg]], dtype=complex)

    @classmethod
    def from_array(cls, m: np.ndarray) -> "DensityMatrix":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidDensityError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])


def purity(v: BlochVector) -> float:
    """Purity of the state, P = 2 Tr[rho^2] - 1 = x^2 + y^2 + z^2."""
    return v.norm2()


def bloch_from_polar(p: PolarState) -> BlochVector:
    """Map (theta, r) to the Bloch vector (r sin(theta), 0, r cos(theta))."""
    return BlochVector(p.r * math.sin(p.theta), 0.0, p.r * math.cos(p.theta))


def polar_from_bloch(v: BlochVector, eps: float = EPS_PURE) -> PolarState:
    """Polar form of an in-plane state; raises OutOfPlaneError if |y| >= eps.

    At the origin theta is undefined; (theta=0, degenerate=True) is returned
    so parameter sweeps can pass through r = 0.
    """
    if abs(v.y) >= eps:
        raise OutOfPlaneError(f"|y| = {abs(v.y):.3g} >= {eps:.3g}: state not in the x-z plane")
    r = math.hypot(v.x, v.z)
    if r == 0.0:
        return PolarState(0.0, 0.0, degenerate=True)
    return PolarState(math.atan2(v.x, v.z), r)


def density_from_bloch(v: BlochVector) -> DensityMatrix:
    """rho = (I + x sigma_x + y sigma_y + z sigma_z) / 2."""
    return DensityMatrix(
        ee=0.5 * (1.0 + v.z),
        eg=0.5 * (v.x - 1.0j * v.y),
        ge=0.5 * (v.x + 1.0j * v.y),
        gg=0.5 * (1.0 - v.z),
    )


def bloch_from_density(m: DensityMatrix, tol: float = 1e-12) -> BlochVector:
    """Invert the Pauli decomposition; rejects malformed density matrices.

    Hermiticity and unit trace are enforced to ``tol``; positivity is checked
    down to eigenvalues >= -tol (small negative round-off is tolerated).
    """
    arr = m.as_array()
    if not np.allclose(arr, arr.conj().T, atol=tol, rtol=0.0):
        raise InvalidDensityError("matrix is not Hermitian")
    tr = arr[0, 0] + arr[1, 1]
    if abs(tr - 1.0) > tol:
        raise InvalidDensityError(f"trace is {tr:.15g}, expected 1")
    eigs = np.linalg.eigvalsh(arr)
    if eigs.min() < -tol:
        raise InvalidDensityError(f"negative eigenvalue {eigs.min():.3g}")
    return BlochVector(
        x=float(np.real(arr[0, 1] + arr[1, 0])),
        y=float(np.real(1.0j * arr[0, 1] - 1.0j * arr[1, 0])),
        z=float(np.real(arr[0, 0] - arr[1, 1])),
    )


def wrap_angle(theta: float) -> float:
    """Wrap an angle to the principal interval (-pi, pi]."""
    w = math.remainder(theta, 2.0 * math.pi)
    # math.remainder returns [-pi, pi]; fold the -pi endpoint onto +pi.
    if w <= -math.pi:
        w = math.pi
    return w
