"""
Angular-momentum operators, Hermitian matrix exponentials and spin coherent states.

All matrices are dense numpy arrays in the J_z eigenbasis ordered by descending
m (m = j, j-1, ..., -j), so |j,j> sits at index 0.
"""

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-10
NORM_TOL = 1e-10
SPHERE_TOL = 1e-12


def _frozen(array):
    array = np.array(array)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class SpinSystem:
    """Spin-j operators J_x, J_y, J_z (hbar = 1) in the descending-m basis."""

    j: float
    dim: int
    m: np.ndarray
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    @property
    def two_j(self):
        return self.dim - 1

    def basis_state(self, m):
        """Returns |j,m> as a PureState."""
        index = int(round(self.j - m))
        if not 0 <= index < self.dim or abs((self.j - m) - index) > 1e-9:
            raise ValueError(f"m={m} is not a valid magnetic quantum number for j={self.j}")
        amplitudes = np.zeros(self.dim, dtype=complex)
        amplitudes[index] = 1.0
        return PureState(amplitudes)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over |j,m>, same basis order as SpinSystem."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen(np.asarray(self.amplitudes, dtype=complex))
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"PureState must have unit norm, got {norm:.15g}")
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dim(self):
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class BlochPoint:
    """Unit vector on the sphere, optionally tagged with coherent-state angles."""

    x: float
    y: float
    z: float
    theta: float | None = None
    phi: float | None = None

    def __post_init__(self):
        r2 = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(r2 - 1.0) > SPHERE_TOL:
            raise ValueError(f"BlochPoint must lie on the unit sphere, got |p|^2 = {r2:.15g}")

    def as_array(self):
        return np.array([self.x, self.y, self.z])

    @classmethod
    def from_vector(cls, vector, theta=None, phi=None):
        """Normalizes a 3-vector onto the sphere."""
        v = np.asarray(vector, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError("Cannot place a zero vector on the unit sphere")
        v = v / norm
        return cls(float(v[0]), float(v[1]), float(v[2]), theta, phi)


def validate_j(j):
    """
    Checks that j is a positive half-integer.

    Returns:
        int: 2j
    """
    try:
        two_j_float = 2.0 * float(j)
    except (TypeError, ValueError) as e:
        raise ValueError(f"j must be a number, got {j!r}") from e
    if not np.isfinite(two_j_float):
        raise ValueError(f"j must be finite, got j={j}")
    two_j = int(round(two_j_float))
    if abs(two_j_float - two_j) > 1e-9:
        raise ValueError(f"j must be a half-integer (2j integer), got j={j}")
    if two_j < 1:
        raise ValueError(f"j must be >= 1/2, got j={j}")
    return two_j


def build_spin_system(j):
    """
    Builds J_x, J_y, J_z for spin j from the ladder operators.

    <j,m+1|J+|j,m> = sqrt(j(j+1) - m(m+1)); J_x = (J+ + J-)/2, J_y = (J+ - J-)/(2i).

    Args:
        j: Angular-momentum quantum number (1/2, 1, 3/2, ...)

    Returns:
        SpinSystem

    Raises:
        ValueError: j <= 0 or 2j not an integer
    """
    two_j = validate_j(j)
    j = two_j / 2.0
    dim = two_j + 1

    m = j - np.arange(dim, dtype=float)

    # J+ raises m by one, i.e. moves one index up in the descending basis
    ladder = np.sqrt(j * (j + 1.0) - m[1:] * (m[1:] + 1.0))
    j_plus = np.diag(ladder, k=1).astype(complex)
    j_minus = j_plus.conj().T

    jx = (j_plus + j_minus) / 2.0
    jy = (j_plus - j_minus) / 2.0j
    jz = np.diag(m).astype(complex)

    return SpinSystem(j=j, dim=dim, m=_frozen(m), jx=_frozen(jx), jy=_frozen(jy), jz=_frozen(jz))


def hermitian_exp(H, scale):
    """
    Computes exp(scale * H) for Hermitian H via H = V diag(w) V^dagger.

    Args:
        H: d x d Hermitian matrix
        scale: complex scalar; purely imaginary scale gives a unitary result

    Returns:
        np.ndarray: d x d complex matrix

    Raises:
        ValueError: H is not square or not Hermitian within 1e-10
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"hermitian_exp needs a square matrix, got shape {H.shape}")
    deviation = np.max(np.abs(H - H.conj().T)) if H.size else 0.0
    if deviation > HERMITIAN_TOL:
        raise ValueError(f"Matrix is not Hermitian (max |H - H^dagger| = {deviation:.3e})")

    w, V = np.linalg.eigh(H)
    return (V * np.exp(scale * w)) @ V.conj().T


def coherent_state(sys, theta, phi):
    """
    Spin coherent state |j,theta,phi> = exp(i theta (J_x cos phi - J_y sin phi)) |j,j>.

    The global phase is whatever the exponential produces.
    """
    generator = sys.jx * np.cos(phi) - sys.jy * np.sin(phi)
    rotation = hermitian_exp(generator, 1j * theta)
    amplitudes = rotation[:, 0]
    return PureState(amplitudes / np.linalg.norm(amplitudes))


def expectation_vector(sys, psi):
    """Returns (<J_x>, <J_y>, <J_z>) for a normalized state."""
    v = psi.amplitudes
    return np.array([np.vdot(v, op @ v).real for op in (sys.jx, sys.jy, sys.jz)])


def coherent_mean(sys, psi):
    """
    Direction of the mean spin vector, normalized onto the unit sphere.

    Raises:
        ValueError: the mean vector vanishes
    """
    return BlochPoint.from_vector(expectation_vector(sys, psi))


def point_to_angles(p):
    """
    Inverse of coherent_mean(coherent_state(theta, phi)).

    With the coherent-state convention above the mean direction is
    (sin(theta) sin(phi), sin(theta) cos(phi), cos(theta)).

    Returns:
        tuple: (theta in [0, pi], phi); poles return phi = 0
    """
    theta = float(np.arccos(np.clip(p.z, -1.0, 1.0)))
    if np.hypot(p.x, p.y) < SPHERE_TOL:
        return (0.0 if p.z > 0 else float(np.pi)), 0.0
    phi = float(np.arctan2(p.x, p.y))
    return theta, phi


def angles_to_point(theta, phi):
    """Mean direction of |j,theta,phi> in closed form."""
    return BlochPoint(
        float(np.sin(theta) * np.sin(phi)),
        float(np.sin(theta) * np.cos(phi)),
        float(np.cos(theta)),
        theta,
        phi,
    )


def angular_distance(a, b):
    """Great-circle angle between two points on the unit sphere, in [0, pi]."""
    dot = a.x * b.x + a.y * b.y + a.z * b.z
    return float(np.arccos(np.clip(dot, -1.0, 1.0)))
