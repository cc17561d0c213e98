"""
Floquet operator of the quantum kicked top.

One period is a rotation about J_y followed by the torsion kick:
U = exp(-i k/(2j) J_z^2) exp(-i p J_y).
"""

import math
from dataclasses import dataclass

import numpy as np

from srcs.spin_algebra import SpinSystem, build_spin_system, hermitian_exp, validate_j

DEFAULT_KICK_STRENGTH = 3.0
DEFAULT_ROTATION_ANGLE = math.pi / 2


@dataclass(frozen=True)
class TopParameters:
    """Spin size, kick strength k and rotation angle p (radians)."""

    j: float = 18.0
    kick_strength: float = DEFAULT_KICK_STRENGTH
    rotation_angle: float = DEFAULT_ROTATION_ANGLE

    def __post_init__(self):
        object.__setattr__(self, "j", validate_j(self.j) / 2.0)
        for name in ("kick_strength", "rotation_angle"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_config(cls, config):
        """Reads the top_settings section of a config dict."""
        top_cfg = config["top_settings"]
        return cls(
            j=top_cfg["j"],
            kick_strength=top_cfg.get("kick_strength", DEFAULT_KICK_STRENGTH),
            rotation_angle=top_cfg.get("rotation_angle", DEFAULT_ROTATION_ANGLE),
        )


@dataclass(frozen=True, eq=False)
class FloquetOperator:
    """Unitary one-period propagator together with the parameters that built it."""

    matrix: np.ndarray
    params: TopParameters
    system: SpinSystem

    @property
    def dim(self):
        return self.matrix.shape[0]


def kick_phases(sys, kick_strength):
    """Diagonal of exp(-i k/(2j) J_z^2)."""
    return np.exp(-1j * (kick_strength / (2.0 * sys.j)) * sys.m**2)


def kick_factor(sys, kick_strength):
    """exp(-i k/(2j) J_z^2) as a matrix."""
    return np.diag(kick_phases(sys, kick_strength))


def rotation_factor(sys, rotation_angle):
    """exp(-i p J_y)."""
    return hermitian_exp(sys.jy, -1j * rotation_angle)


def build_floquet(params, sys=None):
    """
    Builds the one-period Floquet operator, kick applied after rotation.

    Args:
        params: TopParameters
        sys: Optional prebuilt SpinSystem for params.j

    Returns:
        FloquetOperator
    """
    if sys is None:
        sys = build_spin_system(params.j)
    elif sys.j != params.j:
        raise ValueError(f"SpinSystem has j={sys.j} but parameters ask for j={params.j}")

    phases = kick_phases(sys, params.kick_strength)
    # diag(phases) @ R without forming the diagonal matrix
    matrix = phases[:, None] * rotation_factor(sys, params.rotation_angle)
    matrix.flags.writeable = False

    return FloquetOperator(matrix=matrix, params=params, system=sys)


def apply(U, v):
    """
    Applies one period of the dynamics to a vector.

    Raises:
        ValueError: length of v does not match the operator dimension
    """
    v = np.asarray(v, dtype=complex)
    if v.shape != (U.dim,):
        raise ValueError(f"Vector of shape {v.shape} does not match Floquet dimension {U.dim}")
    return U.matrix @ v
