"""Bloch-vector helpers for single-qubit states and SIO building blocks."""

import math
from typing import NamedTuple

import numpy as np

from .channel import Channel

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

NORM_SLACK = 1e-12


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float

    @property
    def perp(self):
        """Distance from the z axis."""
        return math.hypot(self.x, self.y)

    @property
    def azimuth(self):
        return math.atan2(self.y, self.x)

    def norm(self):
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)


def as_bloch(v, name="Bloch vector"):
    """Validate and convert a 3-sequence (or comma-separated string)."""
    if isinstance(v, str):
        try:
            v = [float(p) for p in v.split(",")]
        except ValueError:
            raise ValueError(f"cannot parse {name} {v!r}") from None
    arr = np.asarray(v, dtype=float).ravel()
    if arr.shape != (3,):
        raise ValueError(f"{name} needs three components, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite components")
    if arr @ arr > 1 + NORM_SLACK:
        raise ValueError(f"{name} {tuple(arr)} lies outside the Bloch ball")
    return BlochVector(*(float(a) for a in arr))


def density(v):
    """``(I + v . sigma) / 2``."""
    x, y, z = as_bloch(v)
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]])


def bloch_of(rho):
    rho = np.asarray(rho)
    return BlochVector(
        float(2 * rho[1, 0].real), float(2 * rho[1, 0].imag), float((rho[0, 0] - rho[1, 1]).real)
    )


def z_rotation(angle):
    """Unitary channel rotating Bloch vectors by ``angle`` about the z axis."""
    return Channel(2, [np.diag([1.0, np.exp(1j * angle)])])


def x_flip(p):
    """``(1-p) rho + p X rho X``; maps (x, y, z) to (x, (1-2p) y, (1-2p) z)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("flip probability must lie in [0, 1]")
    return Channel(2, [math.sqrt(1 - p) * np.eye(2), math.sqrt(p) * PAULI_X])


def compose(*channels):
    """Sequential composition; the first argument acts first."""
    ops = [np.eye(channels[0].dim, dtype=complex)]
    for ch in channels:
        ops = [k @ prev for k in ch.kraus for prev in ops]
    return Channel(channels[0].dim, ops)
