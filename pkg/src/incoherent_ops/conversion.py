"""Single-qubit state conversion under SIO, IO and MIO.

For an initial Bloch vector ``r`` the reachable targets ``s`` form a
cylinder of radius ``r_perp`` capped by two ellipsoids::

    s_perp**2 <= r_perp**2
    s_z**2 * r_perp**2 <= r_perp**2 - (1 - r_z**2) * s_perp**2

(the second line is written without dividing by ``r_perp``). All three
classes share this region. Targets are realised by an explicit SIO.
"""

import csv
import enum
import math
from typing import NamedTuple

import numpy as np

from .bloch import as_bloch, compose, x_flip, z_rotation, PAULI_X
from .channel import Channel
from .reduction import reduce_qubit_sio

SLACK = 1e-12
HALF_PI = math.pi / 2


class Regime(enum.Enum):
    SIO = "sio"
    IO = "io"
    MIO = "mio"


class InfeasibleConversion(ValueError):
    def __init__(self, r, s, violated):
        self.r, self.s, self.violated = r, s, tuple(violated)
        super().__init__(f"cannot convert {tuple(r)} into {tuple(s)}: violates {', '.join(violated)}")


class BoundaryPoint(NamedTuple):
    theta: float
    s_perp: float
    s_z: float


def _margins(r, s):
    r_perp2 = r.x**2 + r.y**2
    s_perp2 = s.x**2 + s.y**2
    radial = r_perp2 - s_perp2
    height = r_perp2 - (1 - r.z**2) * s_perp2 - s.z**2 * r_perp2
    return radial, height


def violations(r, s, slack=SLACK):
    """Names of the violated conditions (empty when ``s`` is reachable)."""
    r, s = as_bloch(r, "r"), as_bloch(s, "s")
    radial, height = _margins(r, s)
    out = []
    if radial < -slack:
        out.append("transverse bound s_perp <= r_perp")
    if height < -slack:
        out.append("height bound s_z^2 r_perp^2 <= r_perp^2 - (1 - r_z^2) s_perp^2")
    return out


def feasible(r, s, regime=Regime.SIO, slack=SLACK):
    """Whether a free operation of the given class maps ``r`` to ``s``.

    ``regime`` only selects the class; SIO, IO and MIO have the same region.
    """
    Regime(getattr(regime, "value", str(regime).lower()))
    return not violations(r, s, slack)


def _check_theta(theta):
    if not -1e-15 <= theta <= HALF_PI + 1e-15:
        raise ValueError(f"theta must lie in [0, pi/2], got {theta}")
    return min(max(theta, 0.0), HALF_PI)


def max_height(r_z, theta):
    return math.sqrt(math.cos(theta) ** 2 + (r_z * math.sin(theta)) ** 2)


def boundary_point(r, theta):
    """Upper boundary of the region in the (s_perp, s_z) half-plane."""
    r = as_bloch(r, "r")
    theta = _check_theta(theta)
    return BoundaryPoint(theta, r.perp * math.sin(theta), max_height(r.z, theta))


def _boundary_kraus(r_z, theta):
    phi = math.atan2(r_z * math.sin(theta), math.cos(theta))
    a1, a2 = math.cos((theta - phi) / 2), math.sin((theta - phi) / 2)
    b1, b2 = math.sin((theta + phi) / 2), math.cos((theta + phi) / 2)
    return [np.array([[a1, 0], [0, b1]], dtype=complex), np.array([[0, b2], [a2, 0]], dtype=complex)]


def boundary_channel(r, theta):
    """Two-operator SIO taking ``(r_perp, 0, r_z)`` to :func:`boundary_point`."""
    r = as_bloch(r, "r")
    theta = _check_theta(theta)
    if r.perp == 0.0 and theta > 0.0:
        raise ValueError("no transverse component can be reached from an incoherent state")
    ops = [k for k in _boundary_kraus(r.z, theta) if np.linalg.norm(k) > 1e-15]
    return Channel(2, ops)


def construct_channel(r, s, slack=1e-10):
    """An SIO (at most four Kraus operators) mapping state ``r`` to ``s``.

    Recipe: rotate ``r`` into the positive x-z half-plane, mirror it to
    ``r_z >= 0``, apply the boundary channel whose transverse output equals
    ``s_perp``, lower the height with an X-flip mixture, and rotate to the
    target azimuth.
    """
    r, s = as_bloch(r, "r"), as_bloch(s, "s")
    bad = violations(r, s, slack)
    if bad:
        raise InfeasibleConversion(r, s, bad)
    stages = [z_rotation(-r.azimuth)]
    if r.z < 0:
        stages.append(Channel(2, [PAULI_X]))
    if r.perp > 0.0:
        theta = math.asin(min(1.0, s.perp / r.perp))
    else:
        theta = 0.0
    # within the slack the two bounds can disagree (tiny r_perp); keep s_z
    # exact and give up the slack-sized transverse error instead
    if abs(s.z) > abs(r.z):
        theta = min(theta, math.acos(min(1.0, math.sqrt((s.z**2 - r.z**2) / (1 - r.z**2)))))
    stages.append(Channel(2, _boundary_kraus(abs(r.z), theta)))
    height = max_height(r.z, theta)
    p = 0.5 * (1 - s.z / height) if height > 0.0 else 0.0
    stages.append(x_flip(min(max(p, 0.0), 1.0)))
    stages.append(z_rotation(s.azimuth))
    return reduce_qubit_sio(compose(*stages))


def region_csv(r, n):
    """``n`` boundary points at evenly spaced theta in [0, pi/2]."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return [boundary_point(r, t) for t in np.linspace(0.0, HALF_PI, n)]


def write_rows(path_or_file, header, rows):
    """CSV with 17 significant digits; ``path_or_file`` may be an open file."""
    own = isinstance(path_or_file, str)
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{float(v):.17g}" for v in row])
    finally:
        if own:
            fh.close()


REGION_HEADER = ("theta", "s_perp", "s_z_max")
