"""Strictly incoherent qubit operations that leave an incoherent state fixed.

The preserved state ``tau`` has Bloch vector ``(0, 0, t_z)``. Writing a
qubit SIO with operators ``diag(a1, b1)``, ``[[0, b2], [a2, 0]]``,
``a3|0><0|`` and ``b3|0><1|`` the fixed-point condition reads::

    (1 + t_z) * a2**2 == (1 - t_z) * (1 - |b1|**2)

which ties the output height to ``a2`` alone and leaves a one-parameter
family of maximal transverse radii. Every incoherent qubit state is a Gibbs
state of some diagonal Hamiltonian, see :func:`gibbs_params`.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .bloch import as_bloch, compose, z_rotation
from .channel import Channel

SLACK = 1e-12
# below this |t_z - r_z| the generic boundary formulas divide by ~0
DEGENERATE_GAP = 1e-12


class InfiniteGapLimit(ValueError):
    """Pure populations need an infinite energy gap."""


class InfiniteTemperatureLimit(ValueError):
    """The maximally mixed state needs beta -> 0."""


class HamiltonianParams(NamedTuple):
    beta: float
    gap: float

    @property
    def population(self):
        """Ground-state population ``1 / (1 + exp(-beta * gap))``."""
        return 1.0 / (1.0 + math.exp(-self.beta * self.gap))


def gibbs_params(p, beta):
    """Energy gap ``E1 - E0`` making ``diag(p, 1-p)`` thermal at ``beta``."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if p in (0.0, 1.0):
        raise InfiniteGapLimit(f"population {p} is only reached as the gap diverges")
    if not 0.0 < p < 1.0:
        raise ValueError(f"population must lie in (0, 1), got {p}")
    if p == 0.5:
        raise InfiniteTemperatureLimit("population 1/2 is only reached as beta -> 0")
    return HamiltonianParams(beta, math.log(p / (1 - p)) / beta)


def population(t_z):
    """Ground-state population of the incoherent state with Bloch z ``t_z``."""
    return 0.5 * (1 + t_z)


def _check_tz(t_z):
    t_z = float(t_z)
    if not -1.0 <= t_z <= 1.0:
        raise ValueError(f"t_z must lie in [-1, 1], got {t_z}")
    return t_z


def a2_range(t_z):
    """Largest admissible ``a2**2`` for a Gibbs-preserving SIO."""
    t_z = _check_tz(t_z)
    if t_z == -1.0:
        return 1.0
    return min(1.0, (1 - t_z) / (1 + t_z))


def _degenerate(r_z, t_z):
    return abs(t_z) < 1.0 and abs(t_z - r_z) <= DEGENERATE_GAP


def sz_range(r, t_z):
    """Closed interval of reachable output heights."""
    r = as_bloch(r, "r")
    t_z = _check_tz(t_z)
    if t_z == 1.0:
        return (r.z, 1.0)
    if t_z == -1.0:
        return (-1.0, r.z)
    # continuous through t_z == r_z, where it collapses to the point r_z
    end = r.z + 2 * (t_z - r.z) / (1 - t_z) * a2_range(t_z)
    return (min(r.z, end), max(r.z, end))


def _transverse(a2sq, b1sq):
    """Largest ``a1 Re b1 + a2 Re b2`` with |a2|, |b1| fixed."""
    return math.sqrt(b1sq * (1 - a2sq)) + math.sqrt(a2sq * (1 - b1sq))


def _clip(v, lo=0.0, hi=1.0):
    return min(max(v, lo), hi)


def _b1sq(a2sq, t_z):
    return _clip(1 - a2sq * (1 + t_z) / (1 - t_z))


def _boundary_params(r, t_z, s_z, slack):
    """``(a2**2, |b1|**2)`` of the channel reaching height ``s_z`` with the
    widest transverse output."""
    lo, hi = sz_range(r, t_z)
    if not lo - slack <= s_z <= hi + slack:
        raise ValueError(f"s_z = {s_z} outside the reachable range [{lo}, {hi}]")
    s_z = _clip(s_z, lo, hi)
    if t_z == 1.0:
        return 0.0, (_clip((1 - s_z) / (1 - r.z)) if r.z < 1.0 else 0.0)
    if t_z == -1.0:
        return (_clip((r.z - s_z) / (1 + r.z)) if r.z > -1.0 else 0.0), 1.0
    top = a2_range(t_z)
    if _degenerate(r.z, t_z):
        res = minimize_scalar(
            lambda x: -_transverse(x, _b1sq(x, t_z)),
            bounds=(0.0, top),
            method="bounded",
            options={"xatol": 1e-12},
        )
        best = max([0.0, top, float(res.x)], key=lambda x: _transverse(x, _b1sq(x, t_z)))
        return best, _b1sq(best, t_z)
    ratio = (s_z - r.z) / (2 * (t_z - r.z))
    return _clip(ratio * (1 - t_z), 0.0, top), _clip(1 - (1 + t_z) * ratio)


def s_perp_max(r, t_z, s_z, slack=SLACK):
    """Largest reachable transverse radius at output height ``s_z``."""
    r = as_bloch(r, "r")
    t_z = _check_tz(t_z)
    a2sq, b1sq = _boundary_params(r, t_z, float(s_z), slack)
    if r.perp == 0.0:
        return 0.0
    return r.perp * _transverse(a2sq, b1sq)


def gibbs_feasible(r, t_z, s, slack=SLACK):
    """Whether some SIO fixing ``(0, 0, t_z)`` maps ``r`` to ``s``.

    Points below the transverse maximum are reachable because diagonal
    dephasing fixes every incoherent state and shrinks ``s_perp``.
    """
    r, s = as_bloch(r, "r"), as_bloch(s, "s")
    lo, hi = sz_range(r, t_z)
    if not lo - slack <= s.z <= hi + slack:
        return False
    return s.perp <= s_perp_max(r, t_z, s.z, slack) + slack


@dataclass(frozen=True)
class GibbsRegion:
    """Reachable set from ``r`` under SIO fixing ``(0, 0, t_z)``."""

    r: tuple
    t_z: float
    s_z_lo: float
    s_z_hi: float

    def s_perp_max(self, s_z):
        return s_perp_max(self.r, self.t_z, s_z)

    def __contains__(self, s):
        return gibbs_feasible(self.r, self.t_z, s)


def gibbs_region(r, t_z):
    r = as_bloch(r, "r")
    lo, hi = sz_range(r, t_z)
    return GibbsRegion(r, float(t_z), lo, hi)


def gibbs_boundary_channel(r, t_z, s_z, slack=SLACK):
    """SIO fixing ``(0, 0, t_z)`` that maps ``r`` to ``(s_perp_max, 0, s_z)``."""
    r = as_bloch(r, "r")
    t_z = _check_tz(t_z)
    a2sq, b1sq = _boundary_params(r, t_z, float(s_z), slack)
    a1, a2 = math.sqrt(1 - a2sq), math.sqrt(a2sq)
    b1, b2 = math.sqrt(b1sq), math.sqrt(1 - b1sq)
    ops = [np.array([[a1, 0], [0, b1]], dtype=complex), np.array([[0, b2], [a2, 0]], dtype=complex)]
    core = Channel(2, [k for k in ops if np.linalg.norm(k) > 1e-15])
    if r.perp == 0.0:
        return core
    return compose(z_rotation(-r.azimuth), core)


def gibbs_region_csv(r, t_z, n):
    """``n`` rows ``(s_z, s_perp_max)`` evenly spaced over the height range."""
    if n < 2:
        raise ValueError("n must be at least 2")
    r = as_bloch(r, "r")
    lo, hi = sz_range(r, t_z)
    return [(float(z), s_perp_max(r, t_z, z)) for z in np.linspace(lo, hi, n)]


GIBBS_HEADER = ("s_z", "s_perp_max")
