"""Monte-Carlo cross-checks for the closed-form qubit regions.

Random SIOs are drawn directly in the four-operator parametrisation
``diag(a1, b1)``, ``[[0, b2], [a2, 0]]``, ``a3|0><0|``, ``b3|0><1|`` with
unit vectors ``a`` (real) and ``b`` (complex). The measures are convenient,
not canonical: normalised Gaussians for both vectors, and for the
Gibbs-preserving family ``a2**2`` uniform on its admissible interval.

Randomness comes from numpy's PCG64 generator seeded with
``SamplerConfig.seed``; all draws for a batch are taken from one stream in a
fixed order, so results do not depend on how the work is later split up.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .bloch import as_bloch, bloch_of, density
from .channel import Channel, apply
from .gibbs import a2_range


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    count: int = 1000
    t_z: Optional[float] = None

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.t_z is not None and not -1.0 <= self.t_z <= 1.0:
            raise ValueError("t_z must lie in [-1, 1]")

    def rng(self):
        return np.random.Generator(np.random.PCG64(self.seed))


def _kraus_batch(a, b):
    """``(n, 4, 2, 2)`` Kraus stack from rows of ``a`` (real) and ``b``."""
    n = a.shape[0]
    ks = np.zeros((n, 4, 2, 2), dtype=complex)
    ks[:, 0, 0, 0] = a[:, 0]
    ks[:, 0, 1, 1] = b[:, 0]
    ks[:, 1, 1, 0] = a[:, 1]
    ks[:, 1, 0, 1] = b[:, 1]
    ks[:, 2, 0, 0] = a[:, 2]
    ks[:, 3, 0, 1] = b[:, 2]
    return ks


def _unit_rows(x):
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def sio_parameters(cfg):
    """Arrays ``a`` (n, 3) real and ``b`` (n, 3) complex, unit rows."""
    rng = cfg.rng()
    a = _unit_rows(rng.standard_normal((cfg.count, 3)))
    b = _unit_rows(rng.standard_normal((cfg.count, 3)) + 1j * rng.standard_normal((cfg.count, 3)))
    return a, b


def gibbs_parameters(cfg):
    """Like :func:`sio_parameters` but every channel fixes ``(0, 0, t_z)``."""
    if cfg.t_z is None:
        raise ValueError("SamplerConfig.t_z is required")
    t_z, n = float(cfg.t_z), cfg.count
    rng = cfg.rng()
    a2sq = rng.uniform(0.0, a2_range(t_z), n)
    if t_z == 1.0:
        a2sq[:] = 0.0
        b1sq = rng.uniform(0.0, 1.0, n)
    elif t_z == -1.0:
        b1sq = np.ones(n)
    else:
        b1sq = np.clip(1 - a2sq * (1 + t_z) / (1 - t_z), 0.0, 1.0)
    sign = rng.choice([-1.0, 1.0], n)
    angle = rng.uniform(0.0, 2 * math.pi, n)
    rest = np.sqrt(1 - a2sq)
    a = np.stack([rest * np.cos(angle), sign * np.sqrt(a2sq), rest * np.sin(angle)], axis=1)
    phase = np.exp(2j * math.pi * rng.uniform(0.0, 1.0, n))
    tail = _unit_rows(rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2)))
    tail *= np.sqrt(1 - b1sq)[:, None]
    b = np.column_stack([np.sqrt(b1sq) * phase, tail])
    return a, b


def _channels(a, b):
    return [Channel(2, list(ks)) for ks in _kraus_batch(a, b)]


def sample_sio_qubit(cfg):
    return _channels(*sio_parameters(cfg))


def sample_gibbs_sio_qubit(cfg):
    return _channels(*gibbs_parameters(cfg))


def _apply_batch(ks, rho):
    out = np.einsum("nkab,bc,nkdc->nad", ks, rho, ks.conj())
    return np.stack([2 * out[:, 1, 0].real, 2 * out[:, 1, 0].imag, (out[:, 0, 0] - out[:, 1, 1]).real], axis=1)


def region_cloud(r, cfg, threads=1):
    """Output Bloch vectors (rows of an ``(count, 3)`` array) of sampled SIOs
    applied to ``r``; Gibbs-preserving SIOs when ``cfg.t_z`` is set."""
    rho = density(r)
    params = sio_parameters(cfg) if cfg.t_z is None else gibbs_parameters(cfg)
    ks = _kraus_batch(*params)
    if threads <= 1:
        return _apply_batch(ks, rho)
    chunks = np.array_split(ks, threads)
    with ThreadPoolExecutor(threads) as pool:
        return np.concatenate(list(pool.map(lambda c: _apply_batch(c, rho), chunks)))


# -- local search ----------------------------------------------------------

def _to_angles(a, b):
    """Six angles describing (a, b) up to the irrelevant phase of b3."""
    return np.array([
        math.acos(np.clip(a[0], -1, 1)),
        math.atan2(a[2], a[1]),
        math.acos(np.clip(abs(b[0]), 0, 1)),
        math.atan2(abs(b[2]), abs(b[1])),
        float(np.angle(b[0])),
        float(np.angle(b[1])),
    ])


def _from_angles(x):
    t1, t2, u1, u2, g1, g2 = x
    a = np.array([math.cos(t1), math.sin(t1) * math.cos(t2), math.sin(t1) * math.sin(t2)])
    b = np.array([
        math.cos(u1) * np.exp(1j * g1),
        math.sin(u1) * math.cos(u2) * np.exp(1j * g2),
        math.sin(u1) * math.sin(u2),
    ])
    return a, b


def sio_from_angles(x):
    a, b = _from_angles(x)
    return Channel(2, list(_kraus_batch(a[None], b[None])[0]))


def brute_force_feasible(r, s, cfg, tol=1e-6, starts=8):
    """One-sided search for an SIO mapping ``r`` within ``tol`` of ``s``.

    Samples ``cfg.count`` channels, then polishes the ``starts`` closest ones
    with Nelder-Mead over six angles. ``True`` is a certificate; ``False``
    only means nothing was found.
    """
    r, s = as_bloch(r, "r"), as_bloch(s, "s")
    rho = density(r)
    target = np.array(s)
    a, b = sio_parameters(cfg)
    dist = np.linalg.norm(_apply_batch(_kraus_batch(a, b), rho) - target, axis=1)
    order = np.argsort(dist, kind="stable")[:starts]
    if dist[order[0]] <= tol:
        return True

    def objective(x):
        out = np.array(bloch_of(apply(sio_from_angles(x), rho)))
        return float(np.sum((out - target) ** 2))

    for i in order:
        res = minimize(
            objective,
            _to_angles(a[i], b[i]),
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-20, "maxiter": 6000, "maxfev": 12000},
        )
        if math.sqrt(max(res.fun, 0.0)) <= tol:
            return True
    return False


def random_incoherent_channel(d, n, strict=False, seed=0):
    """Random trace-preserving IO (or SIO when ``strict``) with ``n`` operators.

    Each operator gets a random pattern (one row per column, distinct rows
    when strict) and Gaussian entries. Completeness is imposed column by
    column: the coefficients of column ``c`` are projected orthogonal to
    those earlier columns that land in the same rows, then normalised. This
    changes values but never the patterns.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(1000):
        rows = np.array([rng.permutation(d) if strict else rng.integers(0, d, d) for _ in range(n)])
        x = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
        for c in range(1, d):
            overlaps = np.array([np.where(rows[:, c] == rows[:, e], x[:, e], 0) for e in range(c)])
            u, sv, _ = np.linalg.svd(overlaps.T, full_matrices=False)
            q = u[:, sv > 1e-12 * max(sv.max(), 1e-300)]
            x[:, c] -= q @ (q.conj().T @ x[:, c])
        norms = np.linalg.norm(x, axis=0)
        # too few operators can leave a column with nothing orthogonal; redraw
        if norms.min() > 1e-8:
            break
    else:
        raise ValueError(f"could not draw an incoherent channel with {n} operators in dimension {d}")
    x /= norms
    ks = np.zeros((n, d, d), dtype=complex)
    for j in range(n):
        ks[j, rows[j], np.arange(d)] = x[j]
    return Channel(d, list(ks))
