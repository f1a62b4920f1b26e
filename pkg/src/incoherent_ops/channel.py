"""Quantum channels in Kraus form: validity, incoherence classes, Choi matrix.

Conventions
-----------
* A channel on a ``d``-level system is an ordered list of ``d x d`` Kraus
  operators ``K_j`` acting as ``rho -> sum_j K_j rho K_j^dagger``.
* The Choi matrix is ``(Lambda x id)(Phi+)`` with ``Phi+`` the normalised
  maximally entangled state, so its trace is 1 for trace-preserving channels.
  The channel acts on the first tensor factor; composite index ``a*d + b``.
"""

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_RANK_TOL, as_matrix, frob_distance, numeric_rank

DEFAULT_TOL = 1e-9


class OperatorClass(enum.IntEnum):
    """Incoherence level of a single Kraus operator (larger is stricter)."""

    GENERAL = 0
    INCOHERENT = 1
    STRICTLY_INCOHERENT = 2


class ChannelClass(enum.IntEnum):
    """Strongest free-operation class a channel was certified to belong to."""

    GENERAL = 0
    MIO = 1
    IO = 2
    SIO = 3


@dataclass(frozen=True)
class Channel:
    """Channel given by a dimension and an ordered tuple of Kraus operators.

    Trace preservation is *not* enforced here; use :func:`is_trace_preserving`.
    Intermediate results of the reduction routines may be unnormalised.
    """

    dim: int
    kraus: tuple

    def __init__(self, dim, kraus):
        dim = int(dim)
        if dim < 1:
            raise ValueError("dim must be positive")
        ops = []
        for j, k in enumerate(kraus):
            k = as_matrix(k, f"kraus[{j}]")
            if k.shape != (dim, dim):
                raise ValueError(f"kraus[{j}] has shape {k.shape}, expected {(dim, dim)}")
            k.flags.writeable = False
            ops.append(k)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "kraus", tuple(ops))

    def __len__(self):
        return len(self.kraus)

    def __repr__(self):
        return f"Channel(dim={self.dim}, n_kraus={len(self.kraus)})"

    @classmethod
    def identity(cls, dim):
        return cls(dim, [np.eye(dim)])

    @classmethod
    def dephasing(cls, dim):
        """Complete dephasing in the reference basis."""
        return cls(dim, [np.diag(np.eye(dim)[i]) for i in range(dim)])

    def stacked(self):
        """Kraus operators as one ``(n, d, d)`` array."""
        if not self.kraus:
            return np.zeros((0, self.dim, self.dim), dtype=complex)
        return np.stack(self.kraus)


def apply(channel, rho):
    """Return ``sum_j K_j rho K_j^dagger``."""
    rho = as_matrix(rho, "rho")
    if rho.shape != (channel.dim, channel.dim):
        raise ValueError(f"rho has shape {rho.shape}, channel dimension is {channel.dim}")
    out = np.zeros_like(rho)
    for k in channel.kraus:
        out += k @ rho @ k.conj().T
    return out


def completeness(channel):
    """``sum_j K_j^dagger K_j``."""
    ks = channel.stacked()
    return np.einsum("jba,jbc->ac", ks.conj(), ks)


def is_trace_preserving(channel, tol=DEFAULT_TOL):
    if tol <= 0:
        raise ValueError("tol must be positive")
    return frob_distance(completeness(channel), np.eye(channel.dim)) <= tol


def _support(k, tol):
    k = np.abs(np.asarray(k))
    scale = k.max() if k.size else 0.0
    if scale == 0.0:
        return np.zeros(k.shape, dtype=bool)
    return k > tol * scale


def classify_operator(k, tol=DEFAULT_TOL):
    """Incoherence level of one operator.

    An entry counts as nonzero when its magnitude exceeds ``tol`` times the
    largest magnitude in ``k``. Incoherent means at most one nonzero per
    column; strictly incoherent additionally at most one per row.
    """
    k = as_matrix(k)
    if k.shape[0] != k.shape[1]:
        raise ValueError(f"operator must be square, got {k.shape}")
    nz = _support(k, tol)
    if np.any(nz.sum(axis=0) > 1):
        return OperatorClass.GENERAL
    if np.any(nz.sum(axis=1) > 1):
        return OperatorClass.INCOHERENT
    return OperatorClass.STRICTLY_INCOHERENT


def creates_coherence(channel, tol=DEFAULT_TOL):
    """True if some basis projector is mapped to a state with coherences.

    By linearity this is equivalent to the channel mapping some incoherent
    state outside the incoherent set.
    """
    d = channel.dim
    for i in range(d):
        out = apply(channel, np.diag(np.eye(d)[i]))
        off = out - np.diag(np.diag(out))
        if np.max(np.abs(off), initial=0.0) > tol:
            return True
    return False


def classify_channel(channel, tol=DEFAULT_TOL):
    """Strongest label among SIO, IO, MIO for the given Kraus decomposition.

    SIO and IO are certified from the operators as given; a channel whose
    listed operators are not all incoherent can still be reported as MIO.
    """
    if not is_trace_preserving(channel, tol):
        raise ValueError("channel is not trace preserving")
    level = min((classify_operator(k, tol) for k in channel.kraus), default=OperatorClass.STRICTLY_INCOHERENT)
    if level == OperatorClass.STRICTLY_INCOHERENT:
        return ChannelClass.SIO
    if level == OperatorClass.INCOHERENT:
        return ChannelClass.IO
    if not creates_coherence(channel, tol):
        return ChannelClass.MIO
    return ChannelClass.GENERAL


def choi(channel):
    """Normalised Choi matrix of shape ``(d*d, d*d)``."""
    d = channel.dim
    vecs = channel.stacked().reshape(len(channel.kraus), d * d) / math.sqrt(d)
    mat = np.einsum("ja,jb->ab", vecs, vecs.conj())
    mat.flags.writeable = False
    return mat


def kraus_rank(channel, tol=DEFAULT_RANK_TOL):
    return numeric_rank(choi(channel), tol)


def channels_equal(a, b, tol=DEFAULT_TOL):
    """Same map, certified by comparing Choi matrices."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return frob_distance(choi(a), choi(b)) <= tol


def choi_distance(a, b):
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return frob_distance(choi(a), choi(b))


def permutation_lower_bound_channel(d):
    """SIO with Kraus operators ``|i+j mod d><j| / sqrt(d)``.

    Its Choi matrix has full rank ``d**2``, so no decomposition with fewer
    than ``d**2`` Kraus operators exists.
    """
    d = int(d)
    if d < 2:
        raise ValueError("d must be at least 2")
    ops = []
    for i in range(d):
        for j in range(d):
            k = np.zeros((d, d), dtype=complex)
            k[(j + i) % d, j] = 1 / math.sqrt(d)
            ops.append(k)
    return Channel(d, ops)


def io_kraus_bound(d):
    """Upper bound on the incoherent Kraus rank of any IO in dimension ``d``."""
    d = int(d)
    if d < 2:
        raise ValueError("d must be at least 2")
    if d == 2:
        return 5
    return min(d**4 + 1, d * (d**d - 1) // (d - 1))


def sio_kraus_bound(d):
    """Upper bound on the strictly incoherent Kraus rank of any SIO."""
    d = int(d)
    if d < 2:
        raise ValueError("d must be at least 2")
    shapes = sum(math.factorial(d) // math.factorial(k - 1) for k in range(1, d + 1))
    return min(d**4 + 1, shapes)


def column_counts(channel, tol=DEFAULT_TOL):
    """``C_k``: operators whose first nonzero column is ``k`` (0-based list)."""
    counts = [0] * channel.dim
    for k in channel.kraus:
        nz = _support(k, tol).any(axis=0)
        if nz.any():
            counts[int(np.argmax(nz))] += 1
    return counts


# -- JSON -------------------------------------------------------------------

def matrix_to_json(m):
    m = np.asarray(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(rows):
    try:
        return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix entry: {exc}") from None


def channel_to_dict(channel):
    return {"dim": channel.dim, "kraus": [matrix_to_json(k) for k in channel.kraus]}


def channel_from_dict(data):
    if not isinstance(data, dict) or "dim" not in data or "kraus" not in data:
        raise ValueError("channel JSON needs 'dim' and 'kraus' keys")
    return Channel(data["dim"], [matrix_from_json(k) for k in data["kraus"]])


def dumps_channel(channel, **kwargs):
    return json.dumps(channel_to_dict(channel), **kwargs)


def loads_channel(text):
    return channel_from_dict(json.loads(text))


def save_channel(channel, path):
    with open(path, "w") as fh:
        fh.write(dumps_channel(channel, indent=1))
        fh.write("\n")


def load_channel(path):
    with open(path) as fh:
        return loads_channel(fh.read())
