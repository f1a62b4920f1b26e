"""scikit-learn style wrappers.

The region oracles are fitted on an initial Bloch vector and then predict,
for a batch of target Bloch vectors, whether each one is reachable. The
Kraus reducer is a stateless transformer over channels. All of them get
``get_params``/``set_params`` from :class:`sklearn.base.BaseEstimator` and
can be cloned or grid-searched like any other estimator.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .bloch import NORM_SLACK, as_bloch
from .channel import DEFAULT_TOL, Channel
from .conversion import Regime, construct_channel, region_csv
from .gibbs import gibbs_boundary_channel, gibbs_region_csv, s_perp_max, sz_range
from .reduction import reduce_by_shape, reduce_qubit_io, reduce_qubit_sio


def check_bloch_array(S, name="S"):
    """Validate a batch of Bloch vectors; returns a float ``(n, 3)`` array."""
    arr = np.asarray(S, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"{name} must have shape (n, 3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if np.any(np.einsum("ij,ij->i", arr, arr) > 1 + NORM_SLACK):
        raise ValueError(f"{name} has rows outside the Bloch ball")
    return arr


def check_initial_state(X):
    """Accept a single Bloch vector as ``(3,)`` or ``(1, 3)``."""
    arr = check_bloch_array(X, "X")
    if arr.shape[0] != 1:
        raise ValueError("fit expects exactly one initial Bloch vector")
    return as_bloch(arr[0])


def check_channels(X):
    """Return ``(list_of_channels, was_single)``."""
    if isinstance(X, Channel):
        return [X], True
    chans = list(X)
    for c in chans:
        if not isinstance(c, Channel):
            raise TypeError(f"expected Channel instances, got {type(c).__name__}")
    return chans, False


class ConversionRegion(BaseEstimator):
    """Reachability oracle for qubit SIO/IO/MIO from a fitted initial state.

    Parameters
    ----------
    regime : {"sio", "io", "mio"}
    slack : float
        Absolute tolerance on both defining inequalities.
    """

    def __init__(self, regime="sio", slack=1e-12):
        self.regime = regime
        self.slack = slack

    def fit(self, X, y=None):
        Regime(str(self.regime).lower())
        self.r_ = check_initial_state(X)
        return self

    def decision_function(self, S):
        """Smallest inequality margin per target; non-negative inside."""
        check_is_fitted(self)
        S = check_bloch_array(S)
        r = self.r_
        r_perp2 = r.x**2 + r.y**2
        s_perp2 = S[:, 0] ** 2 + S[:, 1] ** 2
        radial = r_perp2 - s_perp2
        height = r_perp2 - (1 - r.z**2) * s_perp2 - S[:, 2] ** 2 * r_perp2
        return np.minimum(radial, height)

    def predict(self, S):
        return self.decision_function(S) >= -self.slack

    def boundary(self, n=100):
        """``(n, 3)`` array of ``theta, s_perp, s_z_max``."""
        check_is_fitted(self)
        return np.array(region_csv(self.r_, n))

    def synthesize(self, s):
        check_is_fitted(self)
        return construct_channel(self.r_, s)


class GibbsConversionRegion(BaseEstimator):
    """Reachability oracle for qubit SIO that fix the state ``(0, 0, t_z)``."""

    def __init__(self, t_z=0.0, slack=1e-12):
        self.t_z = t_z
        self.slack = slack

    def fit(self, X, y=None):
        if not -1.0 <= self.t_z <= 1.0:
            raise ValueError("t_z must lie in [-1, 1]")
        self.r_ = check_initial_state(X)
        self.s_z_range_ = sz_range(self.r_, self.t_z)
        return self

    def transverse_bound(self, s_z):
        check_is_fitted(self)
        return np.array([s_perp_max(self.r_, self.t_z, z, self.slack) for z in np.atleast_1d(s_z)])

    def predict(self, S):
        check_is_fitted(self)
        S = check_bloch_array(S)
        lo, hi = self.s_z_range_
        inside = (S[:, 2] >= lo - self.slack) & (S[:, 2] <= hi + self.slack)
        out = np.zeros(len(S), dtype=bool)
        for i in np.flatnonzero(inside):
            bound = s_perp_max(self.r_, self.t_z, S[i, 2], self.slack)
            out[i] = np.hypot(S[i, 0], S[i, 1]) <= bound + self.slack
        return out

    def boundary(self, n=100):
        """``(n, 2)`` array of ``s_z, s_perp_max``."""
        check_is_fitted(self)
        return np.array(gibbs_region_csv(self.r_, self.t_z, n))

    def synthesize(self, s_z):
        check_is_fitted(self)
        return gibbs_boundary_channel(self.r_, self.t_z, s_z, self.slack)


class KrausReducer(TransformerMixin, BaseEstimator):
    """Shrink (strictly) incoherent Kraus decompositions.

    Qubit channels get the canonical five-operator (IO) or four-operator
    (SIO) forms unless ``canonical_qubit=False``; other dimensions use the
    shape-grouped elimination.
    """

    def __init__(self, mode="io", tol=DEFAULT_TOL, canonical_qubit=True):
        self.mode = mode
        self.tol = tol
        self.canonical_qubit = canonical_qubit

    def fit(self, X, y=None):
        if str(self.mode).lower() not in ("io", "sio"):
            raise ValueError(f"mode must be 'io' or 'sio', got {self.mode!r}")
        check_channels(X)
        self.fitted_ = True
        return self

    def _reduce(self, c):
        mode = str(self.mode).lower()
        if c.dim == 2 and self.canonical_qubit:
            return (reduce_qubit_io if mode == "io" else reduce_qubit_sio)(c, self.tol)
        return reduce_by_shape(c, mode, self.tol)

    def transform(self, X):
        check_is_fitted(self)
        chans, single = check_channels(X)
        out = [self._reduce(c) for c in chans]
        return out[0] if single else out


__all__ = [
    "ConversionRegion",
    "GibbsConversionRegion",
    "KrausReducer",
    "check_bloch_array",
    "check_channels",
    "check_initial_state",
]
