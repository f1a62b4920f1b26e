"""Small dense complex linear algebra used throughout the package.

Everything here works on numpy arrays and returns fresh read-only arrays, so
results can be shared freely between threads.
"""

import numpy as np

DEFAULT_RANK_TOL = 1e-10


def as_matrix(a, name="matrix"):
    """Coerce ``a`` to a finite 2-D complex array (a copy)."""
    arr = np.array(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


def _frozen(arr):
    arr.flags.writeable = False
    return arr


def matmul(a, b):
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    return _frozen(a @ b)


def dagger(a):
    """Conjugate transpose."""
    return _frozen(as_matrix(a).conj().T.copy())


def kron(a, b):
    """Kronecker product with the first factor as the major (block) index."""
    return _frozen(np.kron(as_matrix(a, "a"), as_matrix(b, "b")))


def frob_distance(a, b):
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def numeric_rank(a, tol=DEFAULT_RANK_TOL):
    """Number of singular values above ``tol * sigma_max * max(rows, cols)``.

    The threshold is relative so that matrices with uniformly small entries
    (Choi matrices carry a 1/d normalisation) are ranked the same as their
    rescaled versions. The zero matrix has rank 0.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = as_matrix(a)
    sv = np.linalg.svd(a, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0] * max(a.shape)))


def is_unitary(u, tol=1e-10):
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return frob_distance(u.conj().T @ u, np.eye(u.shape[0])) <= tol
