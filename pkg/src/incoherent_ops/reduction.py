"""Shrinking (strictly) incoherent Kraus decompositions by unitary remixing.

Two Kraus lists ``{K_j}`` and ``{L_i}`` describe the same channel iff
``L_i = sum_j U_ij K_j`` for a unitary ``U`` (lists padded with zeros). All
routines here only ever apply such unitaries, so the channel is preserved up
to rounding; the art is in choosing mixers that keep every operator
(strictly) incoherent while zeroing as many operators as possible.
"""

import math

import numpy as np

from .channel import (
    DEFAULT_TOL,
    Channel,
    OperatorClass,
    classify_operator,
    is_trace_preserving,
)
from .linalg import as_matrix, is_unitary

# operators with Frobenius norm below this are dropped after every pass
DROP_NORM = 1e-12
# structural zeros that come out of mixing as rounding noise
_SNAP = 1e-13

MODES = {"io": OperatorClass.INCOHERENT, "sio": OperatorClass.STRICTLY_INCOHERENT}


def _mode_level(mode):
    key = getattr(mode, "name", mode)
    try:
        return MODES[str(key).lower()]
    except KeyError:
        raise ValueError(f"mode must be 'io' or 'sio', got {mode!r}") from None


def mix_kraus(channel, u):
    """Return the channel with Kraus operators ``L_i = sum_j u[i, j] K_j``.

    ``u`` may be larger than the number of operators; the list is padded
    with zero operators first. All ``u.shape[0]`` outputs are kept.
    """
    u = as_matrix(u, "u")
    n = len(channel.kraus)
    if u.shape[0] != u.shape[1] or u.shape[0] < n:
        raise ValueError(f"mixing unitary of shape {u.shape} cannot act on {n} operators")
    if not is_unitary(u):
        raise ValueError("mixing matrix is not unitary")
    ks = np.zeros((u.shape[0], channel.dim, channel.dim), dtype=complex)
    ks[:n] = channel.stacked()
    return Channel(channel.dim, list(np.einsum("ij,jab->iab", u, ks)))


# -- helpers operating on mutable lists of arrays ----------------------------

def _snap(k, rel=_SNAP):
    scale = np.abs(k).max(initial=0.0)
    if scale > 0.0:
        k[np.abs(k) <= rel * scale] = 0.0
    return k


def _prune(ops):
    return [k for k in ops if np.linalg.norm(k) > DROP_NORM]


def _rotate_out(ops, p, j, pos):
    """2x2 unitary on operators ``p`` and ``j`` zeroing ``ops[j][pos]``."""
    xp, xj = ops[p][pos], ops[j][pos]
    norm = math.hypot(abs(xp), abs(xj))
    if norm == 0.0:
        return
    kp, kj = ops[p], ops[j]
    ops[p] = (np.conj(xp) * kp + np.conj(xj) * kj) / norm
    ops[j] = (xp * kj - xj * kp) / norm
    ops[j][pos] = 0.0
    _snap(ops[p])
    _snap(ops[j])


def _eliminate(ops, members, pos):
    """Zero ``pos`` in all but one of ``members`` (indices into ``ops``).

    The first member with a nonzero entry at ``pos`` becomes the pivot and
    is returned (``None`` if no member has one).
    """
    pivot = None
    for j in members:
        if ops[j][pos] == 0:
            continue
        if pivot is None:
            pivot = j
        else:
            _rotate_out(ops, pivot, j, pos)
    return pivot


def operator_shape(k, tol=DEFAULT_TOL):
    """Row of the single nonzero entry of each column (``None`` if empty)."""
    k = as_matrix(k)
    if classify_operator(k, tol) == OperatorClass.GENERAL:
        raise ValueError("operator is not incoherent")
    scale = np.abs(k).max()
    shape = []
    for col in k.T:
        nz = np.flatnonzero(np.abs(col) > tol * scale) if scale > 0 else []
        shape.append(int(nz[0]) if len(nz) else None)
    return tuple(shape)


def _first_column(shape):
    for c, r in enumerate(shape):
        if r is not None:
            return c
    return None


def _compatible(partial, key):
    return all(r is None or r == q for r, q in zip(partial, key))


def _fill_tail(tail, d, strict):
    """Complete a partial pattern over the last ``len(tail)`` columns.

    Empty column ``c`` gets row ``c`` when allowed, else the smallest row
    not yet used (strict mode keeps rows distinct).
    """
    offset = d - len(tail)
    used = {r for r in tail if r is not None}
    out = []
    for c, r in enumerate(tail, start=offset):
        if r is None:
            if strict:
                r = next(q for q in [c] + list(range(d)) if q not in used)
                used.add(r)
            else:
                r = c
        out.append(r)
    return tuple(out)


def _prepare(channel, level, tol):
    ops = []
    for j, k in enumerate(channel.kraus):
        if classify_operator(k, tol) < level:
            raise ValueError(f"kraus[{j}] is not {level.name.lower().replace('_', ' ')}")
        k = np.array(k, dtype=complex)
        _snap(k, tol)
        ops.append(k)
    return _prune(ops)


def _reduce_columns(ops, d, strict, tol):
    """Shape-grouped elimination, column by column.

    Returns the surviving operators and, for each, the pattern key (over the
    columns from its first nonzero column on) of the group it ended in.
    """
    final = []
    for k in range(d):
        shapes = [operator_shape(op, tol) for op in ops]
        at_k = [i for i, s in enumerate(shapes) if _first_column(s) == k]
        rest = [i for i in range(len(ops)) if i not in set(at_k)]
        groups = {}
        partial = []
        for i in at_k:
            tail = shapes[i][k:]
            if None in tail:
                partial.append(i)
            else:
                groups.setdefault(tail, []).append(i)
        for i in partial:
            tail = shapes[i][k:]
            key = next((g for g in sorted(groups) if _compatible(tail, g)), None)
            if key is None:
                key = _fill_tail(tail, d, strict)
            groups.setdefault(key, []).append(i)
        for key in sorted(groups):
            members = groups[key]
            pivot = _eliminate(ops, members, (key[0], k))
            if pivot is not None:
                final.append((ops[pivot], key))
        ops = _prune([ops[i] for i in rest] + [ops[i] for key in groups for i in groups[key] if ops[i][key[0], k] == 0])
    return final


def reduce_by_shape(channel, mode="io", tol=DEFAULT_TOL):
    """Minimise the operator count of an IO or SIO decomposition.

    Operators are grouped by their pattern of nonzero entries. For each
    column ``k`` in turn, operators whose first nonzero column is ``k`` and
    that share a pattern are rotated pairwise so that only one of them keeps
    a nonzero entry in column ``k``; the others move on to later columns.
    Afterwards at most one operator per pattern starts in each column, which
    bounds the count by ``d**(d-k+1)`` (IO) or ``d!/(k-1)!`` (SIO) per column
    (1-based ``k``).
    """
    level = _mode_level(mode)
    if not is_trace_preserving(channel, max(tol, 1e-9)):
        raise ValueError("channel is not trace preserving")
    strict = level == OperatorClass.STRICTLY_INCOHERENT
    out = [op for op, _ in _reduce_columns(_prepare(channel, level, tol), channel.dim, strict, tol)]
    # a pass can create operators whose shapes only match in the next one
    while len(out) > 1:
        nxt = [op for op, _ in _reduce_columns([k.copy() for k in out], channel.dim, strict, tol)]
        if len(nxt) >= len(out):
            break
        out = nxt
    return Channel(channel.dim, out)


# -- qubits ---------------------------------------------------------------------

def _require_qubit(channel, level, tol):
    if channel.dim != 2:
        raise ValueError(f"expected a qubit channel, got dimension {channel.dim}")
    if not is_trace_preserving(channel, max(tol, 1e-9)):
        raise ValueError("channel is not trace preserving")
    return _prepare(channel, level, tol)


def _phase_fix(k, pos):
    """Multiply ``k`` by a global phase making ``k[pos]`` real and >= 0."""
    z = k[pos]
    if z != 0:
        k = k * (np.conj(z) / abs(z))
        k[pos] = abs(z)
    return k


def _merge(ops, pos):
    """Reduce operators sharing a one-entry pattern; keep nonzero results."""
    ops = [np.array(k) for k in ops if k is not None]
    _eliminate(ops, range(len(ops)), pos)
    return _prune(ops)


def _mixer(a1, b1, a2, b2, a3):
    """The 3x3 unitary turning (lower-row, diagonal, |1><0|) operators into
    (lower-row, diagonal, |0><0|) ones, or ``None`` where it is undefined.

    Inputs are the entries of ``K1 = [[0,0],[a1,b1]]``, ``K2 = diag(a2,b2)``
    and ``K3 = [[0,0],[a3,0]]``. The matrix is invariant under rescaling
    ``(a1, a3)`` or ``(b1, b2)``, so both pairs are normalised first.
    """
    an, bn = math.hypot(abs(a1), abs(a3)), math.hypot(abs(b1), abs(b2))
    if an == 0.0 or bn == 0.0:
        return None
    a1, a3, b1, b2 = a1 / an, a3 / an, b1 / bn, b2 / bn
    s = abs(a1) ** 2 + abs(a3) ** 2
    t = abs(a3) ** 2 * (abs(b1) ** 2 + abs(b2) ** 2) + abs(a1 * b2) ** 2
    if t == 0.0:
        return None
    l, m, n = 1 / math.sqrt(s), 1 / math.sqrt(s * t), 1 / math.sqrt(t)
    return np.array(
        [
            [l * np.conj(a1), 0.0, l * np.conj(a3)],
            [m * np.conj(b1) * abs(a3) ** 2, m * s * np.conj(b2), -m * np.conj(a3) * np.conj(b1) * a1],
            [n * a3 * b2, -n * a3 * b1, -n * a1 * b2],
        ]
    )


def _keep(k, positions):
    out = np.zeros_like(k)
    for p in positions:
        out[p] = k[p]
    return out


_ZERO2 = np.zeros((2, 2), dtype=complex)


def reduce_qubit_io(channel, tol=DEFAULT_TOL):
    """Canonical decomposition of a qubit IO into at most five operators.

    The result uses the templates, in this order and with missing ones
    dropped::

        [[a1, b1], [0, 0]]   [[0, 0], [a2, b2]]   [[a3, 0], [0, b3]]
        [[0, b4], [a4, 0]]   [[a5, 0], [0, 0]]

    with every ``a_i`` real and non-negative.
    """
    ops = _require_qubit(channel, OperatorClass.INCOHERENT, tol)
    out = _qubit_io_pass(ops, tol)
    # special zero patterns can leave a foldable corner behind; later passes
    # see the new shapes and merge it, so repeat while the count drops
    while len(out) > 1:
        nxt = _qubit_io_pass([k.copy() for k in out], tol)
        if len(nxt) >= len(out):
            break
        out = nxt
    return Channel(2, out)


def _qubit_io_pass(ops, tol):
    final = _reduce_columns(ops, 2, False, tol)
    slots = {}
    for op, key in final:
        slots[key] = op
    upper, diag = slots.get((0, 0)), slots.get((0, 1))
    anti, lower = slots.get((1, 0)), slots.get((1, 1))

    # fold |0><1| into the upper-row operator, |1><1| into the lower-row one;
    # the by-products are |0><0| and |1><0| operators
    corner00, corner10 = [], []
    merged = _merge([upper, slots.get((0,))], (0, 1))
    upper = None
    for k in merged:
        if k[0, 1] != 0:
            upper = k
        else:
            corner00.append(k)
    merged = _merge([lower, slots.get((1,))], (1, 1))
    lower = None
    for k in merged:
        if k[1, 1] != 0:
            lower = k
        else:
            corner10.append(k)
    corner10 = _merge(corner10, (1, 0))

    # without a |1><0| entry in the lower-row operator the mixer cannot remove
    # the corner; push it into the antidiagonal operator instead, the leftover
    # |0><1| piece then folds into the upper-row operator
    if corner10 and anti is not None and (lower is None or lower[1, 0] == 0):
        pair = [anti, corner10.pop()]
        pivot = _eliminate(pair, range(2), (1, 0))
        anti, spill = pair[pivot], pair[1 - pivot]
        if np.linalg.norm(spill) > DROP_NORM:
            merged = _merge([k for k in (upper, spill) if k is not None], (0, 1))
            upper = None
            for k in merged:
                if k[0, 1] != 0:
                    upper = k
                else:
                    corner00.append(k)

    # trade the |1><0| operator for a |0><0| one using the explicit mixer
    if corner10:
        k1 = lower if lower is not None else _ZERO2
        k2 = diag if diag is not None else _ZERO2
        k3 = corner10[0]
        u = _mixer(k1[1, 0], k1[1, 1], k2[0, 0], k2[1, 1], k3[1, 0])
        if u is not None:
            mixed = np.einsum("ij,jab->iab", u, np.stack([k1, k2, k3]))
            lower = _keep(mixed[0], [(1, 0), (1, 1)])
            diag = _keep(mixed[1], [(0, 0), (1, 1)])
            corner00.append(_keep(mixed[2], [(0, 0)]))
        else:
            # b1 = b2 = 0: K1 and K3 are both |1><0| operators, K2 is |0><0|
            merged = _merge([k1, k3], (1, 0))
            lower = merged[0] if merged else None
            diag = None
            corner00.append(k2)
    corner00 = _merge(corner00, (0, 0))
    corner = corner00[0] if corner00 else None

    templates = [(upper, (0, 0)), (lower, (1, 0)), (diag, (0, 0)), (anti, (1, 0)), (corner, (0, 0))]
    return [_phase_fix(k, pos) for k, pos in templates if k is not None and np.linalg.norm(k) > DROP_NORM]


def reduce_qubit_sio(channel, tol=DEFAULT_TOL):
    """Canonical decomposition of a qubit SIO into at most four operators.

    Templates, in order::

        [[a1, 0], [0, b1]]   [[0, b2], [a2, 0]]   [[a3, 0], [0, 0]]   [[0, b3], [0, 0]]

    with the ``a_i`` real and non-negative (``b3`` is made real as well).
    """
    ops = _require_qubit(channel, OperatorClass.STRICTLY_INCOHERENT, tol)
    diag = [k for k in ops if k[1, 0] == 0 and k[0, 1] == 0]
    anti = [k for k in ops if k[0, 0] == 0 and k[1, 1] == 0 and not (k[1, 0] == 0 and k[0, 1] == 0)]

    d_pivot = _eliminate(diag, range(len(diag)), (1, 1))
    d_main = diag[d_pivot] if d_pivot is not None else None
    d_rest = _merge([k for i, k in enumerate(diag) if i != d_pivot], (0, 0))

    a_pivot = _eliminate(anti, range(len(anti)), (1, 0))
    a_main = anti[a_pivot] if a_pivot is not None else None
    a_rest = _merge([k for i, k in enumerate(anti) if i != a_pivot], (0, 1))

    templates = [
        (d_main, (0, 0)),
        (a_main, (1, 0)),
        (d_rest[0] if d_rest else None, (0, 0)),
        (a_rest[0] if a_rest else None, (0, 1)),
    ]
    out = [_phase_fix(k, pos) for k, pos in templates if k is not None and np.linalg.norm(k) > DROP_NORM]
    return Channel(2, out)
