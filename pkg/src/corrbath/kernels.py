"""Hot loops behind the Liouvillian builders, with numba and numpy paths.

Every kernel exists twice: an ``@njit`` version that walks computational-basis
indices with bit operations, and a pure-numpy version built from dense
matrix products. The numba path is the default when numba imports cleanly.
Set ``CORRBATH_DISABLE_NUMBA=1`` in the environment to force the numpy path,
or switch at runtime with :func:`set_backend` / :func:`use_backend`.

Site ``m`` of an ``n``-qubit register corresponds to the bit mask
``1 << (n - 1 - m)`` of the basis index, so site 0 is the leftmost Kronecker
factor. A set bit is the excited level |1>; the lowering operator clears it.
Superoperators use column stacking: ``vec(rho)[c * d + r] = rho[r, c]``.
"""

from __future__ import annotations

import contextlib
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def _env_disabled():
    return os.environ.get("CORRBATH_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


_USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def numba_enabled():
    return _USE_NUMBA


def backend_name():
    return "numba" if _USE_NUMBA else "numpy"


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"`` for all subsequent kernel calls."""
    global _USE_NUMBA
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    _USE_NUMBA = name == "numba"


@contextlib.contextmanager
def use_backend(name):
    previous = backend_name()
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


# ---------------------------------------------------------------------------
# single-site operators (shared by both paths)


def lowering_ops(n):
    """Stack of the ``n`` embedded lowering operators, shape ``(n, 2**n, 2**n)``."""
    d = 1 << n
    ops = np.zeros((n, d, d), dtype=np.complex128)
    idx = np.arange(d)
    for m in range(n):
        bit = 1 << (n - 1 - m)
        src = idx[(idx & bit) != 0]
        ops[m, src ^ bit, src] = 1.0
    return ops


# ---------------------------------------------------------------------------
# superoperator assembly


@njit(cache=True)
def _fill_superop_nb(n, a_mat, b_mat, h):
    d = 1 << n
    out = np.zeros((d * d, d * d), dtype=np.complex128)
    for r in range(d):
        for c in range(d):
            row = c * d + r
            for k in range(d):
                hrk = h[r, k]
                if hrk != 0:
                    out[row, c * d + k] += -1j * hrk
                hkc = h[k, c]
                if hkc != 0:
                    out[row, k * d + r] += 1j * hkc
    for i in range(n):
        bi = 1 << (n - 1 - i)
        for j in range(n):
            bj = 1 << (n - 1 - j)
            bij = b_mat[i, j]
            aij = a_mat[i, j]
            if bij == 0.0 and aij == 0.0:
                continue
            for r in range(d):
                for c in range(d):
                    row = c * d + r
                    if (r & bi) == 0 and (c & bj) == 0:
                        out[row, (c | bj) * d + (r | bi)] += 2.0 * bij
                    if (r & bi) != 0 and (c & bj) != 0:
                        out[row, (c ^ bj) * d + (r ^ bi)] += 2.0 * aij
            for rp in range(d):
                # K_B = O+^j O-^i  and  K_A = O-^j O+^i, both with a single entry per column
                if (rp & bi) != 0:
                    s = rp ^ bi
                    if (s & bj) == 0:
                        r = s | bj
                        for c in range(d):
                            out[c * d + r, c * d + rp] -= bij
                            out[rp * d + c, r * d + c] -= bij
                else:
                    s = rp | bi
                    if (s & bj) != 0:
                        r = s ^ bj
                        for c in range(d):
                            out[c * d + r, c * d + rp] -= aij
                            out[rp * d + c, r * d + c] -= aij
    return out


def _fill_superop_np(n, a_mat, b_mat, h):
    d = 1 << n
    eye = np.eye(d)
    lower = lowering_ops(n)
    raise_ = lower.conj().transpose(0, 2, 1)

    def sandwich(x, y):  # rho -> x rho y
        return np.kron(y.T, x)

    def anti(k):  # rho -> k rho + rho k
        return np.kron(eye, k) + np.kron(k.T, eye)

    out = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for i in range(n):
        for j in range(n):
            if b_mat[i, j] != 0.0:
                out += b_mat[i, j] * (2.0 * sandwich(lower[i], raise_[j]) - anti(raise_[j] @ lower[i]))
            if a_mat[i, j] != 0.0:
                out += a_mat[i, j] * (2.0 * sandwich(raise_[i], lower[j]) - anti(lower[j] @ raise_[i]))
    return out


def fill_superop(n, a_mat, b_mat, h):
    """Full Liouvillian ``-i[h, .] + D`` as a ``4**n x 4**n`` column-stacked matrix."""
    a_mat = np.ascontiguousarray(a_mat, dtype=np.float64)
    b_mat = np.ascontiguousarray(b_mat, dtype=np.float64)
    h = np.ascontiguousarray(h, dtype=np.complex128)
    if _USE_NUMBA:
        return _fill_superop_nb(n, a_mat, b_mat, h)
    return _fill_superop_np(n, a_mat, b_mat, h)


# ---------------------------------------------------------------------------
# matrix-free action rho -> L(rho)


@njit(cache=True)
def _rhs_nb(rho, n, a_mat, b_mat, h, has_h, out):
    d = rho.shape[0]
    if has_h:
        out[:, :] = -1j * (h @ rho - rho @ h)
    else:
        out[:, :] = 0.0
    for i in range(n):
        bi = 1 << (n - 1 - i)
        for j in range(n):
            bj = 1 << (n - 1 - j)
            bij = b_mat[i, j]
            aij = a_mat[i, j]
            if bij == 0.0 and aij == 0.0:
                continue
            for r in range(d):
                ri = r & bi
                for c in range(d):
                    cj = c & bj
                    if ri == 0 and cj == 0:
                        out[r, c] += 2.0 * bij * rho[r | bi, c | bj]
                    elif ri != 0 and cj != 0:
                        out[r, c] += 2.0 * aij * rho[r ^ bi, c ^ bj]
            for rp in range(d):
                if (rp & bi) != 0:
                    s = rp ^ bi
                    if (s & bj) == 0:
                        r = s | bj
                        for c in range(d):
                            out[r, c] -= bij * rho[rp, c]
                            out[c, rp] -= bij * rho[c, r]
                else:
                    s = rp | bi
                    if (s & bj) != 0:
                        r = s ^ bj
                        for c in range(d):
                            out[r, c] -= aij * rho[rp, c]
                            out[c, rp] -= aij * rho[c, r]
    return out


class _NumbaRhs:
    def __init__(self, n, a_mat, b_mat, h):
        self.n = n
        self.a_mat = np.ascontiguousarray(a_mat, dtype=np.float64)
        self.b_mat = np.ascontiguousarray(b_mat, dtype=np.float64)
        self.h = np.ascontiguousarray(h, dtype=np.complex128)
        self.has_h = bool(np.any(self.h != 0))

    def __call__(self, rho):
        rho = np.ascontiguousarray(rho, dtype=np.complex128)
        out = np.empty_like(rho)
        return _rhs_nb(rho, self.n, self.a_mat, self.b_mat, self.h, self.has_h, out)


class _NumpyRhs:
    # Diagonalizing the real symmetric rate matrices turns the n**2 cross terms
    # into at most n collective jump operators per channel.
    def __init__(self, n, a_mat, b_mat, h):
        lower = lowering_ops(n)
        raise_ = lower.conj().transpose(0, 2, 1)
        jumps, weights = [], []
        for rates, ops in ((b_mat, lower), (a_mat, raise_)):
            w, u = np.linalg.eigh(np.asarray(rates, dtype=np.float64))
            scale = max(np.max(np.abs(w)), 0.0)
            keep = np.abs(w) > 1e-14 * scale if scale > 0 else np.zeros_like(w, dtype=bool)
            if np.any(keep):
                jumps.append(np.einsum("ik,iab->kab", u[:, keep], ops))
                weights.append(w[keep])
        d = 1 << n
        if jumps:
            self.jumps = np.concatenate(jumps)
            self.weights = np.concatenate(weights)
        else:
            self.jumps = np.zeros((0, d, d), dtype=np.complex128)
            self.weights = np.zeros(0)
        self.jumps_dag = self.jumps.conj().transpose(0, 2, 1)
        self.h = np.asarray(h, dtype=np.complex128)
        self.has_h = bool(np.any(self.h != 0))
        self.damping = np.einsum("k,kab,kbc->ac", self.weights, self.jumps_dag, self.jumps)

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=np.complex128)
        out = -(self.damping @ rho + rho @ self.damping)
        if self.has_h:
            out += -1j * (self.h @ rho - rho @ self.h)
        if len(self.weights):
            out += 2.0 * np.einsum("k,kab->ab", self.weights, self.jumps @ rho @ self.jumps_dag)
        return out


def prepare_rhs(n, a_mat, b_mat, h):
    """Return a callable ``rho -> L(rho)`` that never forms the superoperator."""
    if _USE_NUMBA:
        return _NumbaRhs(n, a_mat, b_mat, h)
    return _NumpyRhs(n, a_mat, b_mat, h)


# ---------------------------------------------------------------------------
# partial trace


def _offsets(dims, keep_mask, keep):
    """Full-index offsets contributed by the kept (or traced) digits, in row-major order."""
    nsub = dims.shape[0]
    strides = np.ones(nsub, dtype=np.int64)
    for s in range(nsub - 2, -1, -1):
        strides[s] = strides[s + 1] * dims[s + 1]
    count = 1
    for s in range(nsub):
        if keep_mask[s] == keep:
            count *= dims[s]
    out = np.zeros(count, dtype=np.int64)
    block = 1
    for s in range(nsub - 1, -1, -1):
        if keep_mask[s] != keep:
            continue
        # extend the index list by digit s, which is more significant than those already placed
        for k in range(count - 1, -1, -1):
            digit = (k // block) % dims[s]
            out[k] += digit * strides[s]
        block *= dims[s]
    return out


_offsets_nb = njit(cache=True)(_offsets)


@njit(cache=True)
def _partial_trace_nb(rho, dims, keep_mask):
    kept = _offsets_nb(dims, keep_mask, True)
    traced = _offsets_nb(dims, keep_mask, False)
    dk = kept.shape[0]
    out = np.zeros((dk, dk), dtype=np.complex128)
    for a in range(dk):
        for b in range(dk):
            acc = 0j
            for t in range(traced.shape[0]):
                acc += rho[kept[a] + traced[t], kept[b] + traced[t]]
            out[a, b] = acc
    return out


def _partial_trace_np(rho, dims, keep_mask):
    nsub = len(dims)
    t = rho.reshape(tuple(dims) + tuple(dims))
    # trace out discarded factors from the highest index down so axis numbers stay valid
    for s in reversed(range(nsub)):
        if not keep_mask[s]:
            cur = t.ndim // 2
            t = np.trace(t, axis1=s, axis2=s + cur)
    dk = int(np.prod([dims[s] for s in range(nsub) if keep_mask[s]], dtype=np.int64))
    return t.reshape(dk, dk)


def partial_trace(rho, dims, keep_mask):
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    dims = np.asarray(dims, dtype=np.int64)
    keep_mask = np.asarray(keep_mask, dtype=np.bool_)
    if _USE_NUMBA:
        return _partial_trace_nb(rho, dims, keep_mask)
    return _partial_trace_np(rho, dims, keep_mask)
