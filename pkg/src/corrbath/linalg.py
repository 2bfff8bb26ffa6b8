"""Dense complex matrix kernel.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128`` in C
(row-major) layout. Vectorization of operators into Liouville space is column
stacking everywhere in the package: ``vec(X rho Y) = (Y.T kron X) vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernels
from .errors import CapacityError, ConvergenceError, ShapeError

DEFAULT_TOL = 1e-10
MAX_DIM = 4**7


def as_matrix(a, *, square=False, name="matrix"):
    """Validate user data and return it as a C-ordered complex128 matrix."""
    m = np.array(a, dtype=np.complex128, order="C", copy=True)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2D array, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return m


def _require_square(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {a.shape}")
    return a


def check_capacity(dim):
    if dim > MAX_DIM:
        raise CapacityError(f"dimension {dim} exceeds the supported maximum {MAX_DIM} (n = 7 qubits in Liouville space)")


def norm1(a):
    """Induced 1-norm (maximum absolute column sum)."""
    return float(np.linalg.norm(a, 1)) if np.size(a) else 0.0


def kron(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError("kron expects two matrices")
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    check_capacity(max(rows, cols))
    return np.kron(a, b)


def kron_all(*factors):
    out = np.ones((1, 1), dtype=np.complex128)
    for f in factors:
        out = kron(out, f)
    return out


def vec(rho):
    """Column-stack a square matrix."""
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, dim=None):
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise ShapeError(f"vector of length {v.size} is not a vectorized {dim}x{dim} matrix")
    return v.reshape((dim, dim), order="F")


def left_superop(x):
    """Superoperator of ``rho -> x rho``."""
    x = np.asarray(x)
    return kron(np.eye(x.shape[0]), x)


def right_superop(y):
    """Superoperator of ``rho -> rho y``."""
    y = np.asarray(y)
    return kron(y.T, np.eye(y.shape[0]))


def sandwich_superop(x, y):
    """Superoperator of ``rho -> x rho y``."""
    return kron(np.asarray(y).T, np.asarray(x))


def commutator_superop(h):
    """Superoperator of ``rho -> [h, rho]``."""
    return left_superop(h) - right_superop(h)


# ---------------------------------------------------------------------------
# eigenproblems


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray
    right: np.ndarray | None
    left: np.ndarray | None
    tol: float
    max_residual: float | None = None

    def __len__(self):
        return len(self.values)


def eig_general(a, *, vectors=True, left=False, tol=DEFAULT_TOL):
    """All eigenvalues (and optionally vectors) of a general complex matrix.

    Delegates to LAPACK ``geev``. When right vectors are requested the
    residual ``max_k ||A v_k - lambda_k v_k||`` is computed and stored. A
    residual above ``tol * ||A||_1`` does not raise, since defective
    matrices legitimately produce poor eigenvectors; callers that need the
    bound check ``max_residual`` themselves.
    """
    a = _require_square(a)
    check_capacity(a.shape[0])
    try:
        if left:
            w, vl, vr = scipy.linalg.eig(a, left=True, right=True)
        elif vectors:
            w, vr = scipy.linalg.eig(a, right=True)
            vl = None
        else:
            w = scipy.linalg.eigvals(a)
            vl = vr = None
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise ConvergenceError(f"QR iteration failed on {a.shape[0]}x{a.shape[0]} matrix: {exc}") from exc
    residual = None
    if vr is not None:
        residual = float(np.max(np.linalg.norm(a @ vr - vr * w, axis=0))) if len(w) else 0.0
    return EigenSystem(values=np.asarray(w, dtype=np.complex128), right=vr, left=vl, tol=tol, max_residual=residual)


def eigvals(a):
    return eig_general(a, vectors=False).values


def eigh(a):
    """Eigen-decomposition of a Hermitian matrix; values ascending."""
    a = _require_square(a)
    try:
        return np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"Hermitian eigensolver failed: {exc}") from exc


def eigvalsh(a):
    a = _require_square(a)
    return np.linalg.eigvalsh(a)


# ---------------------------------------------------------------------------
# functions of matrices


def expm(a):
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    a = _require_square(a)
    check_capacity(a.shape[0])
    return scipy.linalg.expm(a)


def null_space(a, tol=DEFAULT_TOL):
    """Orthonormal basis (as columns) of ``{v : ||A v|| <= tol * ||A||_1}``.

    Uses the SVD; an empty kernel returns an array with zero columns.
    """
    a = _require_square(a)
    scale = norm1(a)
    if scale == 0.0:
        return np.eye(a.shape[0], dtype=np.complex128)
    try:
        _, s, vh = np.linalg.svd(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD failed: {exc}") from exc
    small = s <= tol * scale
    return vh[small].conj().T


def partial_trace(rho, keep, dims):
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` gives the subsystem dimensions in Kronecker order; ``keep`` is an
    iterable of subsystem indices. The result is ordered like ``dims``.
    """
    rho = _require_square(rho, "rho")
    dims = [int(x) for x in dims]
    if any(x < 1 for x in dims) or int(np.prod(dims)) != rho.shape[0]:
        raise ShapeError(f"subsystem dims {dims} do not match a {rho.shape[0]}x{rho.shape[0]} matrix")
    keep = set(int(k) for k in keep)
    if not keep <= set(range(len(dims))):
        raise ShapeError(f"keep indices {sorted(keep)} out of range for {len(dims)} subsystems")
    mask = [s in keep for s in range(len(dims))]
    return kernels.partial_trace(rho, dims, mask)


def hermitian_part(a):
    a = np.asarray(a)
    return 0.5 * (a + a.conj().T)


def is_hermitian(a, tol=1e-10):
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T), initial=0.0)) <= tol
