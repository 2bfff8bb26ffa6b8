"""Liouvillian spectrum: zero modes, spectral gap, steady states."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import NumericalQualityError, StructuralError
from .liouvillian import assemble_liouvillian

log = logging.getLogger(__name__)

TOL_ABS = 1e-10
TOL_REL = 1e-10
CLIP_TOL = 1e-8


@dataclass
class SpectrumReport:
    """Result of :func:`analyze`.

    ``adr`` (also exposed as ``gap``) is the spectral gap: the smallest
    ``|Re lambda|`` once a single steady-state eigenvalue is set aside. It
    is therefore ~0 whenever the kernel is degenerate. ``relaxation_rate``
    is the smallest ``|Re lambda|`` outside the zero cluster, i.e. the
    slowest genuine decay.
    """

    eigenvalues: np.ndarray = field(repr=False)
    zero_mode_count: int
    adr: float
    relaxation_rate: float
    steady_states: list = field(repr=False)
    raw_kernel: np.ndarray = field(repr=False)
    tol_used: float
    superop_norm: float
    trace_sum_defect: float

    @property
    def gap(self):
        return self.adr

    @property
    def kernel_dimension(self):
        return self.raw_kernel.shape[1]

    @property
    def sorted_abs(self):
        return np.sort(np.abs(self.eigenvalues))

    def zero_mask(self):
        return np.abs(self.eigenvalues) <= self.tol_used

    def rows(self, alpha):
        mask = self.zero_mask()
        return [(alpha, float(z.real), float(z.imag), bool(m)) for z, m in zip(self.eigenvalues, mask)]


def zero_cutoff(norm, tol_abs=TOL_ABS, tol_rel=TOL_REL):
    return tol_abs + tol_rel * norm


def physical_state(m, clip_tol=CLIP_TOL):
    """Hermitize, trace-normalize and clip tiny negative eigenvalues of ``m``."""
    h = linalg.hermitian_part(m)
    tr = np.trace(h).real
    if abs(tr) < 1e-12:
        raise StructuralError("kernel element has zero trace and cannot be normalized to a state")
    h = h / tr
    w, v = np.linalg.eigh(h)
    if w[0] < -clip_tol:
        raise NumericalQualityError(f"steady state has eigenvalue {w[0]:.3e} below -{clip_tol:g}")
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        h = (v * w) @ v.conj().T
        h /= np.trace(h).real
    return h


def kernel_projector(superop, tol=None):
    """Spectral projector onto the kernel of ``superop`` (semisimple zero eigenvalue).

    ``P = R (Lh^+ R)^-1 Lh^+`` with ``R`` and ``Lh`` the right and left null
    spaces. For a Lindbladian without purely imaginary eigenvalues this is the
    infinite-time propagator.
    """
    norm = linalg.norm1(superop)
    rel = (zero_cutoff(norm) / norm) if tol is None else tol
    right = linalg.null_space(superop, rel)
    left = linalg.null_space(superop.conj().T, rel)
    if right.shape[1] == 0 or right.shape[1] != left.shape[1]:
        raise StructuralError(
            f"left/right kernel dimensions differ ({left.shape[1]} vs {right.shape[1]}); zero eigenvalue is defective or tol is off"
        )
    overlap = left.conj().T @ right
    return right @ np.linalg.solve(overlap, left.conj().T)


def project_to_kernel(bundle, rho, projector=None):
    """Infinite-time limit of ``rho`` under the bundle's Liouvillian."""
    proj = kernel_projector(bundle.superop) if projector is None else projector
    return linalg.unvec(proj @ linalg.vec(rho), bundle.dim)


def _independent(states, tol=1e-8):
    chosen, basis = [], np.zeros((0, 0))
    for s in states:
        v = np.concatenate([linalg.vec(s).real, linalg.vec(s).imag])
        trial = v[:, None] if basis.size == 0 else np.column_stack([basis, v])
        if np.linalg.matrix_rank(trial, tol=tol) == trial.shape[1]:
            basis = trial
            chosen.append(s)
    return chosen


def analyze(bundle, tol_abs=TOL_ABS, tol_rel=TOL_REL):
    L = bundle.superop
    norm = linalg.norm1(L)
    cut = zero_cutoff(norm, tol_abs, tol_rel)
    values = linalg.eig_general(L, vectors=False).values
    absval = np.abs(values)
    zero = absval <= cut
    count = int(np.sum(zero))
    if count == 0:
        raise StructuralError(f"no eigenvalue within {cut:.3e} of zero; trace preservation is broken")
    if np.max(values.real) > cut:
        raise StructuralError(f"growing mode with Re(lambda) = {np.max(values.real):.3e}")

    order = np.lexsort((absval, np.abs(values.real)))
    # set aside the single eigenvalue closest to zero, then take the smallest |Re|
    anchor = int(np.argmin(absval))
    rest = [k for k in order if k != anchor]
    adr = float(abs(values[rest[0]].real)) if rest else 0.0
    outside = np.abs(values.real[~zero])
    relaxation = float(outside.min()) if outside.size else 0.0

    kernel = linalg.null_space(L, cut / norm)
    if kernel.shape[1] != count:
        log.warning("null space dimension %d differs from zero-mode count %d", kernel.shape[1], count)
    if kernel.shape[1] == 1:
        states = [physical_state(linalg.unvec(kernel[:, 0], bundle.dim))]
    else:
        proj = kernel_projector(L, cut / norm)
        d = bundle.dim
        probes = [np.eye(d) / d]
        for k in range(d):
            e = np.zeros((d, d))
            e[k, k] = 1.0
            probes.append(e)
        images = [physical_state(linalg.unvec(proj @ linalg.vec(p), d)) for p in probes]
        states = _independent(images)
    return SpectrumReport(
        eigenvalues=values,
        zero_mode_count=count,
        adr=adr,
        relaxation_rate=relaxation,
        steady_states=states,
        raw_kernel=kernel,
        tol_used=cut,
        superop_norm=norm,
        trace_sum_defect=float(abs(values.sum() - np.trace(L))),
    )


def _override(spec, alpha):
    return spec.with_(alpha_override=float(alpha), positions=None, uniform_separation=None)


def adr_vs_alpha(spec, alphas, threads=1, tol_abs=TOL_ABS, tol_rel=TOL_REL):
    """Rows ``(alpha, adr)`` in input order."""
    alphas = [float(a) for a in alphas]
    if any(not 0.0 <= a <= 1.0 for a in alphas):
        raise ValueError("alpha grid must lie in [0, 1]")
    diffs = np.diff(alphas)
    if len(alphas) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ValueError("alpha grid must be strictly monotone")

    def one(a):
        return a, analyze(assemble_liouvillian(_override(spec, a)), tol_abs, tol_rel).adr

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(one, alphas))
