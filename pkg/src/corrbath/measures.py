"""Entanglement and entropy of (reduced) density matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalQualityError, ShapeError
from .liouvillian import SIGMA_Y

_YY = np.kron(SIGMA_Y, SIGMA_Y)
CLIP_TOL = 1e-10
ENTROPY_CUTOFF = 1e-12


def concurrence(rho):
    """Wootters concurrence of a two-qubit state."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (4, 4):
        raise ShapeError(f"concurrence needs a 4x4 density matrix, got {rho.shape}")
    flipped = _YY @ rho.conj() @ _YY
    ev = np.linalg.eigvals(rho @ flipped).real
    if ev.min() < -CLIP_TOL:
        raise NumericalQualityError(f"rho * rho_tilde has eigenvalue {ev.min():.3e} < -{CLIP_TOL:g}")
    lam = np.sort(np.sqrt(np.clip(ev, 0.0, None)))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass(frozen=True)
class EntanglementCheck:
    lhs: float
    rhs: float
    entangled: bool
    outside_physical_region: bool


def persistent_entanglement_check(x):
    """Compare ``4|mc|`` with ``sqrt((1 + 4 mzz)**2 - 4 mz**2)``.

    A negative radicand sets ``rhs = 0`` and raises the
    ``outside_physical_region`` flag instead of failing.
    """
    lhs = 4.0 * abs(x.mc)
    radicand = (1.0 + 4.0 * x.mzz) ** 2 - 4.0 * x.mz**2
    outside = radicand < 0.0
    rhs = 0.0 if outside else math.sqrt(radicand)
    return EntanglementCheck(lhs=lhs, rhs=rhs, entangled=lhs > rhs, outside_physical_region=outside)


def von_neumann_entropy(rho):
    """``-Tr(rho ln rho)`` in nats; eigenvalues below 1e-12 count as zero."""
    p = np.linalg.eigvalsh(0.5 * (rho + np.asarray(rho).conj().T))
    p = p[p > ENTROPY_CUTOFF]
    return float(-np.sum(p * np.log(p))) + 0.0


def binary_entropy(p):
    return float(-sum(q * math.log(q) for q in (p, 1.0 - p) if q > 0.0))


def purity(rho):
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


@dataclass(frozen=True)
class MeasureRecord:
    concurrence: float | None
    persistent_entanglement_lhs: float
    persistent_entanglement_rhs: float
    entropy: float
    purity: float


def measure(rho, x=None):
    """Bundle all diagnostics for ``rho``; ``x`` defaults to its Bloch values."""
    from .dynamics import bloch_observables

    x = bloch_observables(rho) if x is None else x
    check = persistent_entanglement_check(x)
    c = concurrence(rho) if np.asarray(rho).shape == (4, 4) else None
    return MeasureRecord(
        concurrence=c,
        persistent_entanglement_lhs=check.lhs,
        persistent_entanglement_rhs=check.rhs,
        entropy=von_neumann_entropy(rho),
        purity=purity(rho),
    )
