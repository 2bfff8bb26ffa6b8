"""Built-in invariant suite run by ``corrbath validate``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dynamics, kernels, linalg, spectra
from .liouvillian import (
    assemble_from_rates,
    check_weak_symmetry,
    hermiticity_preservation_defect,
    singlet_state,
    trace_preservation_defect,
)
from .model import uniform_rates


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


def _check(name, value, threshold, detail="", above=False):
    passed = value > threshold if above else value <= threshold
    return CheckResult(name, bool(passed), float(value), float(threshold), detail)


def run_suite(m0=0.6, r1=1.0, seed=7):
    """Run every structural and closed-form check on two spins; returns a list of results."""
    rng = np.random.default_rng(seed)
    results = []
    bundles = {a: assemble_from_rates(2, uniform_rates(2, a, m0, r1)) for a in (0.0, 0.3, 0.5, 1.0)}

    worst = max(trace_preservation_defect(b.superop) for b in bundles.values())
    results.append(_check("trace preservation |vec(I)^+ L|", worst, 1e-12))
    worst = max(hermiticity_preservation_defect(b, rng) for b in bundles.values())
    results.append(_check("Hermiticity preservation", worst, 1e-12))

    crit = bundles[1.0]
    dark = singlet_state(2)
    residual = float(np.max(np.abs(crit.superop @ linalg.vec(dark)))) / crit.norm
    results.append(_check("dark singlet stationary at alpha=1 (relative)", residual, 1e-10))

    x_dark = dynamics.bloch_observables(dark)
    err = float(np.max(np.abs(x_dark.as_array() - [0.0, -0.25, -0.5])))
    results.append(_check("dark singlet Bloch values (0, -1/4, -1/2)", err, 1e-14))

    report = spectra.analyze(bundles[0.5])
    x_ss = dynamics.bloch_observables(report.steady_states[0])
    err = float(np.max(np.abs(x_ss.as_array() - [m0, m0 * m0 / 4, 0.0])))
    results.append(_check("thermal steady state at alpha=0.5", err, 1e-8))
    results.append(_check("unique zero mode at alpha=0.5", abs(report.zero_mode_count - 1), 0))

    report1 = spectra.analyze(crit)
    results.append(_check("degenerate kernel at alpha=1 (zero modes)", report1.zero_mode_count, 1, above=True))

    proj = spectra.kernel_projector(crit.superop)
    worst = 0.0
    for _ in range(5):
        rho0 = dynamics.symmetrize(dynamics.random_density_matrix(4, rng))
        x0 = dynamics.bloch_observables(rho0)
        limit = dynamics.bloch_observables(linalg.unvec(proj @ linalg.vec(rho0), 4))
        predicted = dynamics.bloch_steady_state(crit.rates, 1.0, x0)
        worst = max(worst, float(np.max(np.abs(limit.as_array() - predicted.as_array()))))
    results.append(_check("critical steady state from conserved sum", worst, 1e-8))

    rho0 = dynamics.random_density_matrix(4, rng)
    traj = dynamics.evolve_full(crit, rho0, np.linspace(0.0, 20.0 / r1, 201))
    f = traj.observables()[:, 1] + traj.observables()[:, 2]
    results.append(_check("mzz + mc conserved at alpha=1", float(np.max(np.abs(f - f[0]))), 1e-8))

    worst = 0.0
    for a in (0.0, 0.5, 1.0):
        b = bundles[a]
        rho0 = dynamics.random_density_matrix(4, rng)
        times = np.linspace(0.0, 20.0 / r1, 101)
        full = dynamics.evolve_full(b, rho0, times).observables()
        reduced = dynamics.evolve_bloch(b.rates, a, dynamics.bloch_observables(rho0), times).observables()
        worst = max(worst, float(np.max(np.abs(full - reduced))))
    results.append(_check("reduced system matches full dynamics", worst, 1e-6))

    sym = check_weak_symmetry(crit)
    results.append(_check("exchange symmetry [L, S] at alpha=1 (relative)", sym.exchange_relative, 1e-10))
    results.append(_check("label swap symmetry at alpha=0.3 (relative)", check_weak_symmetry(bundles[0.3]).swap_relative, 1e-10))
    results.append(
        _check("exchange symmetry broken at alpha=0.3 (relative)", check_weak_symmetry(bundles[0.3]).exchange_relative, 1e-6, above=True)
    )

    if kernels.HAVE_NUMBA:
        b = bundles[0.3]
        with kernels.use_backend("numpy"):
            ref = assemble_from_rates(2, b.rates).superop
        with kernels.use_backend("numba"):
            fast = assemble_from_rates(2, b.rates).superop
        results.append(_check("numba and numpy superoperators agree", float(np.max(np.abs(ref - fast))), 1e-13))
    return results
