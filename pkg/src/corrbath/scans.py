"""Parameter sweeps: temperature (transition), entropy versus atom number, spectrum clouds."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import dynamics, kernels, spectra
from .dynamics import BlochState, bloch_observables, bloch_steady_state, initial_state
from .errors import ValidationError
from .liouvillian import assemble_liouvillian, gibbs_state, matrix_free_action
from .measures import concurrence, purity, von_neumann_entropy
from .model import check_spin_capacity, rates_from_spec, uniform_rates


@dataclass
class SweepResult:
    axis: str
    grid: np.ndarray
    columns: dict
    derivatives: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def column_names(self):
        return list(self.columns) + [f"d{k}_d{self.axis}" for k in self.derivatives]

    def rows(self):
        data = list(self.columns.values()) + list(self.derivatives.values())
        return [tuple(col[k] for col in data) for k in range(len(self.grid))]


def geometric_temperatures(t0, k_max=12):
    """``T_k = t0 * 2**-k`` for ``k = 0..k_max`` (decreasing)."""
    return t0 * 2.0 ** -np.arange(k_max + 1)


def central_differences(x, y):
    """Central difference ``dy/dx`` at interior points; NaN at both ends."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.full(len(x), np.nan)
    if len(x) >= 3:
        out[1:-1] = (y[2:] - y[:-2]) / (x[2:] - x[:-2])
    return out


def _resolve_initial(initial, n=2, omega0=1.0, beta=math.inf):
    if isinstance(initial, str):
        return initial_state(initial, n, omega0=omega0, beta=beta), initial
    if isinstance(initial, BlochState):
        rho = dynamics.x_state_from_bloch(initial)
        return dynamics.validate_density_matrix(rho), f"bloch{asdict(initial)}"
    return dynamics.validate_density_matrix(initial), "explicit-density-matrix"


def temperature_sweep(spec, temperatures, initial="mixed", include_zero=True):
    """Steady-state observables of two spins across temperature.

    Rows with T > 0 take alpha from the model (or the override) and use the
    thermal branch; the optional T = 0 row (beta = inf) is evaluated on its
    own and uses the conserved sum mzz + mc of the initial state. Derivative columns
    are central differences over the T > 0 rows only; the finite difference
    across the T = 0 boundary is reported in ``metadata["boundary_slopes"]``.
    """
    spec = spec.with_(n_spins=2)
    temps = np.asarray(temperatures, dtype=float)
    if np.any(temps <= 0):
        raise ValidationError("temperature grid must hold T > 0 values; T = 0 is added via include_zero")
    d = np.diff(temps)
    if len(temps) > 1 and not (np.all(d > 0) or np.all(d < 0)):
        raise ValidationError("temperature grid must be strictly monotone")
    rho0, label = _resolve_initial(initial, 2, spec.omega0, spec.beta)
    x0 = bloch_observables(rho0)

    names = ("T", "beta", "alpha", "m0", "mz", "mzz", "mc", "concurrence", "entropy", "purity", "trace", "min_eig", "full_mismatch")
    rows = []
    points = [(t, 1.0 / t) for t in temps]
    if include_zero:
        zero = (0.0, math.inf)
        points = points + [zero] if len(temps) < 2 or temps[0] > temps[-1] else [zero] + points
    for t, beta in points:
        spec_t = spec.with_(beta=beta)
        rates = rates_from_spec(spec_t)
        alpha = float(rates.alpha_matrix[0, 1])
        x = bloch_steady_state(rates, alpha, x0)
        rho = spectra.project_to_kernel(assemble_liouvillian(spec_t), rho0)
        rho = spectra.physical_state(rho)
        mismatch = float(np.max(np.abs(bloch_observables(rho).as_array() - x.as_array())))
        rows.append(
            (t, beta, alpha, rates.m0, x.mz, x.mzz, x.mc, concurrence(rho), von_neumann_entropy(rho), purity(rho),
             float(np.trace(rho).real), float(np.linalg.eigvalsh(rho)[0]), mismatch)
        )
    table = np.array(rows, dtype=float)
    columns = {name: table[:, k] for k, name in enumerate(names)}
    positive = columns["T"] > 0
    derivatives = {}
    for key in ("mz", "mzz", "mc"):
        col = np.full(len(table), np.nan)
        col[positive] = central_differences(columns["T"][positive], columns[key][positive])
        derivatives[key] = col
    meta = {"initial_state": label, "initial_bloch": asdict(x0), "conserved_sum": x0.conserved, "backend": kernels.backend_name()}
    if include_zero and np.any(positive):
        t_min_idx = np.flatnonzero(positive)[np.argmin(columns["T"][positive])]
        z_idx = int(np.flatnonzero(~positive)[0])
        t_min = float(columns["T"][t_min_idx])
        meta["t_min"] = t_min
        meta["jumps"] = {k: float(columns[k][z_idx] - columns[k][t_min_idx]) for k in ("mz", "mzz", "mc")}
        meta["boundary_slopes"] = {k: abs(v) / t_min for k, v in meta["jumps"].items()}
    return SweepResult(axis="T", grid=columns["T"], columns=columns, derivatives=derivatives, metadata=meta)


def steady_state_entropy(n, alpha, m0, *, r1=1.0, preset="all-up", method="auto", tol=1e-12):
    """Entropy of the long-time state of ``n`` spins with uniform pair correlation ``alpha``.

    ``method="auto"`` uses the thermal product state for alpha < 1 and a
    matrix-free relaxation from ``preset`` for alpha = 1; ``"evolve"`` relaxes
    in both cases. Returns ``(entropy, info)``.
    """
    check_spin_capacity(n)
    rates = uniform_rates(n, alpha, m0, r1)
    # thermal state parameterized by m0 alone: omega0 = +/-1 and beta * omega0 = 2 atanh(m0)
    omega = 1.0 if m0 >= 0 else -1.0
    beta_omega = 2.0 * math.atanh(abs(m0)) if abs(m0) < 1 else math.inf
    if method == "auto" and alpha < 1.0:
        rho = gibbs_state(n, omega, beta_omega)
        info = {"method": "gibbs", "time": 0.0, "residual": 0.0, "min_eigenvalue": float(np.linalg.eigvalsh(rho)[0]), "trace_defect": 0.0}
    else:
        rho0 = initial_state(preset, n, omega0=omega, beta=beta_omega)
        action = matrix_free_action(n, rates)
        rho, info = dynamics.relax_to_steady_state(action, rho0, dt=dynamics.stable_rk4_step(rates), tol=tol * r1)
        info["method"] = "rk4-relaxation"
    info["purity"] = purity(rho)
    return von_neumann_entropy(rho), info


def entropy_vs_n(spec, n_grid, alphas=(1.0, 0.5), preset="all-up", method="auto", threads=1):
    """Tidy table of steady-state entropy over (n, alpha)."""
    m0 = rates_from_spec(spec).m0
    for n in n_grid:
        check_spin_capacity(int(n))
    jobs = [(int(n), float(a)) for n in n_grid for a in alphas]

    def one(job):
        n, a = job
        s, info = steady_state_entropy(n, a, m0, r1=spec.r1, preset=preset, method=method)
        return (n, a, s, info["purity"], info["time"], info["residual"], info["min_eigenvalue"], info["trace_defect"])

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        rows = list(pool.map(one, jobs))
    names = ("n", "alpha", "entropy", "purity", "relax_time", "residual", "min_eig", "trace_defect")
    table = np.array(rows, dtype=float) if rows else np.zeros((0, len(names)))
    columns = {name: table[:, k] for k, name in enumerate(names)}
    meta = {"initial_state": preset, "m0": m0, "method": method, "backend": kernels.backend_name()}
    return SweepResult(axis="n", grid=columns["n"], columns=columns, metadata=meta)


def spectrum_cloud(spec, alphas, threads=1, tol_abs=spectra.TOL_ABS, tol_rel=spectra.TOL_REL):
    """Eigenvalue rows ``(alpha, re, im, is_zero_mode)`` for each alpha, in input order."""

    def one(a):
        s = spec.with_(alpha_override=float(a), positions=None, uniform_separation=None)
        return spectra.analyze(assemble_liouvillian(s), tol_abs, tol_rel)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        reports = list(pool.map(one, alphas))
    rows = []
    for a, rep in zip(alphas, reports):
        rows.extend(rep.rows(float(a)))
    return rows, reports


def fig2_parameter_sets():
    """The three (r1, m0, alpha) triples used for the time-trace figure."""
    return [(1.0, 1.0, 1.0), (5.0, 0.8, 0.5), (10.0, 0.8, 0.5)]


def bloch_time_traces(times, x0, parameter_sets=None):
    """Reduced-system trajectories for each ``(r1, m0, alpha)`` triple."""
    out = []
    for r1, m0, alpha in parameter_sets or fig2_parameter_sets():
        rates = uniform_rates(2, alpha, m0, r1)
        out.append(((r1, m0, alpha), dynamics.evolve_bloch(rates, alpha, x0, times)))
    return out


__all__ = [
    "SweepResult",
    "bloch_time_traces",
    "central_differences",
    "entropy_vs_n",
    "geometric_temperatures",
    "spectrum_cloud",
    "steady_state_entropy",
    "temperature_sweep",
]
