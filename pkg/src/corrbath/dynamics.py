"""Time evolution: full master equation and the reduced (mz, mzz, mc) system."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ConvergenceError, NumericalQualityError, ValidationError
from .liouvillian import PAULI, SIGMA_X, SIGMA_Y, SIGMA_Z, embed, gibbs_state, singlet_state

TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-9
DEFAULT_DT = 0.01


@dataclass(frozen=True)
class BlochState:
    mz: float
    mzz: float
    mc: float

    def __post_init__(self):
        slack = 1e-9
        errors = []
        if abs(self.mz) > 1 + slack:
            errors.append(f"mz={self.mz} outside [-1, 1]")
        if abs(self.mzz) > 0.25 + slack:
            errors.append(f"mzz={self.mzz} outside [-1/4, 1/4]")
        if abs(self.mc) > 0.5 + slack:
            errors.append(f"mc={self.mc} outside [-1/2, 1/2]")
        if errors:
            raise ValidationError(errors)

    def as_array(self):
        return np.array([self.mz, self.mzz, self.mc])

    @classmethod
    def from_array(cls, x):
        return cls(float(x[0]), float(x[1]), float(x[2]))

    @property
    def conserved(self):
        """``mzz + mc``, constant in time when alpha = 1."""
        return self.mzz + self.mc


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    def observables(self):
        """``(len(times), 3)`` array of (mz, mzz, mc)."""
        if self.states.ndim == 2:
            return self.states
        return np.array([bloch_observables(rho).as_array() for rho in self.states])

    def check_positivity(self, tol=1e-9):
        margin = self.diagnostics.get("min_eigenvalue")
        if margin is not None and margin < -tol:
            raise NumericalQualityError(f"state lost positivity: min eigenvalue {margin:.3e} < -{tol:g}")


# ---------------------------------------------------------------------------
# observables


@functools.lru_cache(maxsize=None)
def _collective_ops(n):
    z = sum(embed(SIGMA_Z, i, n) for i in range(n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    zz = sum((embed(SIGMA_Z, i, n) @ embed(SIGMA_Z, j, n) for i, j in pairs), np.zeros((1 << n,) * 2))
    xy = sum(
        (embed(SIGMA_X, i, n) @ embed(SIGMA_X, j, n) + embed(SIGMA_Y, i, n) @ embed(SIGMA_Y, j, n) for i, j in pairs),
        np.zeros((1 << n,) * 2),
    )
    return z, zz, xy, max(len(pairs), 1)


def _num_spins(rho):
    d = np.asarray(rho).shape[0]
    n = d.bit_length() - 1
    if 1 << n != d:
        raise ValueError(f"dimension {d} is not a power of two")
    return n


def bloch_observables(rho):
    """(mz, mzz, mc) of a register.

    For two spins these are the symmetric observables
    ``mz = Tr[(sz x I + I x sz) rho] / 2``, ``mzz = Tr[(sz x sz) rho] / 4``
    and ``mc = Tr[(sx x sx + sy x sy) rho] / 4``. For ``n`` spins the
    one-body term is averaged over sites and the two-body terms over pairs.
    """
    n = _num_spins(rho)
    rho = np.asarray(rho)
    z, zz, xy, npairs = _collective_ops(n)
    mz = np.real(np.trace(z @ rho)) / n
    if n < 2:
        return BlochState(mz, 0.0, 0.0)
    return BlochState(mz, 0.25 * np.real(np.trace(zz @ rho)) / npairs, 0.25 * np.real(np.trace(xy @ rho)) / npairs)


def pair_observables(rho):
    """All fifteen two-spin observables, split into symmetric and asymmetric families.

    Returns ``(symmetric, asymmetric)`` dicts keyed like ``"z"``, ``"xy"``,
    ``"zz"``. ``M_ab^(+/-) = Tr[(s_a x s_b +/- s_b x s_a) rho] / 4``.
    """
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError("pair_observables needs a two-qubit density matrix")
    eye = np.eye(2)
    sym, asym = {}, {}
    for a, sa in PAULI.items():
        one = np.kron(sa, eye)
        two = np.kron(eye, sa)
        sym[a] = 0.5 * np.real(np.trace((one + two) @ rho))
        asym[a] = 0.5 * np.real(np.trace((one - two) @ rho))
    keys = list(PAULI)
    for ia, a in enumerate(keys):
        for b in keys[ia:]:
            ab = np.kron(PAULI[a], PAULI[b])
            if a == b:
                sym[a + b] = 0.25 * np.real(np.trace(ab @ rho))
            else:
                ba = np.kron(PAULI[b], PAULI[a])
                sym[a + b] = 0.25 * np.real(np.trace((ab + ba) @ rho))
                asym[a + b] = 0.25 * np.real(np.trace((ab - ba) @ rho))
    return sym, asym


def x_state_from_bloch(x):
    """Two-qubit density matrix carrying exactly the Bloch values and no other coherence."""
    mz, mzz, mc = x.mz, x.mzz, x.mc
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[0, 0] = 0.25 * (1 + 2 * mz + 4 * mzz)
    rho[3, 3] = 0.25 * (1 - 2 * mz + 4 * mzz)
    rho[1, 1] = rho[2, 2] = 0.25 * (1 - 4 * mzz)
    rho[1, 2] = rho[2, 1] = mc
    return rho


# ---------------------------------------------------------------------------
# states


def density_matrix_violations(rho, tol=1e-10):
    rho = np.asarray(rho)
    problems = []
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return [f"not square: shape {rho.shape}"]
    if not np.all(np.isfinite(rho)):
        return ["contains NaN or Inf"]
    trace = np.trace(rho)
    if abs(trace - 1) > tol:
        problems.append(f"trace {trace.real:.12g}{trace.imag:+.3g}j differs from 1")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > tol:
        problems.append(f"not Hermitian (defect {herm:.3e})")
    else:
        low = float(np.min(np.linalg.eigvalsh(linalg.hermitian_part(rho))))
        if low < -tol:
            problems.append(f"not positive (min eigenvalue {low:.3e})")
    return problems


def validate_density_matrix(rho, tol=1e-10):
    problems = density_matrix_violations(rho, tol)
    if problems:
        raise ValidationError([f"rho0: {p}" for p in problems])
    return np.asarray(rho, dtype=np.complex128)


def product_state(vectors):
    """Product of single-spin states with Bloch vectors ``vectors`` (|r| <= 1)."""
    rho = np.ones((1, 1), dtype=np.complex128)
    for r in vectors:
        r = np.asarray(r, dtype=float)
        if np.linalg.norm(r) > 1 + 1e-12:
            raise ValidationError(f"Bloch vector {r.tolist()} has length > 1")
        single = 0.5 * (np.eye(2) + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z)
        rho = np.kron(rho, single)
    return rho


PRESETS = ("all-up", "all-down", "singlet-pairs", "product", "mixed", "thermal")


def initial_state(name, n, *, omega0=1.0, beta=math.inf, vectors=None):
    """Named initial density matrix for ``n`` spins.

    ``all-up`` has every spin along +z (``|0...0>``). ``singlet-pairs`` puts
    sites (0, 1), (2, 3), ... in singlets and a leftover odd site up.
    ``product`` takes per-spin Bloch ``vectors``.
    """
    d = 1 << n
    if name == "all-up":
        return product_state([(0, 0, 1)] * n)
    if name == "all-down":
        return product_state([(0, 0, -1)] * n)
    if name == "mixed":
        return np.eye(d, dtype=np.complex128) / d
    if name == "thermal":
        return gibbs_state(n, omega0, beta)
    if name == "product":
        if vectors is None or len(vectors) != n:
            raise ValidationError(f"product preset needs {n} Bloch vectors")
        return product_state(vectors)
    if name == "singlet-pairs":
        rho = np.ones((1, 1), dtype=np.complex128)
        for _ in range(n // 2):
            rho = np.kron(rho, singlet_state(2))
        if n % 2:
            rho = np.kron(rho, product_state([(0, 0, 1)]))
        return rho
    raise ValidationError(f"unknown initial-state preset {name!r}; choose from {', '.join(PRESETS)}")


def random_density_matrix(d, rng=None, rank=None):
    """Random full-rank (or rank-``rank``) density matrix from a Ginibre draw."""
    rng = np.random.default_rng(rng)
    k = d if rank is None else rank
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def symmetrize(rho, n=None):
    """Average over all site permutations generated by adjacent swaps (n = 2: one swap)."""
    from .liouvillian import swap_operator

    n = _num_spins(rho) if n is None else n
    if n != 2:
        raise ValueError("symmetrize is implemented for two spins")
    p = swap_operator(2, 0, 1)
    return 0.5 * (rho + p @ rho @ p)


# ---------------------------------------------------------------------------
# reduced system


def bloch_generator(rates, alpha):
    """Affine generator ``dx/dt = A x + b`` for x = (mz, mzz, mc)."""
    r1, m0 = rates.r1, rates.m0
    a = r1 * np.array(
        [
            [-2.0, 0.0, 4.0 * m0 * alpha],
            [m0, -4.0, 2.0 * alpha],
            [-m0 * alpha, 4.0 * alpha, -2.0],
        ]
    )
    b = r1 * np.array([2.0 * m0, 0.0, 0.0])
    return a, b


def _is_singular(a, r1):
    return abs(np.linalg.det(a)) <= 1e-12 * r1**3


def evolve_bloch(rates, alpha, x0, times):
    """Exact solution of the reduced affine system at each requested time."""
    a, b = bloch_generator(rates, alpha)
    x0v = x0.as_array()
    times = np.asarray(times, dtype=float)
    out = np.empty((len(times), 3))
    if _is_singular(a, rates.r1):
        aug = np.zeros((4, 4))
        aug[:3, :3] = a
        aug[:3, 3] = b
        y0 = np.append(x0v, 1.0)
        for k, t in enumerate(times):
            out[k] = (linalg.expm(aug * t).real @ y0)[:3]
        method = "bloch-affine-augmented"
    else:
        fixed = -np.linalg.solve(a, b)
        for k, t in enumerate(times):
            out[k] = linalg.expm(a * t).real @ (x0v - fixed) + fixed
        method = "bloch-fixed-point"
    return Trajectory(times=times, states=out, method=method)


def bloch_steady_state(rates, alpha, x0):
    """Long-time limit of the reduced system.

    For alpha < 1 the limit is the thermal point ``(m0, m0**2/4, 0)``
    whatever ``x0``. For alpha = 1 ``the sum mzz + mc`` is conserved and the
    limit depends on it through that sum.
    """
    m0 = rates.m0
    if alpha < 1.0:
        return BlochState(m0, m0 * m0 / 4.0, 0.0)
    f = x0.conserved
    mc = (4.0 * f - m0 * m0) / (2.0 * (m0 * m0 + 3.0))
    mz = m0 * (4.0 * f + 3.0) / (m0 * m0 + 3.0)
    return BlochState(mz, f - mc, mc)


# ---------------------------------------------------------------------------
# full master equation


def _state_diagnostics(states):
    trace_defect = herm_defect = 0.0
    min_eig = math.inf
    for rho in states:
        trace_defect = max(trace_defect, abs(np.trace(rho) - 1.0))
        herm_defect = max(herm_defect, float(np.max(np.abs(rho - rho.conj().T))))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(linalg.hermitian_part(rho))[0]))
    return {"max_trace_defect": float(trace_defect), "max_hermiticity_defect": herm_defect, "min_eigenvalue": min_eig}


def _check_states(diag):
    if diag["max_trace_defect"] > TRACE_TOL:
        raise NumericalQualityError(f"trace drifted by {diag['max_trace_defect']:.3e}")
    if diag["max_hermiticity_defect"] > HERMITIAN_TOL:
        raise NumericalQualityError(f"Hermiticity lost (defect {diag['max_hermiticity_defect']:.3e})")


def evolve_full(bundle, rho0, times, *, validate=True):
    """``rho(t) = unvec(expm(L t) vec(rho0))`` on a grid starting at t >= 0.

    The propagator for each distinct grid step is computed once and reused,
    so a uniform grid costs a single matrix exponential.
    """
    rho0 = validate_density_matrix(rho0) if validate else np.asarray(rho0, dtype=np.complex128)
    times = np.asarray(times, dtype=float)
    if len(times) == 0:
        raise ValueError("empty time grid")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be non-negative and strictly increasing")
    L = bundle.superop
    cache = {}

    def propagator(dt):
        key = round(dt, 12)
        if key not in cache:
            cache[key] = linalg.expm(L * dt)
        return cache[key]

    v = linalg.vec(rho0).astype(np.complex128)
    if times[0] > 0:
        v = propagator(times[0]) @ v
    states = [linalg.unvec(v, bundle.dim)]
    for dt in np.diff(times):
        v = propagator(dt) @ v
        states.append(linalg.unvec(v, bundle.dim))
    states = np.array(states)
    diag = _state_diagnostics(states)
    diag["propagators"] = len(cache)
    _check_states(diag)
    return Trajectory(times=times, states=states, method="expm-stepping", diagnostics=diag)


def rk4_step(action, rho, dt):
    k1 = action(rho)
    k2 = action(rho + 0.5 * dt * k1)
    k3 = action(rho + 0.5 * dt * k2)
    k4 = action(rho + dt * k3)
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def stable_rk4_step(rates, lamb=None):
    """Step size keeping ``|dt * lambda| <= 2`` for every Liouvillian eigenvalue.

    Uses the bound ``||L|| <= 4 sum_ij (A_ij + B_ij) + 2 ||H||``.
    """
    bound = 4.0 * float(np.sum(np.abs(rates.a_matrix) + np.abs(rates.b_matrix)))
    if lamb is not None:
        bound += 2.0 * float(np.linalg.norm(lamb, 2))
    return 2.0 / bound if bound > 0 else DEFAULT_DT


def relax_to_steady_state(action, rho0, *, dt, tol=1e-12, max_time=1e4, check_every=None):
    """Integrate with RK4 until ``max |L(rho)| <= tol``.

    The fixed points of the RK4 map are exactly the kernel of ``L`` and its
    linear invariants are conserved exactly, so the limit is the same as that
    of the exact flow. Returns ``(rho, info)``.
    """
    rho = np.array(rho0, dtype=np.complex128)
    check_every = check_every or max(1, int(round(0.5 / dt)))
    steps = 0
    min_eig = float(np.linalg.eigvalsh(linalg.hermitian_part(rho))[0])
    max_steps = int(math.ceil(max_time / dt))
    while True:
        residual = float(np.max(np.abs(action(rho))))
        if residual <= tol:
            break
        if steps >= max_steps:
            raise ConvergenceError(f"steady state not reached by t = {steps * dt:g} (residual {residual:.3e})", steps)
        for _ in range(check_every):
            rho = rk4_step(action, rho, dt)
        steps += check_every
        rho = linalg.hermitian_part(rho)
        min_eig = min(min_eig, float(np.linalg.eigvalsh(rho)[0]))
    info = {
        "time": steps * dt,
        "steps": steps,
        "dt": dt,
        "residual": residual,
        "min_eigenvalue": min_eig,
        "trace_defect": float(abs(np.trace(rho) - 1.0)),
    }
    return rho, info
