"""Physical parameters and the spatial bath-correlation model.

Units: hbar = k_B = 1. Zero temperature is represented exactly by
``beta = math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

from .errors import CapacityError, ValidationError

MAX_SPINS = 7


@dataclass(frozen=True)
class ModelSpec:
    """Parameter set for ``n_spins`` qubits sharing a spatially-correlated bath.

    Geometry mode gives either explicit 1D ``positions`` or a
    ``uniform_separation`` between neighbouring spins; the correlation factor
    then follows from ``alpha = exp(-r / length)`` with ``length = 2 * bath_spacing *
    beta * bath_hopping``. Override mode fixes ``alpha_override`` for every
    distinct pair instead. The two modes are mutually exclusive.
    """

    n_spins: int = 2
    omega0: float = 1.0
    beta: float = math.inf
    r1: float = 1.0
    bath_spacing: float = 1.0
    bath_hopping: float = 1.0
    positions: tuple[float, ...] | None = None
    uniform_separation: float | None = None
    alpha_override: float | None = None
    lamb_j0: float = 0.0
    lamb_k0: float = 0.0

    def __post_init__(self):
        if self.positions is not None:
            object.__setattr__(self, "positions", tuple(float(p) for p in self.positions))
        errors = self.validation_errors()
        if errors:
            raise ValidationError(errors)

    def validation_errors(self):
        errors = []
        if not isinstance(self.n_spins, (int, np.integer)) or isinstance(self.n_spins, bool) or self.n_spins < 1:
            errors.append(f"n_spins: must be an integer >= 1, got {self.n_spins!r}")
        if not (self.r1 > 0 and math.isfinite(self.r1)):
            errors.append(f"r1: must be finite and > 0, got {self.r1!r}")
        if not (self.beta >= 0):
            errors.append(f"beta: must be >= 0 (inf for T = 0), got {self.beta!r}")
        if not math.isfinite(self.omega0):
            errors.append(f"omega0: must be finite, got {self.omega0!r}")
        for name in ("bath_spacing", "bath_hopping"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                errors.append(f"{name}: must be finite and >= 0, got {value!r}")
        for name in ("lamb_j0", "lamb_k0"):
            if not math.isfinite(getattr(self, name)):
                errors.append(f"{name}: must be finite")
        if self.alpha_override is not None and not (0.0 <= self.alpha_override <= 1.0):
            errors.append(f"alpha_override: must lie in [0, 1], got {self.alpha_override!r}")
        if self.uniform_separation is not None and not (self.uniform_separation >= 0):
            errors.append(f"uniform_separation: must be >= 0, got {self.uniform_separation!r}")
        geometry = (self.positions is not None) + (self.uniform_separation is not None)
        if geometry > 1:
            errors.append("positions and uniform_separation are mutually exclusive")
        if geometry and self.alpha_override is not None:
            errors.append("geometry (positions/uniform_separation) and alpha_override are mutually exclusive")
        if self.positions is not None and isinstance(self.n_spins, int) and len(self.positions) != self.n_spins:
            errors.append(f"positions: expected {self.n_spins} coordinates, got {len(self.positions)}")
        return errors

    @property
    def temperature(self):
        return 0.0 if math.isinf(self.beta) else (math.inf if self.beta == 0 else 1.0 / self.beta)

    @property
    def override_mode(self):
        return self.alpha_override is not None

    def coordinates(self):
        if self.positions is not None:
            return np.asarray(self.positions, dtype=float)
        sep = 0.0 if self.uniform_separation is None else self.uniform_separation
        return sep * np.arange(self.n_spins, dtype=float)

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class RateSet:
    a0: float
    b0: float
    m0: float
    alpha_matrix: np.ndarray = field(repr=False)

    @property
    def r1(self):
        return self.a0 + self.b0

    @property
    def a_matrix(self):
        return self.a0 * self.alpha_matrix

    @property
    def b_matrix(self):
        return self.b0 * self.alpha_matrix


def correlation_length(spec):
    """``length = 2 * bath_spacing * beta * bath_hopping``; ``inf`` at T = 0."""
    if math.isinf(spec.beta):
        return math.inf
    return 2.0 * spec.bath_spacing * spec.beta * spec.bath_hopping


def _alpha_from_distance(distance, length):
    if distance == 0.0:
        return 1.0
    if math.isinf(length):
        return 1.0
    if length == 0.0:
        return 0.0
    return math.exp(-distance / length)


def alpha_of(spec, i, j):
    if not (0 <= i < spec.n_spins and 0 <= j < spec.n_spins):
        raise IndexError(f"sites ({i}, {j}) out of range for {spec.n_spins} spins")
    if i == j:
        return 1.0
    if spec.alpha_override is not None:
        return float(spec.alpha_override)
    x = spec.coordinates()
    return _alpha_from_distance(abs(x[i] - x[j]), correlation_length(spec))


def alpha_matrix(spec):
    n = spec.n_spins
    out = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = alpha_of(spec, i, j)
    return out


def equilibrium_magnetization(omega0, beta):
    if math.isinf(beta):
        return 1.0 if omega0 > 0 else (-1.0 if omega0 < 0 else 0.0)
    return math.tanh(0.5 * beta * omega0)


def rates_from_spec(spec):
    """Split ``r1`` into absorption ``a0`` and emission ``b0`` by detailed balance."""
    m0 = equilibrium_magnetization(spec.omega0, spec.beta)
    # r1 (1 - tanh(x/2)) / 2 == r1 / (1 + e^x), without the cancellation near m0 = 1
    x = 0.0 if spec.omega0 == 0.0 else spec.beta * spec.omega0
    a0 = spec.r1 * float(expit(-x))
    b0 = spec.r1 - a0
    return RateSet(a0=a0, b0=b0, m0=m0, alpha_matrix=alpha_matrix(spec))


def uniform_rates(n, alpha, m0, r1=1.0):
    """RateSet for ``n`` spins with a common pair correlation ``alpha``."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if not -1.0 <= m0 <= 1.0:
        raise ValueError(f"m0 must lie in [-1, 1], got {m0}")
    am = np.full((n, n), float(alpha))
    np.fill_diagonal(am, 1.0)
    a0 = 0.5 * r1 * (1.0 - m0)
    return RateSet(a0=a0, b0=r1 - a0, m0=float(m0), alpha_matrix=am)


def check_spin_capacity(n):
    if n > MAX_SPINS:
        raise CapacityError(f"{n} spins exceed the supported maximum of {MAX_SPINS}")
