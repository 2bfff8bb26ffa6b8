"""Site operators, Lamb shift, dissipator and the Liouvillian superoperator.

Basis convention: each qubit has basis ``|0>, |1>`` with ``sigma_z =
diag(1, -1)``. ``|0>`` is the low-energy level, so the Zeeman Hamiltonian is
``-(omega0 / 2) * sum_m sigma_z^m``, the lowering operator is
``|0><1| = [[0, 1], [0, 0]]`` and the raising operator is its adjoint. With
this assignment the equilibrium magnetization is ``+tanh(beta * omega0 / 2)``.

The dissipator is

    D rho = sum_ij B_ij (2 L_i rho L_j^+ - {L_j^+ L_i, rho})
          + A_ij (2 L_i^+ rho L_j - {L_j L_i^+, rho})

with ``L_i`` the lowering operator of site ``i``, ``A_ij = alpha_ij * a0`` and
``B_ij = alpha_ij * b0``. Taken literally it reproduces the closed equations
for (mz, mzz, mc) with no extra normalization, hence
``DISSIPATOR_NORMALIZATION = 1``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels, linalg
from .errors import CapacityError
from .model import MAX_SPINS, ModelSpec, RateSet, rates_from_spec

log = logging.getLogger(__name__)

DISSIPATOR_NORMALIZATION = 1.0

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
LOWER = np.array([[0, 1], [0, 0]], dtype=np.complex128)
RAISE = LOWER.conj().T
PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


def embed(op, site, n):
    """``I x ... x op x ... x I`` with ``op`` acting on ``site`` (0-based)."""
    factors = [np.eye(2)] * n
    factors[site] = op
    return linalg.kron_all(*factors)


@dataclass(frozen=True)
class SiteOperators:
    n: int
    raising: np.ndarray = field(repr=False)
    lowering: np.ndarray = field(repr=False)
    sz: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return 1 << self.n


def build_site_operators(n):
    if not 1 <= n <= MAX_SPINS:
        raise CapacityError(f"n must satisfy 1 <= n <= {MAX_SPINS}, got {n}")
    lowering = np.stack([embed(LOWER, m, n) for m in range(n)])
    raising = np.stack([embed(RAISE, m, n) for m in range(n)])
    sz = np.stack([embed(SIGMA_Z, m, n) for m in range(n)])
    return SiteOperators(n=n, raising=raising, lowering=lowering, sz=sz)


def zeeman_hamiltonian(n, omega0):
    d = 1 << n
    total = np.zeros((d, d), dtype=np.complex128)
    for m in range(n):
        total += embed(SIGMA_Z, m, n)
    return -0.5 * omega0 * total


def gibbs_state(n, omega0, beta):
    """Thermal state ``exp(-beta H0) / Z`` of ``n`` free spins; ``beta = inf`` gives the ground state."""
    energies = np.real(np.diag(zeeman_hamiltonian(n, omega0)))
    if np.isinf(beta):
        weights = (energies == energies.min()).astype(float)
    else:
        weights = np.exp(-beta * (energies - energies.min()))
    return np.diag(weights / weights.sum()).astype(np.complex128)


def build_lamb_shift(ops, rates, j0, k0, *, return_residual=False):
    """``sum_ij (J_ij L_i^+ L_j - K_ij L_i L_j^+)`` with ``J = j0 * alpha``, ``K = k0 * alpha``.

    The result is Hermitized; the norm of the discarded anti-Hermitian part
    is logged and optionally returned.
    """
    alpha = rates.alpha_matrix
    d = ops.dim
    h = np.zeros((d, d), dtype=np.complex128)
    if j0 != 0.0 or k0 != 0.0:
        for i in range(ops.n):
            for j in range(ops.n):
                h += j0 * alpha[i, j] * (ops.raising[i] @ ops.lowering[j])
                h -= k0 * alpha[i, j] * (ops.lowering[i] @ ops.raising[j])
    herm = linalg.hermitian_part(h)
    residual = float(np.max(np.abs(h - herm), initial=0.0))
    if residual > 0.0:
        log.info("Lamb shift anti-Hermitian residual %.3e removed", residual)
    if return_residual:
        return herm, residual
    return herm


def build_dissipator_superop(ops, rates):
    zero = np.zeros((ops.dim, ops.dim), dtype=np.complex128)
    return DISSIPATOR_NORMALIZATION * kernels.fill_superop(ops.n, rates.a_matrix, rates.b_matrix, zero)


def apply_dissipator(rho, ops, rates):
    """Dissipator evaluated directly on a density matrix (no vectorization)."""
    a_mat, b_mat = rates.a_matrix, rates.b_matrix
    out = np.zeros_like(np.asarray(rho, dtype=np.complex128))
    for i in range(ops.n):
        for j in range(ops.n):
            lo_i, up_i = ops.lowering[i], ops.raising[i]
            lo_j, up_j = ops.lowering[j], ops.raising[j]
            kb = up_j @ lo_i
            ka = lo_j @ up_i
            out += b_mat[i, j] * (2 * lo_i @ rho @ up_j - kb @ rho - rho @ kb)
            out += a_mat[i, j] * (2 * up_i @ rho @ lo_j - ka @ rho - rho @ ka)
    return DISSIPATOR_NORMALIZATION * out


@dataclass(frozen=True)
class LiouvillianBundle:
    n: int
    superop: np.ndarray = field(repr=False)
    lamb: np.ndarray = field(repr=False)
    rates: RateSet
    spec: ModelSpec | None = None
    lamb_residual: float = 0.0

    @property
    def dim(self):
        return 1 << self.n

    @property
    def a_matrix(self):
        return self.rates.a_matrix

    @property
    def b_matrix(self):
        return self.rates.b_matrix

    @property
    def norm(self):
        return linalg.norm1(self.superop)

    def apply(self, rho):
        return linalg.unvec(self.superop @ linalg.vec(rho), self.dim)

    def action(self):
        """Matrix-free ``rho -> L(rho)``; see :func:`matrix_free_action`."""
        return matrix_free_action(self.n, self.rates, self.lamb)


def matrix_free_action(n, rates, lamb=None):
    d = 1 << n
    if lamb is None:
        lamb = np.zeros((d, d), dtype=np.complex128)
    scale = DISSIPATOR_NORMALIZATION
    return kernels.prepare_rhs(n, scale * rates.a_matrix, scale * rates.b_matrix, lamb)


def assemble_from_rates(n, rates, j0=0.0, k0=0.0, spec=None):
    if not 1 <= n <= MAX_SPINS:
        raise CapacityError(f"n must satisfy 1 <= n <= {MAX_SPINS}, got {n}")
    linalg.check_capacity(4**n)
    ops = build_site_operators(n)
    lamb, residual = build_lamb_shift(ops, rates, j0, k0, return_residual=True)
    scale = DISSIPATOR_NORMALIZATION
    superop = kernels.fill_superop(n, scale * rates.a_matrix, scale * rates.b_matrix, lamb)
    return LiouvillianBundle(n=n, superop=superop, lamb=lamb, rates=rates, spec=spec, lamb_residual=residual)


def assemble_liouvillian(spec):
    """Full generator ``-i[H_lamb, .] + D`` for a :class:`ModelSpec`."""
    rates = rates_from_spec(spec)
    return assemble_from_rates(spec.n_spins, rates, spec.lamb_j0, spec.lamb_k0, spec=spec)


# ---------------------------------------------------------------------------
# structural checks


def trace_preservation_defect(superop):
    """``max |vec(I)^+ L|``: nonzero means the generator leaks trace."""
    d = int(round(np.sqrt(superop.shape[0])))
    left = linalg.vec(np.eye(d)).conj()
    return float(np.max(np.abs(left @ superop)))


def hermiticity_preservation_defect(bundle, rng=None, samples=3):
    rng = np.random.default_rng(rng)
    worst = 0.0
    for _ in range(samples):
        x = rng.normal(size=(bundle.dim, bundle.dim)) + 1j * rng.normal(size=(bundle.dim, bundle.dim))
        h = x + x.conj().T
        out = bundle.apply(h)
        worst = max(worst, float(np.max(np.abs(out - out.conj().T))))
    return worst


def swap_operator(n, i, j):
    """Permutation matrix exchanging the states of sites ``i`` and ``j``."""
    d = 1 << n
    bi, bj = 1 << (n - 1 - i), 1 << (n - 1 - j)
    perm = np.zeros((d, d))
    for s in range(d):
        t = s & ~(bi | bj)
        if s & bi:
            t |= bj
        if s & bj:
            t |= bi
        perm[t, s] = 1.0
    return perm


def exchange_generator(n, i=0, j=1):
    """``S = sx sx + sy sy + sz sz`` on sites ``i`` and ``j``."""
    return sum(embed(p, i, n) @ embed(p, j, n) for p in (SIGMA_X, SIGMA_Y, SIGMA_Z))


@dataclass(frozen=True)
class SymmetryReport:
    swap_commutator: float
    exchange_commutator: float
    superop_norm: float
    pair: tuple[int, int]

    @property
    def swap_relative(self):
        return self.swap_commutator / self.superop_norm

    @property
    def exchange_relative(self):
        return self.exchange_commutator / self.superop_norm


def check_weak_symmetry(bundle, pair=(0, 1)):
    """Commutator norms of ``L`` with label exchange and with ``[S, .]``.

    The swap check uses the conjugation ``rho -> P rho P``. The exchange
    check uses the generator ``rho -> [S, rho]`` of ``U(t) = exp(-i S t)``.
    Norms are induced 1-norms.
    """
    i, j = pair
    if bundle.n < 2:
        raise ValueError("symmetry checks need at least two spins")
    perm = swap_operator(bundle.n, i, j)
    p_super = linalg.sandwich_superop(perm, perm)
    s_super = linalg.commutator_superop(exchange_generator(bundle.n, i, j))
    L = bundle.superop
    return SymmetryReport(
        swap_commutator=linalg.norm1(L @ p_super - p_super @ L),
        exchange_commutator=linalg.norm1(L @ s_super - s_super @ L),
        superop_norm=bundle.norm,
        pair=(i, j),
    )


def singlet_state(n=2, pair=(0, 1), rest=None):
    """``|psi-><psi-|`` on ``pair``; other sites in ``rest`` (defaults to ``|0><0|`` each)."""
    i, j = pair
    d = 1 << n
    bi, bj = 1 << (n - 1 - i), 1 << (n - 1 - j)
    others = [m for m in range(n) if m not in pair]
    if rest is None:
        rest = np.zeros((1 << len(others),) * 2, dtype=np.complex128)
        rest[0, 0] = 1.0
    rho = np.zeros((d, d), dtype=np.complex128)
    # psi = (|..0_i..1_j..> - |..1_i..0_j..>) / sqrt(2), tensored with rest on the other sites
    m = len(others)

    def place(bits_other):
        s = 0
        for k, site in enumerate(others):
            if (bits_other >> (m - 1 - k)) & 1:
                s |= 1 << (n - 1 - site)
        return s

    for a in range(1 << m):
        for b in range(1 << m):
            if rest[a, b] == 0:
                continue
            sa, sb = place(a), place(b)
            for ket_bits, ket_sign in ((sa | bj, 1.0), (sa | bi, -1.0)):
                for bra_bits, bra_sign in ((sb | bj, 1.0), (sb | bi, -1.0)):
                    rho[ket_bits, bra_bits] += 0.5 * ket_sign * bra_sign * rest[a, b]
    return rho
