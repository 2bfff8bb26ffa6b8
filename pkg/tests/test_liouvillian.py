import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corrbath import linalg, spectra
from corrbath.dynamics import bloch_observables, random_density_matrix
from corrbath.errors import CapacityError
from corrbath.liouvillian import (
    SIGMA_Z,
    apply_dissipator,
    assemble_from_rates,
    assemble_liouvillian,
    build_lamb_shift,
    build_site_operators,
    check_weak_symmetry,
    embed,
    exchange_generator,
    gibbs_state,
    hermiticity_preservation_defect,
    singlet_state,
    swap_operator,
    trace_preservation_defect,
    zeeman_hamiltonian,
)
from corrbath.model import ModelSpec, uniform_rates


def spec(alpha, beta=1.0, n=2, **kw):
    return ModelSpec(n_spins=n, beta=beta, alpha_override=alpha, **kw)


@given(
    n=st.integers(1, 3),
    alpha=st.floats(0, 1),
    beta=st.one_of(st.floats(0, 20), st.just(math.inf)),
    r1=st.floats(0.1, 5),
    j0=st.floats(-1, 1),
    k0=st.floats(-1, 1),
)
def test_generator_preserves_trace_and_hermiticity(n, alpha, beta, r1, j0, k0):
    b = assemble_liouvillian(spec(alpha, beta, n, r1=r1, lamb_j0=j0, lamb_k0=k0))
    assert trace_preservation_defect(b.superop) <= 1e-12 * max(1.0, b.norm)
    assert hermiticity_preservation_defect(b, rng=0) <= 1e-11 * max(1.0, b.norm)


def test_single_spin_spectrum():
    r1 = 1.7
    b = assemble_liouvillian(ModelSpec(n_spins=1, beta=0.8, r1=r1, alpha_override=0.3))
    ev = np.sort(linalg.eigvals(b.superop).real)
    np.testing.assert_allclose(ev, [-2 * r1, -r1, -r1, 0.0], atol=1e-12)


def test_uncorrelated_pair_spectrum_is_sum_of_single_spin_spectra():
    r1 = 1.3
    one = linalg.eigvals(assemble_liouvillian(ModelSpec(n_spins=1, beta=0.8, r1=r1, alpha_override=0.0)).superop)
    two = linalg.eigvals(assemble_liouvillian(spec(0.0, 0.8, r1=r1)).superop)
    sums = np.add.outer(one, one).ravel()
    np.testing.assert_allclose(np.sort_complex(np.round(two, 10)), np.sort_complex(np.round(sums, 10)), atol=1e-9)


def test_superop_matches_direct_dissipator(rng):
    s = ModelSpec(n_spins=3, beta=0.6, positions=(0.0, 0.4, 1.5))
    b = assemble_liouvillian(s)
    ops = build_site_operators(3)
    rho = random_density_matrix(8, rng)
    np.testing.assert_allclose(b.apply(rho), apply_dissipator(rho, ops, b.rates), atol=1e-13)
    np.testing.assert_allclose(b.action()(rho), b.apply(rho), atol=1e-13)


def test_lamb_shift_enters_as_commutator(rng):
    s = spec(0.7, lamb_j0=0.3, lamb_k0=-0.2)
    b = assemble_liouvillian(s)
    ops = build_site_operators(2)
    h = build_lamb_shift(ops, b.rates, 0.3, -0.2)
    assert linalg.is_hermitian(h, 1e-15)
    assert b.lamb_residual == 0.0
    # J L_i^+ L_j - K L_i L_j^+ with J, K proportional to alpha
    manual = sum(
        0.3 * b.rates.alpha_matrix[i, j] * ops.raising[i] @ ops.lowering[j]
        - (-0.2) * b.rates.alpha_matrix[i, j] * ops.lowering[i] @ ops.raising[j]
        for i in range(2)
        for j in range(2)
    )
    np.testing.assert_allclose(h, manual, atol=1e-15)
    rho = random_density_matrix(4, rng)
    expected = apply_dissipator(rho, ops, b.rates) - 1j * (h @ rho - rho @ h)
    np.testing.assert_allclose(b.apply(rho), expected, atol=1e-13)


def test_lamb_shift_defaults_to_zero():
    assert not np.any(assemble_liouvillian(spec(0.5)).lamb)


def test_zeeman_and_gibbs_conventions():
    h = zeeman_hamiltonian(1, 2.0)
    np.testing.assert_allclose(np.diag(h).real, [-1.0, 1.0])
    rho = gibbs_state(2, 1.0, 1.3)
    assert bloch_observables(rho).mz == pytest.approx(math.tanh(0.65), abs=1e-14)
    assert bloch_observables(rho).mzz == pytest.approx(math.tanh(0.65) ** 2 / 4, abs=1e-14)
    np.testing.assert_allclose(gibbs_state(2, 1.0, math.inf), np.diag([1, 0, 0, 0]))
    np.testing.assert_allclose(gibbs_state(2, -1.0, math.inf), np.diag([0, 0, 0, 1]))
    np.testing.assert_allclose(gibbs_state(2, 0.0, math.inf), np.eye(4) / 4)


def test_gibbs_is_steady_for_every_alpha():
    for alpha in (0.0, 0.4, 1.0):
        b = assemble_liouvillian(spec(alpha, 0.9, n=3))
        rho = gibbs_state(3, 1.0, 0.9)
        assert np.max(np.abs(b.apply(rho))) <= 1e-14


@pytest.mark.parametrize("pair", [(0, 1), (0, 2), (1, 2)])
@pytest.mark.parametrize("beta", [0.7, math.inf])
def test_singlet_on_any_pair_is_dark_at_full_correlation(pair, beta):
    b = assemble_liouvillian(spec(1.0, beta, n=3))
    rho = singlet_state(3, pair, rest=gibbs_state(1, 1.0, beta))
    assert abs(np.trace(rho) - 1) < 1e-15
    assert np.max(np.abs(b.apply(rho))) <= 1e-12 * b.norm


def test_singlet_decays_below_full_correlation():
    b = assemble_liouvillian(spec(0.9))
    assert np.max(np.abs(b.apply(singlet_state(2)))) > 1e-3


def test_singlet_state_structure():
    rho = singlet_state(2)
    psi = np.array([0, 1, -1, 0]) / math.sqrt(2)
    np.testing.assert_allclose(rho, np.outer(psi, psi))


def test_swap_and_exchange_operators():
    p = swap_operator(2, 0, 1)
    np.testing.assert_array_equal(p, [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    s = exchange_generator(2)
    # sigma.sigma = 2 P - 1
    np.testing.assert_allclose(s, 2 * p - np.eye(4))
    p3 = swap_operator(3, 0, 2)
    a = np.kron(np.kron(SIGMA_Z, np.eye(2)), np.eye(2))
    np.testing.assert_allclose(p3 @ a @ p3, embed(SIGMA_Z, 2, 3))


@given(alpha=st.floats(0, 1), beta=st.one_of(st.floats(0.01, 10), st.just(math.inf)))
def test_swap_symmetry_everywhere(alpha, beta):
    rep = check_weak_symmetry(assemble_liouvillian(spec(alpha, beta)))
    assert rep.swap_relative <= 1e-12


@given(alpha=st.floats(0, 0.99), beta=st.floats(0.01, 10))
def test_exchange_symmetry_only_at_full_correlation(alpha, beta):
    assert check_weak_symmetry(assemble_liouvillian(spec(1.0, beta))).exchange_relative <= 1e-12
    rep = check_weak_symmetry(assemble_liouvillian(spec(alpha, beta)))
    assert rep.exchange_relative > 1e-6 * (1 - alpha) / 0.01


def test_symmetry_needs_two_spins():
    with pytest.raises(ValueError):
        check_weak_symmetry(assemble_liouvillian(ModelSpec(n_spins=1, alpha_override=0.5)))


def test_unique_steady_state_below_full_correlation():
    b = assemble_liouvillian(spec(0.5, 0.9, n=3))
    rep = spectra.analyze(b)
    assert rep.zero_mode_count == 1
    np.testing.assert_allclose(rep.steady_states[0], gibbs_state(3, 1.0, 0.9), atol=1e-10)


def test_capacity_errors():
    with pytest.raises(CapacityError):
        assemble_from_rates(8, uniform_rates(8, 0.5, 0.5))
    with pytest.raises(CapacityError):
        build_site_operators(0)
