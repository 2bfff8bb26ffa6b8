import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from corrbath import kernels, linalg
from corrbath.errors import CapacityError, ShapeError

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def complex_matrices(rows, cols):
    return st.tuples(arrays(float, (rows, cols), elements=finite), arrays(float, (rows, cols), elements=finite)).map(
        lambda p: p[0] + 1j * p[1]
    )


@st.composite
def matrix_pair(draw):
    shapes = [draw(st.integers(1, 3)) for _ in range(4)]
    a = draw(complex_matrices(shapes[0], shapes[1]))
    b = draw(complex_matrices(shapes[2], shapes[3]))
    return a, b


@given(matrix_pair())
def test_kron_matches_index_formula(pair):
    a, b = pair
    out = linalg.kron(a, b)
    p, q = b.shape
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            for k in range(p):
                for m in range(q):
                    assert abs(out[i * p + k, j * q + m] - a[i, j] * b[k, m]) <= 1e-13 * (1 + abs(a[i, j] * b[k, m]))


def test_kron_rejects_vectors():
    with pytest.raises(ShapeError):
        linalg.kron(np.ones(3), np.ones((2, 2)))


def test_capacity_limit():
    linalg.check_capacity(linalg.MAX_DIM)
    with pytest.raises(CapacityError):
        linalg.check_capacity(linalg.MAX_DIM + 1)


@given(st.integers(1, 4).flatmap(lambda d: complex_matrices(d, d)))
def test_vec_roundtrip_is_column_stacking(rho):
    v = linalg.vec(rho)
    d = rho.shape[0]
    assert all(v[c * d + r] == rho[r, c] for r in range(d) for c in range(d))
    np.testing.assert_array_equal(linalg.unvec(v), rho)


def test_unvec_rejects_non_square_length():
    with pytest.raises(ShapeError):
        linalg.unvec(np.ones(5))


@given(st.integers(1, 3).flatmap(lambda d: st.tuples(*[complex_matrices(d, d)] * 3)))
def test_superoperators_act_like_products(mats):
    x, y, rho = mats
    v = linalg.vec(rho)
    tol = 1e-9 * (1 + np.abs(x).max() * np.abs(y).max() * np.abs(rho).max())
    np.testing.assert_allclose(linalg.unvec(linalg.sandwich_superop(x, y) @ v), x @ rho @ y, atol=tol)
    np.testing.assert_allclose(linalg.unvec(linalg.left_superop(x) @ v), x @ rho, atol=tol)
    np.testing.assert_allclose(linalg.unvec(linalg.right_superop(y) @ v), rho @ y, atol=tol)
    np.testing.assert_allclose(linalg.unvec(linalg.commutator_superop(x) @ v), x @ rho - rho @ x, atol=tol)


@given(st.floats(-3, 3), st.floats(0, np.pi), st.floats(0, 2 * np.pi))
def test_expm_matches_rodrigues(theta, polar, azimuth):
    n = np.array([np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth), np.cos(polar)])
    sx = np.array([[0, 1], [1, 0]])
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.array([[1, 0], [0, -1]])
    ns = n[0] * sx + n[1] * sy + n[2] * sz
    expected = np.cos(theta) * np.eye(2) + 1j * np.sin(theta) * ns
    np.testing.assert_allclose(linalg.expm(1j * theta * ns), expected, atol=1e-12)


def test_expm_of_diagonal():
    d = np.array([0.0, -1.0, -2.5 + 1j])
    np.testing.assert_allclose(linalg.expm(np.diag(d)), np.diag(np.exp(d)), atol=1e-14)


def test_eig_general_residual_and_left_vectors(rng):
    a = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    es = linalg.eig_general(a, left=True)
    assert es.max_residual <= 1e-10 * linalg.norm1(a)
    resid = es.left.conj().T @ a - es.values[:, None] * es.left.conj().T
    assert np.max(np.abs(resid)) <= 1e-10 * linalg.norm1(a)
    assert len(es) == 12
    np.testing.assert_allclose(np.sort_complex(linalg.eigvals(a)), np.sort_complex(es.values), atol=1e-10)


def test_eig_general_rejects_non_square():
    with pytest.raises(ShapeError):
        linalg.eig_general(np.ones((2, 3)))


def test_eigh_ascending(rng):
    x = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = x + x.conj().T
    w, v = linalg.eigh(h)
    assert np.all(np.diff(w) >= 0)
    np.testing.assert_allclose(h @ v, v * w, atol=1e-10)
    np.testing.assert_allclose(linalg.eigvalsh(h), w, atol=1e-12)


@given(st.integers(2, 7), st.integers(0, 6), st.integers(0, 2**31))
def test_null_space_of_low_rank_product(d, deficit, seed):
    rng = np.random.default_rng(seed)
    rank = max(0, d - min(deficit, d))
    a = rng.normal(size=(d, rank)) @ rng.normal(size=(rank, d)) if rank else np.zeros((d, d))
    k = linalg.null_space(a, 1e-10)
    assert k.shape == (d, d - rank)
    if k.shape[1]:
        assert np.max(np.abs(a @ k)) <= 1e-9 * max(1.0, linalg.norm1(a))
        np.testing.assert_allclose(k.conj().T @ k, np.eye(k.shape[1]), atol=1e-12)


def test_null_space_full_rank_is_empty():
    assert linalg.null_space(np.eye(3)).shape == (3, 0)


def brute_partial_trace(rho, keep, dims):
    d = int(np.prod(dims))
    kept = [s for s in range(len(dims)) if s in keep]
    dk = int(np.prod([dims[s] for s in kept]))
    out = np.zeros((dk, dk), dtype=complex)
    digits = [np.unravel_index(i, dims) for i in range(d)]
    for r in range(d):
        for c in range(d):
            if all(digits[r][s] == digits[c][s] for s in range(len(dims)) if s not in keep):
                rk = np.ravel_multi_index([digits[r][s] for s in kept], [dims[s] for s in kept]) if kept else 0
                ck = np.ravel_multi_index([digits[c][s] for s in kept], [dims[s] for s in kept]) if kept else 0
                out[rk, ck] += rho[r, c]
    return out


@given(
    st.lists(st.integers(1, 3), min_size=1, max_size=4).flatmap(
        lambda dims: st.tuples(st.just(dims), st.sets(st.integers(0, len(dims) - 1)), st.integers(0, 2**31))
    )
)
def test_partial_trace_matches_brute_force(case):
    dims, keep, seed = case
    rng = np.random.default_rng(seed)
    d = int(np.prod(dims))
    rho = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    expected = brute_partial_trace(rho, keep, dims)
    for name in ("numba", "numpy") if kernels.HAVE_NUMBA else ("numpy",):
        with kernels.use_backend(name):
            np.testing.assert_allclose(linalg.partial_trace(rho, keep, dims), expected, atol=1e-12)


def test_partial_trace_of_product_state(rng, backend):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3))
    b /= np.trace(b)
    np.testing.assert_allclose(linalg.partial_trace(np.kron(a, b), [0], [2, 3]), a, atol=1e-12)


def test_partial_trace_validation():
    with pytest.raises(ShapeError):
        linalg.partial_trace(np.eye(4), [0], [2, 3])
    with pytest.raises(ShapeError):
        linalg.partial_trace(np.eye(4), [5], [2, 2])


def test_hermitian_helpers(rng):
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = linalg.hermitian_part(x)
    assert linalg.is_hermitian(h)
    assert not linalg.is_hermitian(x)


def test_as_matrix_validation():
    with pytest.raises(ShapeError):
        linalg.as_matrix(np.ones((2, 3)), square=True)
    with pytest.raises(ValueError):
        linalg.as_matrix([[np.nan]])
    assert linalg.as_matrix([[1, 2], [3, 4]]).dtype == np.complex128
