import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from noiseinv import linalg, randomops

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.sampled_from([1, 2, 3, 4, 6, 8])


def test_tensor_product_explicit_entries():
    a = np.array([[1, 2], [3, 4]])
    b = np.array([[0, 5], [6, 7]])
    expected = np.array([
        [0, 5, 0, 10],
        [6, 7, 12, 14],
        [0, 15, 0, 20],
        [18, 21, 24, 28],
    ])
    np.testing.assert_array_equal(linalg.tensor_product(a, b), expected)


def test_tensor_product_of_three_is_associative(rng):
    a, b, c = (randomops.ginibre(2, rng) for _ in range(3))
    lhs = linalg.tensor_product(a, b, c)
    np.testing.assert_allclose(lhs, np.kron(np.kron(a, b), c), atol=1e-14)


def test_partial_trace_of_product(rng):
    a = randomops.density(2, rng)
    b = randomops.density(3, rng)
    ab = np.kron(a, b)
    np.testing.assert_allclose(linalg.partial_trace(ab, (2, 3), [0]), a, atol=1e-14)
    np.testing.assert_allclose(linalg.partial_trace(ab, (2, 3), [1]), b, atol=1e-14)


def test_partial_trace_against_explicit_sum(rng):
    m = randomops.ginibre(6, rng)
    t = m.reshape(2, 3, 2, 3)
    expected = sum(t[:, k, :, k] for k in range(3))
    np.testing.assert_allclose(linalg.partial_trace(m, (2, 3), [0]), expected, atol=1e-13)


def test_partial_transpose_explicit(rng):
    m = randomops.ginibre(4, rng)
    out = linalg.partial_transpose(m, (2, 2), 1)
    t = m.reshape(2, 2, 2, 2)
    for i in range(2):
        for k in range(2):
            for j in range(2):
                for l in range(2):
                    assert out[2 * i + k, 2 * j + l] == t[i, l, j, k]


def test_partial_transpose_is_batched(rng):
    stack = np.stack([randomops.ginibre(4, rng) for _ in range(5)])
    out = linalg.partial_transpose(stack, (2, 2), 1)
    for s, o in zip(stack, out):
        np.testing.assert_array_equal(o, linalg.partial_transpose(s, (2, 2), 1))


def test_partial_transpose_rejects_bad_dims():
    with pytest.raises(linalg.DimensionError):
        linalg.partial_transpose(np.eye(4), (2, 3), 1)


@given(seed=seeds, d=dims)
def test_jacobi_matches_numpy_eigvalsh(seed, d):
    rng = np.random.default_rng(seed)
    h = randomops.hermitian(d, rng)
    w, v = linalg.jacobi_eigh(h)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(h), atol=1e-10)
    np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, h, atol=1e-10)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(d), atol=1e-10)


def test_jacobi_eigenvalues_are_characteristic_roots():
    # 2x2 with known spectrum {a-|b|... } solved by the quadratic formula
    a, c, b = 1.5, -0.5, 0.3 - 0.4j
    h = np.array([[a, b], [np.conj(b), c]])
    mean, half = (a + c) / 2, np.sqrt(((a - c) / 2) ** 2 + abs(b) ** 2)
    np.testing.assert_allclose(linalg.jacobi_eigh(h)[0], [mean - half, mean + half], atol=1e-14)


def test_jacobi_diagonal_input_is_fixed_point():
    w, v = linalg.jacobi_eigh(np.diag([3.0, -1.0, 2.0]))
    np.testing.assert_allclose(w, [-1.0, 2.0, 3.0])


def test_jacobi_batched_agrees_with_single(rng):
    stack = np.stack([randomops.hermitian(4, rng) for _ in range(7)])
    w, _ = linalg.jacobi_eigh(stack)
    for h, row in zip(stack, w):
        np.testing.assert_allclose(row, np.linalg.eigvalsh(h), atol=1e-10)


def test_hermitian_eigenvalues_rejects_non_hermitian():
    with pytest.raises(linalg.NotHermitianError):
        linalg.hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))


@given(seed=seeds, d=dims)
def test_trace_norm_matches_singular_values(seed, d):
    h = randomops.hermitian(d, np.random.default_rng(seed))
    assert linalg.trace_norm(h) == pytest.approx(np.sum(np.linalg.svd(h, compute_uv=False)), abs=1e-10)


@given(seed=seeds)
def test_trace_norm_unitarily_invariant(seed):
    rng = np.random.default_rng(seed)
    h, u = randomops.hermitian(4, rng), randomops.unitary(4, rng)
    assert linalg.trace_norm(u @ h @ u.conj().T) == pytest.approx(linalg.trace_norm(h), abs=1e-10)


def test_trace_norm_of_density_is_one(rng):
    assert linalg.trace_norm(randomops.density(8, rng)) == pytest.approx(1.0, abs=1e-12)


def test_invert_roundtrip(rng):
    m = randomops.ginibre(5, rng)
    np.testing.assert_allclose(linalg.invert(m) @ m, np.eye(5), atol=1e-10)


def test_invert_refuses_ill_conditioned():
    with pytest.raises(linalg.SingularMatrixError) as info:
        linalg.invert(np.diag([1.0, 1e-14]))
    assert info.value.condition > info.value.limit


def test_predicates():
    assert linalg.is_hermitian(np.eye(2))
    assert not linalg.is_hermitian(np.array([[0, 1], [0, 0]]))
    assert linalg.is_unitary(np.array([[0, 1], [1, 0]]))
    assert linalg.is_psd(np.diag([0.0, 1.0]))
    assert not linalg.is_psd(np.diag([-1e-3, 1.0]))


def test_as_square_rejects_rectangular():
    with pytest.raises(linalg.DimensionError):
        linalg.as_square(np.zeros((2, 3)))


def test_check_dims_product_mismatch():
    with pytest.raises(linalg.DimensionError):
        linalg.check_dims((2, 2), 8)
