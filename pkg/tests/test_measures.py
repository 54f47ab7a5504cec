import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from noiseinv import channel as ch
from noiseinv import measures, noise, randomops
from noiseinv.noise import NoiseFamily

seeds = st.integers(min_value=0, max_value=2**32 - 1)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def bell():
    return ch.max_entangled_state(2).matrix


def test_purity_values(rng):
    assert measures.purity(np.eye(4) / 4) == pytest.approx(0.25)
    assert measures.purity(randomops.pure(4, rng)) == pytest.approx(1.0)


@given(seed=seeds)
def test_purity_bloch_identity(seed):
    rho = randomops.density(4, np.random.default_rng(seed))
    r = measures.bloch_vector(rho)
    assert measures.purity(rho) == pytest.approx((1 + r.norm**2) / 4, abs=1e-12)
    np.testing.assert_allclose(r.to_matrix(), rho, atol=1e-12)


def test_bloch_vector_of_plus_state():
    r = measures.bloch_vector(np.full((2, 2), 0.5))
    np.testing.assert_allclose(r.coefficients, [1, 0, 0], atol=1e-15)


def test_log_negativity_reference_states(rng):
    assert measures.log_negativity(bell()) == pytest.approx(1.0, abs=1e-12)
    prod = np.kron(randomops.density(2, rng), randomops.density(2, rng))
    assert measures.log_negativity(prod) == pytest.approx(0.0, abs=1e-12)
    assert measures.log_negativity(ch.max_entangled_state(4)) == pytest.approx(2.0, abs=1e-12)


def test_log_negativity_werner_state():
    # Werner p*Bell + (1-p) I/4 has E_N = log2((1+3p)/2) for p > 1/3
    p = 0.7
    w = p * bell() + (1 - p) * np.eye(4) / 4
    assert measures.log_negativity(w) == pytest.approx(math.log2((1 + 3 * p) / 2), abs=1e-12)


def test_log_negativity_batched(rng):
    stack = np.stack([randomops.density(4, rng) for _ in range(6)])
    out = measures.log_negativity(stack, 1, (2, 2))
    for r, v in zip(stack, out):
        assert v == pytest.approx(measures.log_negativity(r), abs=1e-14)


def test_mu_from_weights():
    assert measures.mu_from_weights([1.25, -0.25]) == pytest.approx(0.5 * math.log2(1.625))
    with pytest.raises(ValueError):
        measures.mu_from_weights([])


@pytest.mark.parametrize("kind", ["pauli", "depolarizing", "dephasing"])
@pytest.mark.parametrize("n", [1, 2])
def test_nu_orthogonal_matches_closed_form(kind, n):
    f = NoiseFamily(kind, n, 0.2)
    nu = measures.nu_orthogonal(noise.build_inverse(f), noise.inverse_decomposition(f))
    assert nu == pytest.approx(noise.nu_inverse(f), abs=1e-10)


def test_nu_orthogonal_rejects_wrong_decomposition():
    f = NoiseFamily("depolarizing", 1, 0.2)
    other = noise.inverse_decomposition(NoiseFamily("depolarizing", 1, 0.1))
    with pytest.raises(measures.DecompositionError):
        measures.nu_orthogonal(noise.build_inverse(f), other)
    non_orth = ch.MixedUnitaryDecomposition((1.0, 0.0), (np.eye(2), np.eye(2)))
    with pytest.raises(measures.DecompositionError):
        measures.nu_orthogonal(ch.identity_channel(2), non_orth)


@pytest.mark.parametrize("kind", ["pauli", "depolarizing", "dephasing", "amplitude_damping"])
@pytest.mark.parametrize("eps", [0.05, 0.25])
def test_bounds_sandwich_known_nu(kind, eps):
    f = NoiseFamily(kind, 2, eps)
    b = measures.nu_bounds(noise.build_inverse(f))
    assert b.lower <= b.upper + 1e-12
    if kind != "amplitude_damping":
        assert b.contains(noise.nu_inverse(f))
    else:
        assert b.lower <= noise.nu_inverse(f) + 1e-9


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("eps", [0.01, 0.1, 0.3])
def test_depolarizing_bounds_by_hand(n, eps):
    b = measures.nu_bounds(noise.build_inverse(NoiseFamily("depolarizing", n, eps)))
    d = 2**n
    assert b.lambda_max == pytest.approx((4**n - eps) / ((1 - eps) * d), abs=1e-10)
    assert b.lambda_min == pytest.approx(-eps / ((1 - eps) * d), abs=1e-10)
    assert b.upper_min_eig == pytest.approx(math.log2((1 + eps) / (1 - eps)), abs=1e-10)


def test_bounds_of_channel_are_zero(rng):
    b = measures.nu_bounds(randomops.cptp((2,), rng))
    assert b.lower == 0.0 and b.upper == 0.0


def test_bounds_reject_non_hp():
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = 1
    with pytest.raises(ValueError):
        measures.nu_bounds(ch.ChoiOperator(m, (2,)))


def test_eta_upper_product_decomposition():
    f = NoiseFamily("amplitude_damping", 2, 0.2)
    terms = noise.product_inverse_terms(f)
    eta = measures.eta_upper(terms, target=noise.build_inverse(f))
    assert eta == pytest.approx(noise.nu_inverse(f), abs=1e-12)
    assert eta >= measures.nu_bounds(noise.build_inverse(f)).lower - 1e-12


def test_eta_upper_rejects_bad_terms():
    ident = ch.identity_channel(2)
    with pytest.raises(measures.DecompositionError):
        measures.eta_upper([])
    with pytest.raises(measures.DecompositionError):
        measures.eta_upper([(1.0, ident, noise.build_inverse(NoiseFamily("pauli", 1, 0.1)))])
    with pytest.raises(measures.DecompositionError):
        measures.eta_upper([(1.0, ident, ident)], target=ch.completely_depolarizing((2, 2)))


def test_separability_gates_fail():
    cnot = measures.separability_necessary(ch.choi_from_unitary(CNOT, (2, 2)))
    swap = measures.separability_necessary(ch.choi_from_unitary(SWAP, (2, 2)))
    assert not cnot and not swap
    assert cnot.witness[0] in ("A", "B") and cnot.violation > 0.5


@given(seed=seeds)
def test_product_channels_pass(seed):
    rng = np.random.default_rng(seed)
    c = ch.tensor(randomops.cptp((2,), rng), randomops.cptp((2,), rng))
    v = measures.separability_necessary(c)
    assert v.passes and v.witness is None


def test_signed_product_combination_passes(rng):
    f = NoiseFamily("depolarizing", 2, 0.3)
    assert measures.separability_necessary(noise.build_inverse(f))


@given(seed=seeds)
def test_implementability_caps_purity_growth(seed):
    # any orthogonal signed Pauli map: Bloch norm grows by at most 2^nu
    rng = np.random.default_rng(seed)
    f = NoiseFamily("depolarizing", 2, float(rng.uniform(0.01, 0.9)))
    rho = randomops.density(4, rng)
    out = ch.apply_matrix(noise.build_inverse(f), rho)
    r0, r1 = measures.bloch_vector(rho).norm, measures.bloch_vector(out).norm
    assert r1 <= 2 ** noise.nu_inverse(f) * r0 + 1e-9
