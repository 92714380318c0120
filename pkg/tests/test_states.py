import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from redmap.states import (
    DensityMatrix,
    JointPureState,
    entanglement_entropy,
    is_maximally_entangled,
    is_product,
    ket,
    phase_distance,
    product_factors,
    schmidt,
    vn_entropy,
)
from redmap.unitaries import haar_unitary
from conftest import random_ket

seeds = st.integers(0, 2**32 - 1)
BELL = JointPureState((ket(0, 4) + ket(3, 4)) / math.sqrt(2), 2, 2, "first")


def test_rejects_unnormalized_and_bad_dims():
    with pytest.raises(ValueError):
        JointPureState(np.array([1.0, 1.0, 0, 0]), 2, 2, "first")
    with pytest.raises(ValueError):
        JointPureState(ket(0, 3), 2, 2, "first")


def test_bell_state():
    assert math.isclose(entanglement_entropy(BELL), 1.0, abs_tol=1e-12)
    assert is_maximally_entangled(BELL)
    assert not is_product(BELL)
    assert product_factors(BELL) is None
    assert np.allclose(BELL.reduced(), np.eye(2) / 2)


def test_product_state_factors():
    a, b = np.array([0.6, 0.8j]), np.array([1.0, 1.0]) / math.sqrt(2)
    psi = JointPureState.product(a, b)
    assert is_product(psi)
    assert entanglement_entropy(psi) < 1e-12
    first, second = product_factors(psi)
    assert phase_distance(np.kron(first, second), psi.amplitudes) < 1e-12


@given(seeds, st.integers(2, 4), st.integers(2, 4))
def test_schmidt_reconstructs_and_is_local_invariant(seed, d1, d2):
    rng = np.random.default_rng(seed)
    psi = JointPureState.normalized(random_ket(rng, d1 * d2), d1, d2, "first")
    s, left, right = schmidt(psi)
    rebuilt = sum(s[k] * np.kron(left[:, k], right[:, k]) for k in range(s.size))
    assert np.allclose(rebuilt, psi.amplitudes, atol=1e-12)
    assert math.isclose(float(np.sum(s**2)), 1.0, abs_tol=1e-12)
    u = np.kron(haar_unitary(d1, seed), haar_unitary(d2, seed + 1))
    s2, _, _ = schmidt(psi.evolve(u))
    assert np.allclose(s, s2, atol=1e-10)


@given(seeds)
def test_reduced_state_entropies_agree(seed):
    rng = np.random.default_rng(seed)
    psi = JointPureState.normalized(random_ket(rng, 6), 2, 3, "first")
    ent = entanglement_entropy(psi, "nats")
    assert math.isclose(vn_entropy(psi.reduced("first"), "nats"), ent, abs_tol=1e-10)
    assert math.isclose(vn_entropy(psi.reduced("second"), "nats"), ent, abs_tol=1e-10)


@given(seeds)
def test_swapped_keeps_the_physics(seed):
    rng = np.random.default_rng(seed)
    psi = JointPureState.normalized(random_ket(rng, 6), 2, 3, "first")
    sw = psi.swapped()
    assert (sw.d_first, sw.d_second, sw.system_slot) == (3, 2, "second")
    assert np.allclose(sw.reduced(), psi.reduced(), atol=1e-14)
    assert np.allclose(sw.swapped().amplitudes, psi.amplitudes)


@given(seeds)
def test_json_round_trip(seed):
    rng = np.random.default_rng(seed)
    psi = JointPureState.normalized(random_ket(rng, 4), 2, 2, "second")
    back = JointPureState.from_json(psi.to_json())
    assert np.array_equal(back.amplitudes, psi.amplitudes)
    assert back.system_slot == "second"
    assert set(psi.to_dict()) == {"d_first", "d_second", "system_slot", "re", "im"}


def test_density_matrix_validation():
    DensityMatrix(np.eye(2) / 2)
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(2))


def test_entropy_bases():
    rho = np.diag([0.5, 0.5])
    assert math.isclose(vn_entropy(rho, "bits"), 1.0)
    assert math.isclose(vn_entropy(rho, "nats"), math.log(2))
    with pytest.raises(ValueError):
        vn_entropy(rho, "dits")
