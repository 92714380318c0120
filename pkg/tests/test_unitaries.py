import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from redmap import tensor_core as tc
from redmap.errors import NonLocalUnitary
from redmap.states import JointPureState, ket, phase_distance
from redmap.unitaries import (
    GateConvention,
    controlled,
    dilation_from_state,
    haar_unitary,
    is_local_unitary,
    local_factors,
    local_operator,
    named_gate,
    pauli,
    rng_for,
    unitary_root,
)
from conftest import random_ket

seeds = st.integers(0, 2**32 - 1)
CONV = GateConvention("first", "principal", "SE")
X, Z = pauli("x"), pauli("z")


def test_convention_validation_and_round_trip():
    with pytest.raises(ValueError):
        GateConvention("middle", "principal", "SE")
    conv = GateConvention("second", "alternate", "ES")
    assert GateConvention.from_dict(conv.to_dict()) == conv
    assert (conv.system_slot, conv.env_slot) == ("second", "first")


def test_cnot_layout():
    cnot = named_gate("CNOT", CONV)
    assert np.allclose(cnot @ ket(2, 4), ket(3, 4))
    flipped = named_gate("CNOT", GateConvention("second", "principal", "SE"))
    assert np.allclose(flipped @ ket(1, 4), ket(3, 4))


def test_square_roots_square_back():
    for name, full in (("SQRT_CNOT", "CNOT"), ("SQRT_CPHASE", "CPHASE")):
        for branch in ("principal", "alternate"):
            conv = GateConvention("first", branch, "SE")
            r = named_gate(name, conv)
            assert np.allclose(r @ r, named_gate(full, conv), atol=1e-12)
    p = named_gate("SQRT_CNOT", CONV)
    a = named_gate("SQRT_CNOT", GateConvention("first", "alternate", "SE"))
    assert not np.allclose(p, a)


def test_unknown_gate():
    with pytest.raises(ValueError):
        named_gate("TOFFOLI", CONV)


@given(seeds, st.integers(1, 8))
def test_root_round_trip(seed, n):
    u = haar_unitary(3, seed)
    r = unitary_root(u, n)
    assert np.allclose(np.linalg.matrix_power(r, n), u, atol=1e-9)


@given(seeds, st.integers(1, 6))
def test_haar_is_unitary_and_reproducible(seed, d):
    u = haar_unitary(d, seed)
    assert tc.unitarity_defect(u) < 1e-12
    assert np.array_equal(u, haar_unitary(d, seed))


def test_rng_streams_are_independent_of_order():
    a = [rng_for(9, i).standard_normal() for i in range(5)]
    b = [rng_for(9, i).standard_normal() for i in reversed(range(5))][::-1]
    assert a == b


def test_haar_first_moment():
    # E|U_00|^2 = 1/d for the Haar measure
    vals = [abs(haar_unitary(3, rng=rng_for(0, i))[0, 0]) ** 2 for i in range(4000)]
    assert abs(np.mean(vals) - 1 / 3) < 0.02


@given(seeds)
def test_locality_detects_products(seed):
    a, b = haar_unitary(2, seed), haar_unitary(3, seed + 1)
    u = np.kron(a, b)
    assert is_local_unitary(u, 2, 3)
    fa, fb = local_factors(u, 2, 3)
    assert np.allclose(np.kron(fa, fb), u, atol=1e-10)
    assert tc.unitarity_defect(fa) < 1e-10


def test_entangling_gates_are_not_local():
    assert not is_local_unitary(named_gate("CNOT", CONV), 2, 2)
    assert not is_local_unitary(named_gate("SQRT_CNOT", CONV), 2, 2)
    with pytest.raises(NonLocalUnitary):
        local_factors(named_gate("CPHASE", CONV), 2, 2)


def test_conjugation_locality_rule():
    # sz on the control commutes with CNOT; sx on the control does not
    cnot = named_gate("CNOT", CONV)
    keep = local_operator(X, Z, GateConvention("first", "principal", "ES"))
    assert is_local_unitary(cnot.conj().T @ keep @ cnot, 2, 2)
    spoil = np.kron(X, X)
    assert not is_local_unitary(named_gate("SQRT_CNOT", CONV).conj().T @ spoil @ named_gate("SQRT_CNOT", CONV), 2, 2)


def test_controlled_rejects_non_unitary():
    with pytest.raises(ValueError):
        controlled(np.diag([1.0, 2.0]), CONV)


@pytest.mark.parametrize("seed", range(100))
def test_dilation_round_trip(seed):
    rng = np.random.default_rng(seed)
    phi = JointPureState.normalized(random_ket(rng, 4), 2, 2, "first")
    u1, pre = dilation_from_state(phi)
    assert tc.unitarity_defect(u1) < 1e-12
    assert phase_distance(u1 @ pre.amplitudes, phi.amplitudes) < 1e-12
