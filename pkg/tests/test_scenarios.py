import math

import numpy as np
import pytest

from redmap import scenarios as sc
from redmap import tensor_core as tc
from redmap.errors import MaximallyEntangled, NonLocalUnitary, SingularMap
from redmap.states import JointPureState, is_product, ket, phase_distance
from redmap.unitaries import GateConvention, controlled, haar_unitary, local_operator, named_gate, pauli
from conftest import random_hermitian, random_ket

BELL = JointPureState((ket(0, 4) + ket(3, 4)) / math.sqrt(2), 2, 2, "second")


def test_convention_search_winner():
    fit = sc.convention_search()
    assert fit.convention == GateConvention("first", "principal", "ES")
    assert fit.state_reading == "ES"
    assert fit.residuals["cnot_twice"] < 1e-12 and fit.residuals["sqrtcnot"] < 1e-12
    assert len(fit.table) == 16
    assert sc.default_convention() == fit.convention


def test_convention_search_needs_a_real_grid():
    with pytest.raises(ValueError):
        sc.convention_search([0.1, 0.2])


@pytest.mark.parametrize("theta", [0.1, math.pi / 12, math.pi / 6, math.pi / 5, 1.2])
def test_cnot_twice_closed_forms(theta):
    rep = sc.scenario_cnot_twice(theta)
    assert rep.residual_vs_paper <= 1e-10
    assert rep.verdict == "NCP"
    assert math.isclose(float(np.sum(rep.spectrum)), 2.0, abs_tol=1e-10)


def test_cnot_twice_is_a_counterexample_to_divisible_closed_evolution():
    # CNOT twice is exp(-iH) then exp(-2iH) for one fixed H, with a product
    # start state, yet the intermediate map is not CP
    conv = sc.default_convention()
    h = tc.logm_unitary(named_gate("CNOT", conv))
    chi = sc.env_state(math.pi / 6)
    res = sc.evolution_intermediate(h, chi, 1.0, 2.0, conv.env_slot)
    assert res.verdict == "NCP"
    assert math.isclose(res.min_eigenvalue, sc.b2_eigenvalues(math.pi / 6)[0], abs_tol=1e-9)


def test_cnot_twice_singular_at_quarter_pi():
    with pytest.raises(SingularMap) as info:
        sc.scenario_cnot_twice(math.pi / 4)
    assert info.value.condition > 1e12


@pytest.mark.parametrize("theta", np.linspace(0.0, 1.5, 11))
def test_sqrtcnot_pair_matches_closed_form(theta):
    rep = sc.scenario_sqrtcnot(float(theta))
    assert rep.residual_vs_paper <= 1e-8
    assert rep.pair[0] >= -1e-8
    assert rep.extras["psi_family_residual"] < 1e-12


def test_sqrtcphase_quarter_pi():
    rep = sc.scenario_sqrtcphase(math.pi / 4)
    assert np.max(np.abs(rep.spectrum - sc.B_PI4_SPECTRUM)) <= 5e-4
    assert rep.verdict == "NCP"
    assert math.isclose(rep.extras["spectrum_sum"], 2.0, abs_tol=1e-9)


def test_psi_theta_is_normalized_and_read_both_ways():
    es = sc.psi_theta(0.3, "ES")
    se = sc.psi_theta(0.3, "SE")
    assert np.array_equal(es.amplitudes, se.amplitudes)
    assert (es.system_slot, se.system_slot) == ("second", "first")
    with pytest.raises(ValueError):
        sc.psi_theta(0.3, "XY")


def test_backward_profile_matches_display_and_is_flat():
    grid = np.linspace(0, 2 * math.pi, 33)
    pts = sc.backward_entropy_profile(grid, "cphase_projector")
    for p in pts:
        assert np.max(np.abs(p.reduced_state - sc.backward_display(p.t))) < 1e-12
        assert math.isclose(p.entropy_bits, 0.6008760366928554, abs_tol=1e-9)
    literal = sc.backward_entropy_profile(grid, "h_phi")
    for p in literal:
        assert np.max(np.abs(p.reduced_state - sc.backward_display(-2 * p.t))) < 1e-12
    assert abs(sc.QUOTED_ENTROPY_CONSTANT - 0.6008760366928554) > 1e-2


@pytest.mark.parametrize("seed", range(5))
def test_search_finds_a_planted_product(seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, 4)
    prod = JointPureState.product(random_ket(rng, 2), random_ket(rng, 2), "second")
    phi = prod.evolve(tc.unitary_exp(h, 1.0))
    res = sc.search_pre_initial(phi, h)
    assert res.s is not None and res.s <= 1.0 + 1e-6
    back = phi.evolve(tc.unitary_exp(h, -res.s))
    assert is_product(back, tol=1e-4)


def test_search_reports_none_when_entropy_is_conserved():
    res = sc.search_pre_initial(sc.psi_theta(math.pi / 4), sc.CPHASE_PROJECTOR)
    assert res.s is None
    assert math.isclose(res.min_entropy, 0.6008760366928554, abs_tol=1e-8)


def test_search_on_a_product_state_returns_zero():
    prod = JointPureState.product([1, 0], [0.6, 0.8], "second")
    res = sc.search_pre_initial(prod, sc.H_PHI)
    assert res.s == 0.0 and res.min_entropy < 1e-12


def test_cp_family_construction_basics():
    phi = sc.psi_theta(math.pi / 6)
    v = np.kron(haar_unitary(2, 1), haar_unitary(2, 2))
    smp = sc.construct_cp_family(phi, v)
    assert tc.unitarity_defect(smp.u2) < 1e-10
    assert phase_distance(smp.u1 @ (v @ ket(0, 4)), phi.amplitudes) < 1e-10
    assert smp.verdict in ("CP", "NCP", "SINGULAR")
    with pytest.raises(MaximallyEntangled):
        sc.construct_cp_family(BELL, np.eye(4))
    with pytest.raises(NonLocalUnitary):
        sc.construct_cp_family(phi, named_gate("CNOT", sc.default_convention()))
    with pytest.raises(ValueError):
        sc.construct_cp_family(phi, v, s=0.0)


def test_augmentation_table_under_sqrt_cnot():
    conv = sc.default_convention()
    root = named_gate("SQRT_CNOT", conv)
    phi = sc.psi_theta(math.pi / 6)
    z, x = pauli("z"), pauli("x")
    ok = sc.augmentation_check(root, local_operator(x, z, conv), phi, conv)
    assert ok.locality_preserved and ok.verdict == "CP"
    bad = sc.augmentation_check(root, local_operator(x, x, conv), phi, conv)
    assert not bad.locality_preserved and bad.verdict == "NCP"
    with pytest.raises(NonLocalUnitary):
        sc.augmentation_check(root, root, phi, conv)


@pytest.mark.parametrize("seed", range(100))
def test_locality_preserving_augmentation_keeps_cp(seed):
    # premise: the bare controlled gate is CP-inducing on the prepared family
    conv = sc.default_convention()
    rng = np.random.default_rng(seed)
    v = haar_unitary(2, seed)
    u_se = controlled(v, conv)
    phi = JointPureState.product(random_ket(rng, 2), random_ket(rng, 2), "second").evolve(u_se)
    env = np.diag(np.exp(1j * rng.uniform(0, 2 * math.pi, 2)))
    u_l = local_operator(tc.unitary_power(v, rng.uniform(-2, 2)), env, conv)
    res = sc.augmentation_check(u_se, u_l, phi, conv)
    assert res.locality_preserved
    if sc.augmentation_check(u_se, np.eye(4), phi, conv).verdict == "CP":
        assert res.verdict == "CP"


def test_dimension_ratio_limits():
    r = sc.dimension_ratio(2, 2)
    assert r.paper_approx == 0.5 and math.isclose(r.exact, 0.4)
    prev = 1.0
    for k in range(4, 11):
        big = sc.dimension_ratio(2, 2**k)
        assert big.paper_approx < prev
        prev = big.paper_approx
        assert abs(big.exact - big.limit) < 2.0 / 4**k
    assert abs(sc.dimension_ratio(2, 2**10).paper_approx * 4 - 1) < 1e-3
    with pytest.raises(ValueError):
        sc.dimension_ratio(1, 2)


def test_mc_fraction_is_deterministic_across_threads():
    phi = sc.psi_theta(math.pi / 6)
    a = sc.mc_cp_fraction(phi, "haar_full", 40, seed=4, threads=1)
    b = sc.mc_cp_fraction(phi, "haar_full", 40, seed=4, threads=4)
    assert a == b
    assert 0.0 <= a.fraction <= 1.0
    assert a.n_cp + a.n_ncp + a.n_singular == 40


def test_mc_fraction_input_checks():
    phi = sc.psi_theta(math.pi / 6)
    with pytest.raises(ValueError):
        sc.mc_cp_fraction(phi, "haar_full", 0)
    with pytest.raises(ValueError):
        sc.mc_cp_fraction(phi, "gaussian", 5)
    with pytest.raises(MaximallyEntangled):
        sc.mc_cp_fraction(BELL, "haar_full", 5)


def test_parallel_map_keeps_order():
    assert sc.parallel_map(lambda x: x * x, range(20), threads=4) == [x * x for x in range(20)]


def test_report_serializes():
    d = sc.scenario_sqrtcnot(0.4).to_dict()
    assert set(d) == {"scenario_id", "convention", "params", "matrices", "spectrum", "verdict", "residual_vs_paper", "extras"}
    assert d["convention"]["tensor_order"] == "ES"
