"""Residuals, the purity-preserving flow, sphere search, unravelings, chains."""

import math

import numpy as np
import pytest

from ppsd_lab import (
    DensityMatrix,
    InvariantViolation,
    ModelSpec,
    Operator,
    SearchConfig,
    StateVector,
    catalog_model,
    consistency_check,
    effective_hamiltonian,
    evolve_pure_nonlinear,
    fidelity,
    fock_operators,
    history_chain,
    is_stationary_state,
    pauli_operators,
    ppsd_residual,
    ppsd_residual_terms,
    ppsd_search,
    residual_scale,
    squeezed_ppsd_state,
    unraveling_check,
    variance,
)
from ppsd_lab.errors import DimensionMismatch

DEPHASING = ModelSpec("dephasing_qubit", {"gamma": 1.0})


def random_state(rng, dim) -> StateVector:
    return StateVector.normalized(
        rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    )


# ---------------------------------------------------------------------------
# residual
# ---------------------------------------------------------------------------


def test_residual_zero_at_monitored_eigenstate():
    model = catalog_model(DEPHASING)
    assert ppsd_residual(model, StateVector.basis(2, 0)) == pytest.approx(0.0, abs=1e-14)


def test_residual_one_at_equal_superposition():
    model = catalog_model(DEPHASING)
    psi = StateVector.normalized([1.0, 1.0])
    assert ppsd_residual(model, psi) == pytest.approx(1.0, abs=1e-12)


def test_residual_amplitude_damping_quadratic_in_population():
    gamma0 = 1.3
    model = catalog_model(ModelSpec("thermal_qubit", {"gamma0": gamma0, "N": 0.0}))
    rng = np.random.default_rng(3)
    for _ in range(50):
        psi = random_state(rng, 2)
        p_plus = abs(psi.amplitudes[0]) ** 2
        expected = gamma0 * (p_plus - p_plus * (1.0 - p_plus))
        assert ppsd_residual(model, psi) == pytest.approx(expected, abs=1e-12)


def test_residual_depolarizing_excited_state():
    model = catalog_model(ModelSpec("depolarizing", {}))
    assert ppsd_residual(model, StateVector.basis(2, 0)) == pytest.approx(2.0, abs=1e-12)


def test_residual_dimension_mismatch():
    model = catalog_model(DEPHASING)
    with pytest.raises(DimensionMismatch):
        ppsd_residual(model, StateVector.basis(3, 0))


@pytest.mark.parametrize(
    "spec",
    [
        DEPHASING,
        ModelSpec("phase_damped_oscillator", {"dim": 8}),
        ModelSpec("walls_collet_milburn", {"dim": 8}),
        ModelSpec("csl", {}),
    ],
    ids=lambda s: s.name,
)
def test_residual_equals_weighted_variances_for_hermitian_families(spec):
    model = catalog_model(spec)
    rng = np.random.default_rng(17)
    for _ in range(40):
        psi = random_state(rng, model.dim)
        expected = sum(
            term.rate * variance(term.op, psi) for term in model.terms
        )
        assert ppsd_residual(model, psi) == pytest.approx(expected, abs=1e-12)


def test_zero_residual_implies_eigenstate_for_single_hermitian_jump():
    model = catalog_model(ModelSpec("phase_damped_oscillator", {"dim": 8}))
    gamma = model.terms[0].rate
    L = model.terms[0].op.matrix
    for n in range(8):
        psi = StateVector.basis(8, n)
        assert ppsd_residual(model, psi) < 1e-10 * gamma
        mean = np.vdot(psi.amplitudes, L @ psi.amplitudes)
        assert np.linalg.norm(L @ psi.amplitudes - mean * psi.amplitudes) < 1e-4


def test_multimode_residual_decomposes_per_term():
    spec = ModelSpec(
        "multimode",
        {"n_modes": 2, "mode_dim": 4, "gamma_1": 1.0, "N_1": 0.4, "gamma_2": 0.7, "N_2": 0.0},
    )
    model = catalog_model(spec)
    rng = np.random.default_rng(8)
    for _ in range(60):
        psi = random_state(rng, model.dim)
        terms = ppsd_residual_terms(model, psi)
        assert terms.min() >= -1e-12
        assert terms.sum() == pytest.approx(ppsd_residual(model, psi), abs=1e-12)


def test_multimode_zero_total_requires_zero_occupation():
    # with N_1 > 0 the absorption term contributes at least gamma*N_1 per unit
    # commutator expectation; the total cannot vanish on any product state
    spec = ModelSpec("multimode", {"n_modes": 2, "mode_dim": 6, "N_1": 0.4})
    model = catalog_model(spec)
    rng = np.random.default_rng(21)
    best = min(ppsd_residual(model, random_state(rng, model.dim)) for _ in range(200))
    assert best > 0.1


# ---------------------------------------------------------------------------
# effective generator and the nonlinear flow
# ---------------------------------------------------------------------------


def test_effective_hamiltonian_annihilates_damped_vacuum():
    model = catalog_model(
        ModelSpec("damped_oscillator", {"gamma0": 1.0, "N": 0.0, "omega": 1.0, "dim": 20})
    )
    vac = StateVector.basis(20, 0)
    h_eff = effective_hamiltonian(model, vac)
    assert np.linalg.norm(h_eff.matrix @ vac.amplitudes) < 1e-12


def test_effective_hamiltonian_reduces_to_hamiltonian_without_dissipation():
    from ppsd_lab import LindbladModel

    _, _, sz, _, _ = pauli_operators()
    model = LindbladModel(sz, (), dim=2)
    psi = StateVector.normalized([1.0, 1.0j])
    np.testing.assert_allclose(effective_hamiltonian(model, psi).matrix, sz.matrix)


def test_effective_hamiltonian_dephasing_formula():
    model = catalog_model(DEPHASING)
    psi = StateVector.normalized([1.0, 1.0])
    # <Z> = 0, Z^2 = I: H_eff = i (0*Z - I) = -i I
    np.testing.assert_allclose(
        effective_hamiltonian(model, psi).matrix, -1j * np.eye(2), atol=1e-14
    )


def test_pure_flow_keeps_monitored_eigenstate():
    model = catalog_model(DEPHASING)
    times = np.linspace(0.0, 2.0, 9)
    states = evolve_pure_nonlinear(model, StateVector.basis(2, 0), times)
    for s in states:
        assert fidelity(s, StateVector.basis(2, 0)) == pytest.approx(1.0, abs=1e-10)


def test_pure_flow_keeps_amplitude_damping_ground():
    model = catalog_model(ModelSpec("thermal_qubit", {"gamma0": 1.0, "N": 0.0}))
    times = np.linspace(0.0, 3.0, 7)
    states = evolve_pure_nonlinear(model, StateVector.basis(2, 1), times)
    for s in states:
        assert fidelity(s, StateVector.basis(2, 1)) == pytest.approx(1.0, abs=1e-10)


def test_pure_flow_norm_drift_is_tiny():
    model = catalog_model(DEPHASING)
    times = np.linspace(0.0, 1.0, 11)
    _, drifts = evolve_pure_nonlinear(
        model, StateVector.normalized([1.0, 1.0]), times, return_drift=True
    )
    assert drifts.max() < 1e-9


def test_pure_flow_requires_times_from_zero():
    model = catalog_model(DEPHASING)
    with pytest.raises(InvariantViolation):
        evolve_pure_nonlinear(model, StateVector.basis(2, 0), [0.5, 1.0])


def test_pure_flow_tracks_coherent_state_of_damped_oscillator():
    from ppsd_lab import coherent_state, propagate, trace_distance

    dim = 40
    model = catalog_model(
        ModelSpec("damped_oscillator", {"gamma0": 1.0, "N": 0.0, "omega": 1.0, "dim": dim})
    )
    psi0 = coherent_state(1.0, dim)
    times = np.linspace(0.0, 1.0, 6)
    pure = evolve_pure_nonlinear(model, psi0, times)
    mixed = propagate(model, DensityMatrix.from_state(psi0), times)
    for p, s in zip(pure, mixed.states):
        assert trace_distance(DensityMatrix.from_state(p), s) < 1e-7


# ---------------------------------------------------------------------------
# consistency check
# ---------------------------------------------------------------------------


def test_consistency_dephasing_superposition_no_ppsd():
    model = catalog_model(DEPHASING)
    report = consistency_check(model, StateVector.normalized([1.0, 1.0]), t_max=1.0)
    assert report.verdict == "no_ppsd"
    assert not report.is_stationary
    # master-equation path loses purity down to (1 + e^{-4})/2 at t = 1
    assert report.max_impurity == pytest.approx(
        1.0 - 0.5 * (1.0 + math.exp(-4.0)), abs=1e-9
    )
    assert 1.0 - 0.5 * (1.0 + math.exp(-4.0)) == pytest.approx(1 - 0.509158, abs=1e-6)


def test_consistency_stationary_state():
    model = catalog_model(DEPHASING)
    report = consistency_check(model, StateVector.basis(2, 0), t_max=1.0)
    assert report.verdict == "stationary_only"
    assert report.is_stationary
    assert report.consistency_gap < 1e-8


def test_consistency_thermal_occupied_bath_never_ppsd():
    model = catalog_model(ModelSpec("thermal_qubit", {"gamma0": 1.0, "N": 1.0}))
    # minimum of (2N+1)p^2 - 2Np + N over p is N(N+1)/(2N+1)
    floor = 1.0 * (1.0 * 2.0) / 3.0
    rng = np.random.default_rng(12)
    for _ in range(5):
        psi = random_state(rng, 2)
        report = consistency_check(model, psi, t_max=1.0, n_steps=20)
        assert report.verdict == "no_ppsd"
        assert report.residual >= floor - 1e-9


def test_stationary_state_has_tiny_consistency_gap():
    model = catalog_model(ModelSpec("damped_oscillator", {"gamma0": 1.0, "N": 0.0, "dim": 12}))
    report = consistency_check(model, StateVector.basis(12, 0), t_max=2.0, n_steps=20)
    assert report.is_stationary
    assert report.consistency_gap < 1e-8


# ---------------------------------------------------------------------------
# sphere search
# ---------------------------------------------------------------------------


def test_search_amplitude_damping_finds_only_ground():
    model = catalog_model(ModelSpec("thermal_qubit", {"gamma0": 1.0, "N": 0.0}))
    reports = ppsd_search(model, SearchConfig(n_restarts=64, seed=11))
    assert len(reports) == 1
    assert reports[0].is_stationary
    assert reports[0].verdict == "stationary_only"
    assert fidelity(reports[0].state, StateVector.basis(2, 1)) > 1.0 - 1e-10


@pytest.mark.parametrize("N", [0.1, 0.5, 1.0, 2.0])
def test_search_thermal_qubit_empty_at_positive_occupation(N):
    model = catalog_model(ModelSpec("thermal_qubit", {"gamma0": 1.0, "N": N}))
    assert ppsd_search(model, SearchConfig(n_restarts=64, seed=11)) == []


def test_search_squeezed_model_finds_eigenvalue_pair():
    """The zero-residual set of the squeezed-decay model is a +/- pair.

    A single jump operator C has zero residual exactly on its eigenvectors;
    C here is invertible with eigenvalues +/- e^{i theta/2} sqrt(sinh(2r)/2),
    so there are two distinct zero-residual states (related by
    theta -> theta + 2 pi in the candidate formula), not one.  Both share
    p_e = (1 + coth r)^(-1) and differ by the sign of the relative phase.
    """
    r, theta = 0.2, math.pi
    model = catalog_model(
        ModelSpec("squeezed_vacuum_decay", {"gamma0": 1.0, "r": r, "theta": theta})
    )
    reports = ppsd_search(model, SearchConfig(n_restarts=64, seed=7))
    assert len(reports) == 2
    candidate = squeezed_ppsd_state(r, theta)
    partner = squeezed_ppsd_state(r, theta + 2 * math.pi)
    fids = sorted(fidelity(rep.state, candidate) for rep in reports)
    assert fids[1] > 1.0 - 1e-8
    assert max(fidelity(rep.state, partner) for rep in reports) > 1.0 - 1e-8
    for rep in reports:
        assert not rep.is_stationary
        assert rep.verdict == "no_ppsd"
        assert abs(rep.state.amplitudes[0]) ** 2 == pytest.approx(
            1.0 / (1.0 + 1.0 / math.tanh(r)), abs=1e-9
        )


def test_search_deterministic_for_fixed_seed():
    model = catalog_model(ModelSpec("squeezed_vacuum_decay", {}))
    config = SearchConfig(n_restarts=24, seed=5)
    first = ppsd_search(model, config)
    second = ppsd_search(model, config)
    assert len(first) == len(second)
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a.state.amplitudes, b.state.amplitudes)
        assert a.residual == b.residual
        assert a.verdict == b.verdict


def test_search_respects_dedupe_contract():
    model = catalog_model(ModelSpec("phase_damped_oscillator", {"dim": 6}))
    config = SearchConfig(n_restarts=96, seed=2)
    reports = ppsd_search(model, config)
    assert len(reports) == 6
    for i in range(len(reports)):
        for j in range(i + 1, len(reports)):
            assert (
                fidelity(reports[i].state, reports[j].state) < config.dedupe_fidelity
            )


def test_search_nonnegative_residuals_and_report_invariants():
    model = catalog_model(ModelSpec("thermal_qubit", {"gamma0": 2.0, "N": 0.0}))
    for rep in ppsd_search(model, SearchConfig(n_restarts=16, seed=1)):
        assert rep.residual >= -1e-12
        if rep.verdict == "ppsd_trajectory":
            assert not rep.is_stationary


def test_search_result_independent_of_thread_cap(monkeypatch):
    model = catalog_model(ModelSpec("squeezed_vacuum_decay", {}))
    config = SearchConfig(n_restarts=16, seed=21)
    monkeypatch.setenv("PPSD_LAB_THREADS", "1")
    serial = ppsd_search(model, config)
    monkeypatch.setenv("PPSD_LAB_THREADS", "4")
    threaded = ppsd_search(model, config)
    assert len(serial) == len(threaded)
    for a, b in zip(serial, threaded):
        np.testing.assert_array_equal(a.state.amplitudes, b.state.amplitudes)


def test_thread_cap_validation(monkeypatch):
    model = catalog_model(ModelSpec("dephasing_qubit", {}))
    monkeypatch.setenv("PPSD_LAB_THREADS", "0")
    with pytest.raises(InvariantViolation):
        ppsd_search(model, SearchConfig(n_restarts=2, seed=0))


def test_search_driven_oscillator_respects_additive_bound():
    params = {"dim": 16, "alpha_kT": 0.5}
    model = catalog_model(ModelSpec("nonadiabatic_driven", params))
    reports = ppsd_search(model, SearchConfig(n_restarts=8, seed=4, max_iterations=200))
    assert reports == []  # residual floor is strictly positive
    bound = math.exp(-0.5)
    rng = np.random.default_rng(0)
    floor = min(
        ppsd_residual(model, random_state(rng, 16)) for _ in range(50)
    )
    assert floor >= bound - 1e-9


# ---------------------------------------------------------------------------
# unraveling and history chains
# ---------------------------------------------------------------------------


def test_unraveling_accepts_stationary_diagonal_decomposition():
    model = catalog_model(DEPHASING)
    times = np.linspace(0.0, 1.0, 11)
    basis0, basis1 = StateVector.basis(2, 0), StateVector.basis(2, 1)
    weights = np.tile([[0.3], [0.7]], (1, len(times)))
    res = unraveling_check(
        model, weights, [[basis0] * len(times), [basis1] * len(times)], times
    )
    assert res < 1e-8


def test_unraveling_rejects_frozen_decomposition_with_coherence():
    model = catalog_model(DEPHASING)
    times = np.linspace(0.0, 1.0, 11)
    rho10 = 0.3
    rho = np.array([[0.5, rho10], [rho10, 0.5]], dtype=complex)
    eigvals, eigvecs = np.linalg.eigh(rho)
    weights = np.tile(eigvals[:, None], (1, len(times)))
    trajs = [[StateVector(eigvecs[:, k])] * len(times) for k in range(2)]
    res = unraveling_check(model, weights, trajs, times)
    expected = 2.0 * 1.0 * rho10
    assert abs(res - expected) / expected < 0.1


def test_unraveling_single_trajectory_matches_consistency_semantics():
    model = catalog_model(DEPHASING)
    times = np.linspace(0.0, 1.0, 21)
    psi0 = StateVector.normalized([1.0, 1.0])
    path = evolve_pure_nonlinear(model, psi0, times)
    weights = np.ones((1, len(times)))
    res = unraveling_check(model, weights, [path], times)
    report = consistency_check(model, psi0, t_max=1.0, n_steps=20)
    # the defect rate of the single-trajectory candidate is the purity-loss
    # rate R along the path (both equal gamma here)
    assert res == pytest.approx(report.residual, rel=1e-6)


def test_unraveling_validates_weights_and_grid():
    model = catalog_model(DEPHASING)
    basis0 = StateVector.basis(2, 0)
    with pytest.raises(InvariantViolation):
        unraveling_check(model, np.array([[0.5, 0.5]]), [[basis0] * 2], [0.0, 1.0])
    bad_weights = np.array([[0.6, 0.6, 0.6], [0.3, 0.3, 0.3]])
    with pytest.raises(InvariantViolation):
        unraveling_check(
            model, bad_weights, [[basis0] * 3, [basis0] * 3], [0.0, 0.5, 1.0]
        )


def test_history_chain_repeated_projection():
    psi0 = StateVector.basis(2, 0)
    proj = np.outer(psi0.amplitudes, psi0.amplitudes.conj())
    chain = history_chain(psi0, [0.5, 1.0, 1.5], [proj, proj, proj])
    assert chain.chain_weight == pytest.approx(1.0, abs=1e-14)
    for s in chain.chain_states:
        assert fidelity(s, psi0) == pytest.approx(1.0, abs=1e-14)


def test_history_chain_orthogonal_annihilation():
    psi0 = StateVector.basis(2, 0)
    p0 = np.outer(psi0.amplitudes, psi0.amplitudes.conj())
    e1 = StateVector.basis(2, 1)
    p1 = np.outer(e1.amplitudes, e1.amplitudes.conj())
    chain = history_chain(psi0, [0.5, 1.0], [p0, p1])
    assert chain.chain_weight == 0.0
    assert len(chain.chain_states) == 1


def test_history_chain_born_weight():
    psi0 = StateVector.normalized([1.0, 1.0])
    target = StateVector.basis(2, 0)
    proj = np.outer(target.amplitudes, target.amplitudes.conj())
    chain = history_chain(psi0, [1.0], [proj])
    assert chain.chain_weight == pytest.approx(0.5, abs=1e-14)
    assert fidelity(chain.chain_states[0], target) == pytest.approx(1.0, abs=1e-14)


def test_history_chain_rejects_non_projector():
    psi0 = StateVector.basis(2, 0)
    with pytest.raises(InvariantViolation):
        history_chain(psi0, [1.0], [np.array([[0.5, 0.0], [0.0, 0.5]])])


# ---------------------------------------------------------------------------
# catalog-wide residual properties
# ---------------------------------------------------------------------------


def test_residual_nonnegative_across_catalog_sample():
    from tests_support import desk_catalog

    rng = np.random.default_rng(31415)
    for model in desk_catalog():
        for _ in range(100):
            psi = random_state(rng, model.dim)
            assert ppsd_residual(model, psi) >= -1e-12


def test_residual_scale_positive_for_dissipative_models():
    model = catalog_model(DEPHASING)
    assert residual_scale(model) == pytest.approx(1.0)  # gamma * ||Z||^2


def test_is_stationary_state_examples():
    model = catalog_model(ModelSpec("thermal_qubit", {"gamma0": 1.0, "N": 0.0}))
    assert is_stationary_state(model, StateVector.basis(2, 1))
    assert not is_stationary_state(model, StateVector.basis(2, 0))
