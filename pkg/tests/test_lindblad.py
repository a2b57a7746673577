"""Generator construction, propagation, stationary structure, unitality."""

import math

import numpy as np
import pytest

from ppsd_lab import (
    DensityMatrix,
    GridSpec,
    InvariantViolation,
    LindbladModel,
    LindbladTerm,
    ModelSpec,
    Operator,
    StateVector,
    build_liouvillian,
    catalog_model,
    dephasing_closed_form,
    is_unital,
    liouvillian_action,
    liouvillian_matrix,
    null_space_dimension,
    pauli_operators,
    position_closed_form,
    propagate,
    purity_trajectory,
    stationary_states,
)


def random_density(rng, dim) -> DensityMatrix:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return DensityMatrix(rho / rho.trace().real)


DESK_MODELS = [
    ModelSpec("dephasing_qubit", {"gamma": 1.0}),
    ModelSpec("position_decoherence", {"gamma": 1.0}, GridSpec(-4.0, 4.0, 24)),
    ModelSpec("thermal_qubit", {"gamma0": 1.0, "N": 0.5}),
    ModelSpec("damped_oscillator", {"gamma0": 1.0, "N": 0.3, "dim": 8}),
    ModelSpec("three_level_atom", {}),
    ModelSpec("multimode", {"n_modes": 2, "mode_dim": 3, "N_1": 0.2}),
    ModelSpec("phase_damped_oscillator", {"dim": 8}),
    ModelSpec("depolarizing", {}),
    ModelSpec("squeezed_vacuum_decay", {}),
    ModelSpec("nonadiabatic_driven", {"dim": 10}),
    ModelSpec("walls_collet_milburn", {"dim": 8}),
    ModelSpec("grw", {}, GridSpec(-6.0, 6.0, 24)),
    ModelSpec("csl", {}),
]


# ---------------------------------------------------------------------------
# generator
# ---------------------------------------------------------------------------


def test_dephasing_liouvillian_eigenvalues():
    model = catalog_model(ModelSpec("dephasing_qubit", {"gamma": 1.0}))
    eigs = np.sort(np.linalg.eigvals(build_liouvillian(model).matrix).real)
    np.testing.assert_allclose(eigs, [-2.0, -2.0, 0.0, 0.0], atol=1e-12)


def test_zero_model_gives_zero_generator():
    model = LindbladModel(Operator(np.zeros((2, 2))), (), dim=2)
    np.testing.assert_allclose(build_liouvillian(model).matrix, np.zeros((4, 4)))


def test_trace_functional_is_left_null_vector():
    model = catalog_model(ModelSpec("thermal_qubit", {"gamma0": 1.0, "N": 0.0}))
    sup = build_liouvillian(model).matrix
    trace_row = np.eye(2, dtype=complex).reshape(-1) @ sup
    assert np.abs(trace_row).max() < 1e-12


def test_matrix_and_action_agree_row_major():
    rng = np.random.default_rng(0)
    for spec in (DESK_MODELS[0], DESK_MODELS[3], DESK_MODELS[4], DESK_MODELS[8]):
        model = catalog_model(spec)
        sup = liouvillian_matrix(model)
        rho = random_density(rng, model.dim).matrix
        via_matrix = (sup @ rho.reshape(-1)).reshape(model.dim, model.dim)
        np.testing.assert_allclose(
            via_matrix, liouvillian_action(model, rho), atol=1e-12
        )


def test_negative_rate_rejected():
    _, _, sz, _, _ = pauli_operators()
    with pytest.raises(InvariantViolation):
        LindbladTerm(-0.5, sz)


def test_non_hermitian_hamiltonian_rejected():
    _, _, _, sp, _ = pauli_operators()
    with pytest.raises(InvariantViolation):
        LindbladModel(sp, (), dim=2)


# ---------------------------------------------------------------------------
# propagation against closed forms
# ---------------------------------------------------------------------------


def test_propagate_matches_dephasing_closed_form():
    gamma = 1.0
    model = catalog_model(ModelSpec("dephasing_qubit", {"gamma": gamma}))
    rng = np.random.default_rng(42)
    times = np.linspace(0.0, 2.0, 9)
    for _ in range(20):
        rho0 = random_density(rng, 2)
        traj = propagate(model, rho0, times)
        for t, state in zip(times, traj.states):
            np.testing.assert_allclose(
                state.matrix,
                dephasing_closed_form(rho0, gamma, t).matrix,
                atol=1e-9,
            )


def test_propagate_off_diagonal_value():
    model = catalog_model(ModelSpec("dephasing_qubit", {"gamma": 1.0}))
    rho0 = DensityMatrix(np.array([[0.5, 0.5], [0.5, 0.5]]))
    traj = propagate(model, rho0, [0.0, 0.5])
    assert traj.states[-1].matrix[0, 1].real == pytest.approx(
        0.5 * math.exp(-1.0), abs=1e-12
    )
    assert traj.states[-1].matrix[0, 1].real == pytest.approx(0.183940, abs=1e-6)


def test_propagate_time_zero_is_identity():
    model = catalog_model(ModelSpec("depolarizing", {}))
    rho0 = random_density(np.random.default_rng(5), 2)
    traj = propagate(model, rho0, [0.0])
    np.testing.assert_allclose(traj.states[0].matrix, rho0.matrix, atol=1e-14)


def test_amplitude_damping_relaxes_to_ground():
    model = catalog_model(ModelSpec("thermal_qubit", {"gamma0": 1.0, "N": 0.0}))
    excited = DensityMatrix.from_state(StateVector.basis(2, 0))
    traj = propagate(model, excited, [0.0, 20.0])
    ground = np.diag([0.0, 1.0]).astype(complex)
    np.testing.assert_allclose(traj.states[-1].matrix, ground, atol=1e-8)


def test_position_model_matches_gaussian_decay():
    grid = GridSpec(-5.0, 5.0, 64)
    gamma = 1.0
    model = catalog_model(ModelSpec("position_decoherence", {"gamma": gamma}, grid))
    x = grid.points
    psi = StateVector.normalized(np.exp(-(x**2) / (4 * 0.7**2)))
    rho0 = DensityMatrix.from_state(psi)
    traj = propagate(model, rho0, [0.0, 0.3, 1.0])
    for t, state in zip(traj.times, traj.states):
        np.testing.assert_allclose(
            state.matrix,
            position_closed_form(rho0, grid, gamma, t).matrix,
            atol=1e-9,
        )


def test_non_ascending_times_rejected():
    model = catalog_model(ModelSpec("dephasing_qubit", {}))
    rho0 = DensityMatrix.maximally_mixed(2)
    with pytest.raises(InvariantViolation):
        propagate(model, rho0, [0.0, 1.0, 0.5])


def test_purity_trajectory_dephasing_decay_law():
    model = catalog_model(ModelSpec("dephasing_qubit", {"gamma": 1.0}))
    rho0 = DensityMatrix(np.full((2, 2), 0.5, dtype=complex))
    times = np.linspace(0.0, 2.0, 21)
    t_out, purities = purity_trajectory(propagate(model, rho0, times))
    np.testing.assert_allclose(
        purities, 0.5 * (1.0 + np.exp(-4.0 * t_out)), atol=1e-10
    )


def test_purity_trajectory_constant_for_stationary_starts():
    model = catalog_model(ModelSpec("dephasing_qubit", {"gamma": 1.0}))
    diag = DensityMatrix(np.diag([0.3, 0.7]).astype(complex))
    _, purities = purity_trajectory(propagate(model, diag, np.linspace(0, 3, 7)))
    np.testing.assert_allclose(purities, purities[0], atol=1e-12)
    pure = DensityMatrix.from_state(StateVector.basis(2, 0))
    _, pure_p = purity_trajectory(propagate(model, pure, np.linspace(0, 3, 7)))
    np.testing.assert_allclose(pure_p, 1.0, atol=1e-12)


# ---------------------------------------------------------------------------
# trajectory invariants across the catalog
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("spec", DESK_MODELS, ids=lambda s: s.name)
def test_catalog_trajectories_keep_invariants(spec):
    model = catalog_model(spec)
    rng = np.random.default_rng(hash(spec.name) % 2**32)
    rho0 = random_density(rng, model.dim)
    times = np.linspace(0.0, 2.0, 9)
    traj = propagate(model, rho0, times)
    for state in traj.states:
        assert abs(state.matrix.trace().real - 1.0) < 1e-10
        assert np.linalg.eigvalsh(state.matrix).min() > -1e-8


@pytest.mark.parametrize(
    "spec",
    [DESK_MODELS[0], DESK_MODELS[2], DESK_MODELS[3], DESK_MODELS[4], DESK_MODELS[8]],
    ids=lambda s: s.name,
)
def test_semigroup_property(spec):
    model = catalog_model(spec)
    rng = np.random.default_rng(2718)
    rho0 = random_density(rng, model.dim)
    for _ in range(50):
        t, s = rng.uniform(0.05, 1.5, size=2)
        one_shot = propagate(model, rho0, [t + s]).states[-1].matrix
        first = propagate(model, rho0, [t]).states[-1]
        second = propagate(model, first, [s]).states[-1].matrix
        np.testing.assert_allclose(second, one_shot, atol=1e-8)


@pytest.mark.parametrize("spec", DESK_MODELS, ids=lambda s: s.name)
def test_exact_and_rk_methods_agree(spec):
    model = catalog_model(spec)
    rng = np.random.default_rng(99)
    rho0 = random_density(rng, model.dim)
    scale = max((t.rate for t in model.terms), default=1.0)
    times = np.linspace(0.0, 5.0 / scale, 6)
    exact = propagate(model, rho0, times, method="exact_exponential")
    rk = propagate(model, rho0, times, method="adaptive_rk")
    for a, b in zip(exact.states, rk.states):
        assert np.abs(a.matrix - b.matrix).max() < 1e-7


# ---------------------------------------------------------------------------
# stationary structure and unitality
# ---------------------------------------------------------------------------


def test_dephasing_null_space_dimension_two():
    model = catalog_model(ModelSpec("dephasing_qubit", {"gamma": 1.0}))
    assert null_space_dimension(model) == 2
    states = stationary_states(model)
    assert len(states) >= 2
    stacked = np.array([s.matrix.reshape(-1) for s in states])
    assert np.linalg.matrix_rank(stacked, tol=1e-8) == 2
    for s in states:
        assert np.abs(s.matrix - np.diag(np.diag(s.matrix))).max() < 1e-10


def test_amplitude_damping_unique_ground_stationary():
    model = catalog_model(ModelSpec("thermal_qubit", {"gamma0": 1.0, "N": 0.0}))
    states = stationary_states(model)
    assert len(states) == 1
    np.testing.assert_allclose(states[0].matrix, np.diag([0.0, 1.0]), atol=1e-10)


def test_damped_oscillator_vacuum_stationary():
    model = catalog_model(ModelSpec("damped_oscillator", {"gamma0": 1.0, "N": 0.0, "dim": 10}))
    states = stationary_states(model)
    assert len(states) == 1
    vacuum = np.zeros((10, 10), dtype=complex)
    vacuum[0, 0] = 1.0
    np.testing.assert_allclose(states[0].matrix, vacuum, atol=1e-9)


def test_unitality_examples():
    assert is_unital(catalog_model(ModelSpec("dephasing_qubit", {})))
    assert is_unital(catalog_model(ModelSpec("depolarizing", {})))
    assert not is_unital(catalog_model(ModelSpec("thermal_qubit", {"gamma0": 1.0, "N": 0.0})))


@pytest.mark.parametrize("spec", DESK_MODELS, ids=lambda s: s.name)
def test_unital_models_never_gain_purity(spec):
    model = catalog_model(spec)
    rng = np.random.default_rng(1234)
    times = np.linspace(0.0, 2.0, 16)
    if is_unital(model):
        for _ in range(5):
            traj = propagate(model, random_density(rng, model.dim), times)
            assert np.diff(traj.purities).max() <= 1e-9
    else:
        traj = propagate(model, DensityMatrix.maximally_mixed(model.dim), times)
        assert traj.purities.max() > traj.purities[0] + 1e-6
