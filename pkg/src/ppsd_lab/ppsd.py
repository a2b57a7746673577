"""Pure pure-state dynamics (PPSD) analysis.

"Pure pure-state dynamics" means evolution under a Markovian master equation
that keeps an initially pure state exactly pure at every instant.  A pure
state can stay pure only while

    R(psi) = sum_i gamma_i ( <L_i^dag L_i> - <L_i><L_i^dag> ) = 0,

since the purity of |psi><psi| obeys d tr(rho^2)/dt = -2 R(psi).  Each term
of R is non-negative by Cauchy-Schwarz, so R >= 0, vanishing only when psi is
a simultaneous eigenvector of every jump operator with nonzero rate.

This module evaluates the residual R, builds the state-dependent effective
(non-Hermitian) generator of the purity-preserving flow, integrates that flow,
checks candidate pure trajectories against the full master equation, searches
the unit sphere for zero-residual states, verifies pure-state unravelings of
density-matrix trajectories, and evaluates projector history chains.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize

from .errors import (
    DimensionMismatch,
    InvariantViolation,
    NormBlowUp,
)
from .hilbert import DensityMatrix, Operator, StateVector, purity
from .lindblad import (
    LindbladModel,
    liouvillian_action,
    liouvillian_adjoint_action,
    liouvillian_norm,
    propagate,
    stationarity_defect,
)

#: Relative residual threshold declaring a state "zero residual": a state
#: qualifies when R(psi) < PPSD_RESIDUAL_RTOL * residual_scale(model).
PPSD_RESIDUAL_RTOL = 1e-9

#: Allowed norm drift of the nonlinear integrator, per unit time and per
#: integration segment.  The integrated flow is norm-preserving by
#: construction, so these only trip on an integrator breakdown.
NORM_DRIFT_PER_TIME = 1e-6
NORM_DRIFT_PER_STEP = 1e-3

VERDICT_PPSD = "ppsd_trajectory"
VERDICT_STATIONARY = "stationary_only"
VERDICT_NO_PPSD = "no_ppsd"

_RK_OPTIONS = dict(method="DOP853", rtol=1e-10, atol=1e-12)


@dataclass(frozen=True)
class PpsdReport:
    """Outcome of examining one candidate pure state.

    ``residual`` is the largest purity-loss rate R seen along the candidate's
    pure path (just R(psi) when no path was integrated), ``consistency_gap``
    the largest trace distance between the nonlinear pure evolution and the
    master-equation evolution of the same initial projector, and
    ``max_impurity`` the largest 1 - tr(rho^2) of the master-equation path.
    """

    residual: float
    state: StateVector
    is_stationary: bool
    consistency_gap: float
    verdict: str
    max_impurity: float = 0.0

    def __post_init__(self):
        if self.residual < -1e-12:
            raise InvariantViolation(f"residual {self.residual} below -1e-12")
        if self.verdict not in (VERDICT_PPSD, VERDICT_STATIONARY, VERDICT_NO_PPSD):
            raise InvariantViolation(f"unknown verdict {self.verdict!r}")
        if self.verdict == VERDICT_PPSD and self.is_stationary:
            raise InvariantViolation("a stationary state is not a trajectory")


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the sphere search (all deterministic given ``seed``)."""

    n_restarts: int = 32
    seed: int = 0
    residual_tol: float = PPSD_RESIDUAL_RTOL
    max_iterations: int = 400
    dedupe_fidelity: float = 0.999

    def __post_init__(self):
        if self.n_restarts < 1:
            raise InvariantViolation("n_restarts must be positive")
        if self.residual_tol <= 0:
            raise InvariantViolation("residual_tol must be positive")
        if self.max_iterations < 1:
            raise InvariantViolation("max_iterations must be positive")
        if not 0.0 < self.dedupe_fidelity < 1.0:
            raise InvariantViolation("dedupe_fidelity must lie in (0, 1)")


@dataclass(frozen=True)
class HistoryChain:
    """A projector chain applied along a time grid.

    ``chain_states`` holds the normalized post-projection states; the chain
    is truncated at the first projection that annihilates the state, in
    which case ``chain_weight`` is 0.
    """

    times: tuple[float, ...]
    projectors: tuple[Operator, ...]
    chain_states: tuple[StateVector, ...]
    chain_weight: float

    def __post_init__(self):
        if self.chain_weight < 0:
            raise InvariantViolation("chain_weight must be >= 0")


# ---------------------------------------------------------------------------
# residual and effective generator
# ---------------------------------------------------------------------------


def _model_term_arrays(model: LindbladModel):
    """(rate, L, L^dag L) triples for all nonzero-rate terms."""
    out = []
    for term in model.terms:
        if term.rate == 0.0:
            continue
        L = term.op.matrix
        out.append((term.rate, L, L.conj().T @ L))
    return out


def residual_scale(model: LindbladModel) -> float:
    """sum_i gamma_i ||L_i||_2^2, the natural rate scale of the residual."""
    total = 0.0
    for term in model.terms:
        if term.rate == 0.0:
            continue
        total += term.rate * float(np.linalg.norm(term.op.matrix, 2)) ** 2
    return total


def _check_state_dim(model: LindbladModel, v: np.ndarray):
    if v.shape[0] != model.dim:
        raise DimensionMismatch(
            f"state dim {v.shape[0]} does not match model dim {model.dim}"
        )


def ppsd_residual_terms(model: LindbladModel, psi) -> np.ndarray:
    """Per-term contributions gamma_i (<L_i^dag L_i> - |<L_i>|^2).

    Each entry is non-negative up to roundoff (Cauchy-Schwarz with
    gamma_i >= 0); the residual is their sum.
    """
    v = psi.amplitudes if isinstance(psi, StateVector) else StateVector(psi).amplitudes
    _check_state_dim(model, v)
    vals = []
    for rate, L, _ in _model_term_arrays(model):
        Lv = L @ v
        mean = np.vdot(v, Lv)
        second = np.vdot(Lv, Lv).real
        vals.append(rate * (second - abs(mean) ** 2))
    return np.asarray(vals, dtype=float)


def ppsd_residual(model: LindbladModel, psi) -> float:
    """Purity-loss rate R(psi) = sum_i gamma_i (<L_i^dag L_i> - <L_i><L_i^dag>).

    Equals sum_i gamma_i Var(L_i, psi) when every jump operator is Hermitian.
    The value is real by construction; any imaginary part beyond 1e-12 would
    signal numerical corruption and raises.
    """
    v = psi.amplitudes if isinstance(psi, StateVector) else StateVector(psi).amplitudes
    _check_state_dim(model, v)
    total = 0.0 + 0.0j
    for rate, L, LdL in _model_term_arrays(model):
        mean = np.vdot(v, L @ v)
        total += rate * (np.vdot(v, LdL @ v) - mean * np.conj(mean))
    if abs(total.imag) > 1e-12:
        raise InvariantViolation(f"residual has imaginary part {total.imag:.3e}")
    return float(total.real)


def effective_hamiltonian(model: LindbladModel, psi) -> Operator:
    """State-dependent generator of the purity-preserving flow.

    H_eff = H + i sum_i gamma_i ( <L_i^dag> L_i - 1/2 <L_i^dag L_i> I
                                  - 1/2 L_i^dag L_i ),
    non-Hermitian in general.
    """
    v = psi.amplitudes if isinstance(psi, StateVector) else StateVector(psi).amplitudes
    _check_state_dim(model, v)
    d = model.dim
    eye = np.eye(d, dtype=complex)
    h_eff = model.hamiltonian.matrix.astype(complex).copy()
    for rate, L, LdL in _model_term_arrays(model):
        mean_dag = np.vdot(v, L.conj().T @ v)
        mean_LdL = np.vdot(v, LdL @ v)
        h_eff += 1j * rate * (mean_dag * L - 0.5 * mean_LdL * eye - 0.5 * LdL)
    return Operator(h_eff)


# ---------------------------------------------------------------------------
# nonlinear pure-state flow
# ---------------------------------------------------------------------------


def _pure_flow_rhs(model: LindbladModel):
    terms = _model_term_arrays(model)
    h = model.hamiltonian.matrix

    def rhs(_t, y):
        nrm = np.linalg.norm(y)
        u = y / nrm
        drift = -1j * (h @ u)
        r_val = 0.0
        for rate, L, LdL in terms:
            Lu = L @ u
            mean = np.vdot(u, Lu)
            mean_LdL = np.vdot(u, LdL @ u).real
            drift += rate * (np.conj(mean) * Lu - 0.5 * mean_LdL * u - 0.5 * (LdL @ u))
            r_val += rate * (mean_LdL - abs(mean) ** 2)
        # Scalar counterterm: removes the norm decay -2 R |psi|^2 of the raw
        # Schroedinger-like flow.  It is a multiple of u, so the ray
        # trajectory is untouched; only the bookkeeping norm changes.
        drift += r_val * u
        return drift * nrm

    return rhs


def evolve_pure_nonlinear(
    model: LindbladModel, psi0, times, return_drift: bool = False
):
    """Integrate the nonlinear purity-preserving flow d psi/dt = -i H_eff psi.

    The flow is integrated in its norm-preserving gauge (a scalar counterterm
    cancels the analytic norm decay without altering the ray), with DOP853 at
    rtol 1e-10, renormalizing after each accepted output segment.  Residual
    norm drift is recorded; more than 1e-3 within one segment raises
    NormBlowUp and a sustained rate above 1e-6 per unit time raises
    IntegrationFailure, both signalling integrator breakdown.
    """
    v = psi0.amplitudes if isinstance(psi0, StateVector) else StateVector(psi0).amplitudes
    _check_state_dim(model, v)
    times = np.asarray(times, dtype=float).reshape(-1)
    if times.size == 0 or times[0] != 0.0 or np.any(np.diff(times) < 0):
        raise InvariantViolation("times must ascend from 0")
    rhs = _pure_flow_rhs(model)
    states = [StateVector(v.copy())]
    drifts = [0.0]
    y = v.astype(complex)
    for t0, t1 in zip(times[:-1], times[1:]):
        if t1 == t0:
            states.append(states[-1])
            drifts.append(0.0)
            continue
        sol = solve_ivp(rhs, (t0, t1), y, **_RK_OPTIONS)
        if not sol.success:
            raise NormBlowUp(f"pure-state integration failed: {sol.message}")
        y = sol.y[:, -1]
        drift = abs(np.linalg.norm(y) - 1.0)
        if drift > NORM_DRIFT_PER_STEP:
            raise NormBlowUp(
                f"norm drift {drift:.3e} in one segment at t={t1}"
            )
        if drift > NORM_DRIFT_PER_TIME * max(t1 - t0, 1e-12):
            raise NormBlowUp(
                f"norm drift rate {drift / (t1 - t0):.3e} per unit time at t={t1}"
            )
        y = y / np.linalg.norm(y)
        drifts.append(drift)
        states.append(StateVector(y.copy()))
    if return_drift:
        return states, np.asarray(drifts)
    return states


# ---------------------------------------------------------------------------
# consistency between pure flow and master equation
# ---------------------------------------------------------------------------


def trace_distance(rho, sigma) -> float:
    """(1/2) || rho - sigma ||_1 between two density matrices."""
    a = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    b = sigma.matrix if isinstance(sigma, DensityMatrix) else np.asarray(sigma, dtype=complex)
    diff = (a - b + (a - b).conj().T) / 2
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


def is_stationary_state(
    model: LindbladModel, psi, rel_tol: float = PPSD_RESIDUAL_RTOL
) -> bool:
    """Whether |psi><psi| is annihilated by the generator, relative to ||L||."""
    v = psi.amplitudes if isinstance(psi, StateVector) else StateVector(psi).amplitudes
    _check_state_dim(model, v)
    norm = liouvillian_norm(model)
    if norm == 0.0:
        return True
    defect = stationarity_defect(model, np.outer(v, v.conj()))
    return bool(defect < rel_tol * norm)


def consistency_check(
    model: LindbladModel,
    psi0,
    t_max: float,
    n_steps: int = 50,
    tol: float = 1e-6,
) -> PpsdReport:
    """Compare the purity-preserving flow of psi0 with the master equation.

    Runs evolve_pure_nonlinear and the exact master-equation propagation of
    |psi0><psi0| on a common grid.  The report carries the largest trace
    distance between the two paths (consistency_gap), the largest
    purity-loss rate R along the pure path (residual) and the largest
    1 - tr(rho^2) of the mixed path (max_impurity).

    Verdict:
      * stationary_only -- |psi0><psi0| is a fixed point of the generator;
      * ppsd_trajectory -- non-stationary, residual below the relative gate
        PPSD_RESIDUAL_RTOL * residual_scale(model), and consistency_gap
        below ``tol``;
      * no_ppsd        -- everything else.
    """
    if t_max <= 0 or n_steps < 1:
        raise InvariantViolation("t_max must be > 0 and n_steps >= 1")
    psi0 = psi0 if isinstance(psi0, StateVector) else StateVector(psi0)
    times = np.linspace(0.0, float(t_max), int(n_steps) + 1)
    pure_path = evolve_pure_nonlinear(model, psi0, times)
    traj = propagate(model, DensityMatrix.from_state(psi0), times)
    gap = max(
        trace_distance(np.outer(p.amplitudes, p.amplitudes.conj()), s.matrix)
        for p, s in zip(pure_path, traj.states)
    )
    max_resid = max(ppsd_residual(model, p) for p in pure_path)
    max_impurity = float(np.max(1.0 - traj.purities))
    stationary = is_stationary_state(model, psi0)
    if stationary:
        verdict = VERDICT_STATIONARY
    elif max_resid < PPSD_RESIDUAL_RTOL * max(residual_scale(model), 1e-300) and gap < tol:
        verdict = VERDICT_PPSD
    else:
        verdict = VERDICT_NO_PPSD
    return PpsdReport(
        residual=max(max_resid, 0.0),
        state=psi0,
        is_stationary=stationary,
        consistency_gap=gap,
        verdict=verdict,
        max_impurity=max_impurity,
    )


# ---------------------------------------------------------------------------
# sphere search
# ---------------------------------------------------------------------------


def _thread_count() -> int:
    raw = os.environ.get("PPSD_LAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise InvariantViolation(f"PPSD_LAB_THREADS={raw!r} is not an integer") from exc
    if n < 1:
        raise InvariantViolation("PPSD_LAB_THREADS must be a positive integer")
    return n


def _residual_and_grad(terms, v):
    """Residual and its Wirtinger gradient d R / d conj(psi) at unit psi."""
    val = 0.0
    grad = np.zeros_like(v)
    for rate, L, LdL in terms:
        Lv = L @ v
        Ldv = L.conj().T @ v
        mean = np.vdot(v, Lv)
        second = np.vdot(Lv, Lv).real
        val += rate * (second - abs(mean) ** 2)
        grad += rate * (
            LdL @ v
            - np.conj(mean) * Lv
            - mean * Ldv
            + (2 * abs(mean) ** 2 - second) * v
        )
    return val, grad


def _polish_on_sphere(terms, v, max_iter: int = 400):
    """Projected-gradient descent with backtracking on the unit sphere."""
    v = v / np.linalg.norm(v)
    val, grad = _residual_and_grad(terms, v)
    step = 1.0
    for _ in range(max_iter):
        rgrad = grad - np.vdot(v, grad) * v
        gn2 = np.vdot(rgrad, rgrad).real
        if gn2 < 1e-30:
            break
        improved = False
        while step > 1e-14:
            cand = v - step * rgrad
            cand = cand / np.linalg.norm(cand)
            cand_val, cand_grad = _residual_and_grad(terms, cand)
            if cand_val < val - 0.25 * step * gn2:
                v, val, grad = cand, cand_val, cand_grad
                step = min(step * 2.0, 1e6)
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return val, v


def _mean_field_refine(terms, v, max_iter: int = 12):
    """Self-consistent refinement of a near-minimum of the residual.

    R(psi) = <psi| K(psi) |psi> with the positive-semidefinite mean-field
    operator K(psi) = sum_i gamma_i (L_i - <L_i>)^dag (L_i - <L_i>); near a
    minimum, iterating "smallest eigenvector of K(v)" resolves the state far
    beyond what the quadratic residual landscape lets a gradient method do.
    Returns the better of (input, refined), with a roundoff slack so an
    exactly-zero refined residual beats a spuriously negative one.
    """
    d = v.shape[0]
    eye = np.eye(d, dtype=complex)
    slack = 1e-14 * sum(rate * np.linalg.norm(L) ** 2 for rate, L, _ in terms)
    best_val, _ = _residual_and_grad(terms, v)
    best_v = v
    for _ in range(max_iter):
        K = np.zeros((d, d), dtype=complex)
        for rate, L, LdL in terms:
            mean = np.vdot(v, L @ v)
            K += rate * (
                LdL
                - np.conj(mean) * L
                - mean * L.conj().T
                + abs(mean) ** 2 * eye
            )
        _, vecs = np.linalg.eigh(K)
        v_new = vecs[:, 0]
        val_new, _ = _residual_and_grad(terms, v_new)
        if val_new < best_val + slack:
            best_val, best_v = min(val_new, best_val), v_new
        if abs(1.0 - abs(np.vdot(v_new, v)) ** 2) < 1e-28:
            break
        v = v_new
    return best_val, best_v


def _stationarity_snap(model: LindbladModel, v: np.ndarray) -> np.ndarray:
    """Pull a near-stationary candidate onto the stationary manifold.

    Jump operators with nilpotent structure give the residual a quartic
    valley around their fixed point, so a residual-driven search resolves
    the state only to ~(machine eps)^(1/4).  The stationarity functional
    f(psi) = ||L[|psi><psi|]||_F^2 is quadratic in the state error and can
    be polished to machine precision; candidates whose defect is already
    within 1e-3 of the generator scale are refined by projected descent on
    f, guarded by a fidelity check so the snap never changes the candidate.
    """
    norm = liouvillian_norm(model)
    if norm == 0.0:
        return v
    rho = np.outer(v, v.conj())
    defect = stationarity_defect(model, rho)
    if defect > 1e-3 * norm or defect == 0.0:
        return v
    current = v.copy()
    f_val = defect**2

    def grad(u):
        rho_u = np.outer(u, u.conj())
        b = liouvillian_adjoint_action(model, liouvillian_action(model, rho_u))
        return 2.0 * (b @ u)

    step = 1.0 / (4.0 * norm**2)
    for _ in range(200):
        g = grad(current)
        g = g - np.vdot(current, g) * current
        gn2 = np.vdot(g, g).real
        if gn2 < (1e-14 * norm) ** 2 * 4:
            break
        improved = False
        trial = step
        while trial > 1e-22 / max(norm**2, 1e-30):
            cand = current - trial * g
            cand = cand / np.linalg.norm(cand)
            f_cand = stationarity_defect(model, np.outer(cand, cand.conj())) ** 2
            if f_cand < f_val - 0.25 * trial * gn2:
                current, f_val = cand, f_cand
                step = min(trial * 2.0, 1.0 / norm**2)
                improved = True
                break
            trial *= 0.5
        if not improved:
            break
    if abs(np.vdot(current, v)) ** 2 < 1.0 - 1e-6:
        return v
    return current


def _gauge_fix(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first significant amplitude is real > 0."""
    idx = int(np.argmax(np.abs(v) > 1e-8))
    phase = v[idx] / abs(v[idx]) if abs(v[idx]) > 0 else 1.0
    return v / phase


def fidelity(psi_a, psi_b) -> float:
    """|<a|b>|^2 between two pure states."""
    a = psi_a.amplitudes if isinstance(psi_a, StateVector) else np.asarray(psi_a)
    b = psi_b.amplitudes if isinstance(psi_b, StateVector) else np.asarray(psi_b)
    return float(abs(np.vdot(a, b)) ** 2)


def _default_consistency_horizon(model: LindbladModel) -> float:
    scale = residual_scale(model)
    return 2.0 / scale if scale > 0 else 1.0


def ppsd_search(model: LindbladModel, config: SearchConfig = SearchConfig()) -> list[PpsdReport]:
    """Search the unit sphere for zero-residual pure states.

    Each seeded restart runs derivative-free Nelder-Mead on the real/imaginary
    coordinates of an unnormalized state (the residual is evaluated on the
    normalized vector, removing the scale gauge), followed by a
    projected-gradient polish on the sphere.  Minima with residual below
    ``residual_tol * residual_scale(model)`` are kept, phase-gauge-fixed,
    merged deterministically by (residual, lexicographic amplitudes), and
    deduplicated: any two reported states have pairwise fidelity below
    ``dedupe_fidelity``.

    Every surviving state is classified: stationary states get verdict
    stationary_only; non-stationary ones are consistency-checked against the
    master equation.  An empty list means no pure state can satisfy the
    purity-preservation condition at the configured tolerance -- a meaningful
    outcome, not a failure.

    Restarts run on up to PPSD_LAB_THREADS threads; results are identical
    for identical seeds regardless of thread count.
    """
    terms = _model_term_arrays(model)
    d = model.dim
    scale = residual_scale(model)
    if not terms or scale == 0.0:
        # No dissipation: every state trivially preserves purity; report the
        # configuration as "no zero-residual candidates" rather than the
        # whole sphere.
        return []
    rng = np.random.default_rng(config.seed)
    starts = rng.standard_normal((config.n_restarts, 2 * d))

    def objective(x):
        v = x[:d] + 1j * x[d:]
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            return scale
        val, _ = _residual_and_grad(terms, v / nrm)
        return val

    def run_restart(x0):
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options=dict(maxiter=config.max_iterations, fatol=1e-14 * scale, xatol=1e-10),
        )
        v = res.x[:d] + 1j * res.x[d:]
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            v = x0[:d] + 1j * x0[d:]
            nrm = np.linalg.norm(v)
        val, v = _polish_on_sphere(terms, v / nrm)
        return _mean_field_refine(terms, v)

    n_threads = min(_thread_count(), config.n_restarts)
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(run_restart, starts))
    else:
        results = [run_restart(x0) for x0 in starts]

    hits = [
        (val, _gauge_fix(v))
        for val, v in results
        if val < config.residual_tol * scale
    ]
    # Deterministic merge order: residual first, then lexicographic on the
    # rounded gauge-fixed amplitudes.
    hits.sort(key=lambda h: (h[0], tuple(np.round(h[1].view(float), 10))))
    kept: list[tuple[float, np.ndarray]] = []
    for val, v in hits:
        if all(abs(np.vdot(v, u)) ** 2 < config.dedupe_fidelity for _, u in kept):
            kept.append((val, v))

    reports = []
    horizon = _default_consistency_horizon(model)
    for val, v in kept:
        v = _gauge_fix(_stationarity_snap(model, v))
        psi = StateVector.normalized(v)
        if is_stationary_state(model, psi, config.residual_tol):
            reports.append(
                PpsdReport(
                    residual=max(val, 0.0),
                    state=psi,
                    is_stationary=True,
                    consistency_gap=0.0,
                    verdict=VERDICT_STATIONARY,
                )
            )
        else:
            report = consistency_check(model, psi, t_max=horizon, n_steps=40)
            reports.append(replace(report, residual=max(val, 0.0)))
    return reports


# ---------------------------------------------------------------------------
# unraveling and history chains
# ---------------------------------------------------------------------------


def _central_difference(values: list[np.ndarray], times: np.ndarray, j: int) -> np.ndarray:
    """Three-point first derivative at interior index j (non-uniform safe)."""
    h1 = times[j] - times[j - 1]
    h2 = times[j + 1] - times[j]
    return (
        h1 * h1 * values[j + 1]
        + (h2 * h2 - h1 * h1) * values[j]
        - h2 * h2 * values[j - 1]
    ) / (h1 * h2 * (h1 + h2))


def unraveling_check(model: LindbladModel, weights, trajectories, times) -> float:
    """Residual of a candidate pure-state unraveling of the master equation.

    A candidate decomposition rho(t) = sum_k p_k(t) |psi_k(t)><psi_k(t)| is a
    valid unraveling iff its time derivative (computed term by term with
    central differences) matches the generator applied to the mixture.  The
    returned value is the maximum over interior grid times of the max-entry
    norm of that mismatch; small values certify the candidate, large values
    falsify it.
    """
    times = np.asarray(times, dtype=float).reshape(-1)
    if times.size < 3:
        raise InvariantViolation("unraveling check needs at least 3 grid points")
    if np.any(np.diff(times) <= 0):
        raise InvariantViolation("times must be strictly ascending")
    p = np.asarray(weights, dtype=float)
    if p.ndim != 2 or p.shape[1] != times.size:
        raise DimensionMismatch("weights must have shape (n_trajectories, n_times)")
    if np.abs(p.sum(axis=0) - 1.0).max() > 1e-10:
        raise InvariantViolation("weights must sum to 1 at every sample")
    if len(trajectories) != p.shape[0]:
        raise DimensionMismatch("weights and trajectories disagree in count")
    projectors = []
    for traj in trajectories:
        if len(traj) != times.size:
            raise DimensionMismatch("every trajectory must match the time grid")
        projectors.append(
            [
                (s if isinstance(s, StateVector) else StateVector(s)).projector()
                for s in traj
            ]
        )

    worst = 0.0
    for j in range(1, times.size - 1):
        mix = sum(p[k, j] * projectors[k][j] for k in range(p.shape[0]))
        lhs = liouvillian_action(model, mix)
        rhs = np.zeros_like(mix)
        for k in range(p.shape[0]):
            pdot = _central_difference([np.array(p[k, i]) for i in range(times.size)], times, j)
            proj_dot = _central_difference(projectors[k], times, j)
            rhs += float(pdot) * projectors[k][j] + p[k, j] * proj_dot
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def history_chain(psi0, times, projectors) -> HistoryChain:
    """Apply a chain of rank-1 projectors along a time grid.

    Each step projects the previous state and renormalizes; the chain weight
    accumulates the squared norms (the joint realization weight).  A
    projection onto an orthogonal subspace kills the chain: weight 0 and the
    state list is truncated there.
    """
    psi0 = psi0 if isinstance(psi0, StateVector) else StateVector(psi0)
    times = tuple(float(t) for t in np.asarray(times, dtype=float).reshape(-1))
    if len(times) != len(projectors):
        raise DimensionMismatch("times and projectors must have equal length")
    if any(t2 <= t1 for t1, t2 in zip(times[:-1], times[1:])):
        raise InvariantViolation("times must be strictly ascending")
    ops = []
    for proj in projectors:
        mat = proj.matrix if isinstance(proj, Operator) else np.asarray(proj, dtype=complex)
        if np.abs(mat - mat.conj().T).max() > 1e-10:
            raise InvariantViolation("projector must be Hermitian")
        if np.abs(mat @ mat - mat).max() > 1e-10:
            raise InvariantViolation("projector must be idempotent")
        if abs(mat.trace() - 1.0) > 1e-10:
            raise InvariantViolation("projector must have rank 1")
        ops.append(Operator(mat))

    states: list[StateVector] = []
    weight = 1.0
    current = psi0.amplitudes
    for op in ops:
        nxt = op.matrix @ current
        w = float(np.vdot(nxt, nxt).real)
        if w <= 1e-30:
            weight = 0.0
            break
        weight *= w
        current = nxt / np.sqrt(w)
        states.append(StateVector(current.copy()))
    return HistoryChain(
        times=times,
        projectors=tuple(ops),
        chain_states=tuple(states),
        chain_weight=weight,
    )
