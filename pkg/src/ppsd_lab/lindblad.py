"""Markovian master-equation machinery.

A model is a Hamiltonian plus rate-weighted jump operators; its generator is

    d rho / dt = -i [H, rho] + sum_i gamma_i (L_i rho L_i^dag
                                              - 1/2 {L_i^dag L_i, rho}).

This module builds the generator as a dim^2 x dim^2 superoperator, propagates
density matrices exactly (matrix exponential) or by adaptive Runge-Kutta,
extracts stationary states from the generator's null space, and decides
unitality (whether the maximally mixed state is preserved).

Vectorization convention: row-major (C order), vec(rho)[i*d + j] = rho[i, j].
Under this convention

    vec(A rho B) = (A kron B^T) vec(rho),

so the commutator part reads -i (H kron I - I kron H^T) and each dissipator
gamma (L kron conj(L) - 1/2 (L^dag L) kron I - 1/2 I kron (L^dag L)^T).
The trace functional vec(I) is a left null vector of every generator.

Superoperator norms are Frobenius norms throughout.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .errors import DimensionMismatch, IntegrationFailure, InvariantViolation
from .hilbert import HERMITICITY_TOL, DensityMatrix, Operator, _operator_array, purity

#: Maximum dimension for which exp(L) is formed densely; larger non-diagonal
#: models fall back to adaptive RK on vec(rho).
DENSE_EXPM_DIM_LIMIT = 64

#: Invariant gate applied to every propagated state (trace error, negativity).
PROPAGATION_GATE = 1e-8

_RK_OPTIONS = dict(method="DOP853", rtol=1e-10, atol=1e-12)


@dataclass(frozen=True)
class LindbladTerm:
    """One dissipative channel: a non-negative rate and a jump operator."""

    rate: float
    op: Operator

    def __post_init__(self):
        if not np.isfinite(self.rate) or self.rate < 0:
            raise InvariantViolation(f"rate must be >= 0, got {self.rate}")
        if not isinstance(self.op, Operator):
            object.__setattr__(self, "op", Operator(self.op))


@dataclass(frozen=True)
class LindbladModel:
    """A time-independent Markovian model (H, {gamma_i, L_i})."""

    hamiltonian: Operator
    terms: tuple[LindbladTerm, ...]
    dim: int
    label: str = ""
    basis_note: str = ""

    def __post_init__(self):
        if not isinstance(self.hamiltonian, Operator):
            object.__setattr__(self, "hamiltonian", Operator(self.hamiltonian))
        object.__setattr__(self, "terms", tuple(self.terms))
        h = self.hamiltonian.matrix
        if h.shape[0] != self.dim:
            raise DimensionMismatch(
                f"hamiltonian dim {h.shape[0]} does not match model dim {self.dim}"
            )
        if np.abs(h - h.conj().T).max() > HERMITICITY_TOL:
            raise InvariantViolation("hamiltonian must be Hermitian")
        for term in self.terms:
            if term.op.dim != self.dim:
                raise DimensionMismatch(
                    f"jump operator dim {term.op.dim} does not match model dim {self.dim}"
                )

    @property
    def rates(self) -> tuple[float, ...]:
        return tuple(t.rate for t in self.terms)

    @property
    def jump_operators(self) -> tuple[np.ndarray, ...]:
        return tuple(t.op.matrix for t in self.terms)


@dataclass(frozen=True)
class Superoperator:
    """A dim^2 x dim^2 matrix acting on row-major vectorized density matrices.

    Construction checks that the trace functional vec(I) is a left null
    vector (trace preservation) within 1e-10 relative to the entry scale.
    """

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.dim**2, self.dim**2):
            raise DimensionMismatch(
                f"superoperator shape {m.shape} does not match dim {self.dim}"
            )
        trace_row = np.eye(self.dim, dtype=complex).reshape(-1) @ m
        scale = max(1.0, float(np.abs(m).max()))
        defect = float(np.abs(trace_row).max())
        if defect > 1e-10 * scale:
            raise InvariantViolation(
                f"superoperator does not preserve trace (defect {defect:.3e})"
            )
        object.__setattr__(self, "matrix", m)
        self.matrix.setflags(write=False)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        d = self.dim
        return (self.matrix @ np.asarray(rho, dtype=complex).reshape(d * d)).reshape(d, d)


@dataclass(frozen=True)
class Trajectory:
    """Times, propagated states, and their purities."""

    times: np.ndarray
    states: tuple[DensityMatrix, ...]
    purities: np.ndarray = field(default=None)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) != times.shape[0]:
            raise InvariantViolation("times and states must have equal length")
        if self.purities is None:
            object.__setattr__(
                self, "purities", np.array([purity(s) for s in self.states])
            )
        else:
            object.__setattr__(self, "purities", np.asarray(self.purities, dtype=float))
        if self.purities.shape[0] != times.shape[0]:
            raise InvariantViolation("times and purities must have equal length")


# ---------------------------------------------------------------------------
# generator construction and application
# ---------------------------------------------------------------------------


def liouvillian_matrix(model: LindbladModel) -> np.ndarray:
    """The dense generator matrix under row-major vectorization."""
    d = model.dim
    eye = np.eye(d, dtype=complex)
    h = model.hamiltonian.matrix
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for term in model.terms:
        if term.rate == 0.0:
            continue
        L = term.op.matrix
        LdL = L.conj().T @ L
        sup += term.rate * (
            np.kron(L, L.conj())
            - 0.5 * np.kron(LdL, eye)
            - 0.5 * np.kron(eye, LdL.T)
        )
    return sup


def build_liouvillian(model: LindbladModel) -> Superoperator:
    """Generator of the model as a trace-preserving Superoperator."""
    return Superoperator(model.dim, liouvillian_matrix(model))


def liouvillian_action(model: LindbladModel, rho: np.ndarray) -> np.ndarray:
    """Apply the generator to a d x d matrix without forming the superoperator."""
    rho = np.asarray(rho, dtype=complex)
    h = model.hamiltonian.matrix
    out = -1j * (h @ rho - rho @ h)
    for term in model.terms:
        if term.rate == 0.0:
            continue
        L = term.op.matrix
        Ld = L.conj().T
        LdL = Ld @ L
        out += term.rate * (L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))
    return out


def liouvillian_adjoint_action(model: LindbladModel, x: np.ndarray) -> np.ndarray:
    """Apply the Frobenius adjoint of the generator (Heisenberg picture)."""
    x = np.asarray(x, dtype=complex)
    h = model.hamiltonian.matrix
    out = 1j * (h @ x - x @ h)
    for term in model.terms:
        if term.rate == 0.0:
            continue
        L = term.op.matrix
        Ld = L.conj().T
        LdL = Ld @ L
        out += term.rate * (Ld @ x @ L - 0.5 * (LdL @ x + x @ LdL))
    return out


def _diagonal_coefficients(model: LindbladModel) -> np.ndarray | None:
    """Entrywise generator coefficients when H and every L are diagonal.

    Dephasing-type models act entrywise on rho:
    d rho_ij/dt = c_ij rho_ij.  Returns the (d, d) array c, or None when the
    model has off-diagonal operator content.
    """
    mats = [model.hamiltonian.matrix] + [t.op.matrix for t in model.terms]
    for m in mats:
        if np.abs(m - np.diag(np.diag(m))).max() > 0.0:
            return None
    h = np.diag(model.hamiltonian.matrix)
    c = -1j * np.subtract.outer(h, h)
    for term in model.terms:
        if term.rate == 0.0:
            continue
        ell = np.diag(term.op.matrix)
        abs2 = np.abs(ell) ** 2
        c = c + term.rate * (
            np.multiply.outer(ell, ell.conj())
            - 0.5 * (abs2[:, None] + abs2[None, :])
        )
    return c


def liouvillian_norm(model: LindbladModel) -> float:
    """Frobenius norm of the generator (computed without densifying when
    the model is diagonal)."""
    c = _diagonal_coefficients(model)
    if c is not None:
        return float(np.linalg.norm(c))
    return float(np.linalg.norm(liouvillian_matrix(model)))


def stationarity_defect(model: LindbladModel, rho: np.ndarray) -> float:
    """|| L[rho] ||_F, the Frobenius norm of the generator applied to rho."""
    c = _diagonal_coefficients(model)
    if c is not None:
        return float(np.linalg.norm(c * np.asarray(rho, dtype=complex)))
    return float(np.linalg.norm(liouvillian_action(model, rho)))


# ---------------------------------------------------------------------------
# propagation
# ---------------------------------------------------------------------------


def _validated_state(rho: np.ndarray, t: float) -> DensityMatrix:
    """Re-symmetrize and gate-check a propagated state.

    Hermiticity is restored exactly by (rho + rho^dag)/2; trace error and
    negativity beyond 1e-8 abort the run.  Below the gate, the trace is
    renormalized to exactly 1 so the returned value satisfies the
    DensityMatrix invariants.
    """
    sym = (rho + rho.conj().T) / 2
    tr = sym.trace().real
    if abs(tr - 1.0) > PROPAGATION_GATE:
        raise IntegrationFailure(f"trace error {abs(tr - 1.0):.3e} at t={t}")
    sym = sym / tr
    min_eig = float(np.linalg.eigvalsh(sym).min())
    if min_eig < -PROPAGATION_GATE:
        raise IntegrationFailure(f"negativity {min_eig:.3e} at t={t}")
    return DensityMatrix(sym, eig_tol=PROPAGATION_GATE)


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float).reshape(-1)
    if times.size == 0:
        raise InvariantViolation("times must be non-empty")
    if times[0] < 0:
        raise InvariantViolation("times must start at t >= 0")
    if np.any(np.diff(times) < 0):
        raise InvariantViolation("times must be ascending")
    return times


def _propagate_exact(model: LindbladModel, rho0: np.ndarray, times: np.ndarray):
    c = _diagonal_coefficients(model)
    if c is not None:
        return [rho0 * np.exp(c * t) for t in times]
    d = model.dim
    sup = liouvillian_matrix(model)
    vec = rho0.reshape(d * d)
    out = []
    step_cache: dict[float, np.ndarray] = {}
    prev_t = 0.0
    for t in times:
        dt = t - prev_t
        if dt > 0:
            key = round(dt, 15)
            if key not in step_cache:
                step_cache[key] = expm(sup * dt)
            vec = step_cache[key] @ vec
        prev_t = t
        out.append(vec.reshape(d, d).copy())
    return out


def _propagate_rk(model: LindbladModel, rho0: np.ndarray, times: np.ndarray):
    d = model.dim

    def rhs(_t, y):
        return liouvillian_action(model, y.reshape(d, d)).reshape(d * d)

    t_span = (0.0, float(times[-1]) if times[-1] > 0 else 1e-30)
    sol = solve_ivp(rhs, t_span, rho0.reshape(d * d), t_eval=times, **_RK_OPTIONS)
    if not sol.success:
        raise IntegrationFailure(f"adaptive RK failed: {sol.message}")
    return [sol.y[:, k].reshape(d, d) for k in range(sol.y.shape[1])]


def propagate(model: LindbladModel, rho0, times, method: str = "exact_exponential") -> Trajectory:
    """Propagate rho0 through the model's master equation.

    ``method`` is "exact_exponential" (matrix exponential of the generator;
    entrywise-exact for diagonal models) or "adaptive_rk" (DOP853 with
    rtol 1e-10 / atol 1e-12).  Non-diagonal models with dim > 64 always use
    the RK path, since a dense exp(L) would be impractical at dim^2 > 4096.

    Every output is re-symmetrized and checked against the 1e-8 invariant
    gate; violations raise IntegrationFailure.
    """
    if method not in ("exact_exponential", "adaptive_rk"):
        raise InvariantViolation(f"unknown propagation method {method!r}")
    times = _check_times(times)
    rho0 = DensityMatrix(rho0).matrix if not isinstance(rho0, DensityMatrix) else rho0.matrix
    if rho0.shape[0] != model.dim:
        raise DimensionMismatch(
            f"state dim {rho0.shape[0]} does not match model dim {model.dim}"
        )
    use_rk = method == "adaptive_rk"
    if (
        not use_rk
        and model.dim > DENSE_EXPM_DIM_LIMIT
        and _diagonal_coefficients(model) is None
    ):
        use_rk = True
    raw = _propagate_rk(model, rho0, times) if use_rk else _propagate_exact(model, rho0, times)
    states = [_validated_state(r, t) for r, t in zip(raw, times)]
    return Trajectory(times=times, states=states)


def purity_trajectory(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """(times, purities) of a trajectory."""
    return traj.times, traj.purities


# ---------------------------------------------------------------------------
# stationary structure
# ---------------------------------------------------------------------------


def _hermitian_null_basis(null_vectors: np.ndarray, dim: int) -> list[np.ndarray]:
    """Orthonormal Hermitian basis of a dagger-closed null space."""
    candidates = []
    for k in range(null_vectors.shape[1]):
        v = null_vectors[:, k].reshape(dim, dim)
        candidates.append((v + v.conj().T) / 2)
        candidates.append((v - v.conj().T) / 2j)
    basis: list[np.ndarray] = []
    for cand in candidates:
        for b in basis:
            cand = cand - np.vdot(b, cand).real * b
        nrm = np.linalg.norm(cand)
        if nrm > 1e-8:
            basis.append(cand / nrm)
        if len(basis) == null_vectors.shape[1]:
            break
    return basis


def stationary_states(model: LindbladModel, tol: float = 1e-10) -> list[DensityMatrix]:
    """Density-matrix representatives of the generator's null space.

    Singular vectors of the generator with singular value below
    tol * ||L||_2 span the stationary subspace; they are recombined into
    Hermitian matrices and converted, where possible, to positive unit-trace
    representatives (trace-normalized elements plus positive/negative
    eigenparts).  Every returned state rho satisfies
    ||L vec(rho)|| < tol * ||L||.  An empty list is returned, with a warning,
    only if no representative passes the checks.
    """
    d = model.dim
    sup = liouvillian_matrix(model)
    svals = np.linalg.svd(sup, compute_uv=False)
    norm2 = float(svals[0])
    if norm2 == 0.0:
        return [DensityMatrix.maximally_mixed(d)]
    _, s, vh = np.linalg.svd(sup)
    null_mask = s < tol * norm2
    if not np.any(null_mask):
        warnings.warn("no numerical null space detected for the generator")
        return []
    null_vectors = vh[null_mask].conj().T
    basis = _hermitian_null_basis(null_vectors, d)

    def try_candidate(mat: np.ndarray) -> DensityMatrix | None:
        tr = mat.trace().real
        if abs(tr) < 1e-10:
            return None
        rho = (mat + mat.conj().T) / (2 * tr)
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            return None
        if np.linalg.norm(sup @ rho.reshape(d * d)) > tol * norm2 * max(1.0, np.linalg.norm(rho)):
            return None
        return DensityMatrix(rho)

    found: list[DensityMatrix] = []
    for b in basis:
        eigvals, eigvecs = np.linalg.eigh(b)
        pos = eigvecs @ np.diag(np.clip(eigvals, 0, None)) @ eigvecs.conj().T
        neg = eigvecs @ np.diag(np.clip(-eigvals, 0, None)) @ eigvecs.conj().T
        for cand in (b, pos, neg):
            got = try_candidate(cand)
            if got is None:
                continue
            if all(np.linalg.norm(got.matrix - f.matrix) > 1e-8 for f in found):
                found.append(got)
    if not found:
        warnings.warn(
            "stationary subspace detected but no positive representative found"
        )
    return found


def null_space_dimension(model: LindbladModel, tol: float = 1e-10) -> int:
    """Number of singular values of the generator below tol * ||L||_2."""
    svals = np.linalg.svd(liouvillian_matrix(model), compute_uv=False)
    if svals[0] == 0.0:
        return model.dim**2
    return int(np.sum(svals < tol * svals[0]))


def is_unital(model: LindbladModel, tol: float = 1e-10) -> bool:
    """Whether the generator annihilates the maximally mixed state I/d."""
    d = model.dim
    norm = liouvillian_norm(model)
    if norm == 0.0:
        return True
    defect = stationarity_defect(model, np.eye(d, dtype=complex) / d)
    return bool(defect < tol * norm)
