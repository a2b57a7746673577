"""Finite-dimensional Hilbert-space primitives.

Value types (operators, pure states, density matrices, position grids) plus
the standard constructions used throughout the model catalog: Pauli matrices,
truncated bosonic ladder operators, coherent states, and diagonal position
operators on a uniform grid.

All types are immutable; every operation is a pure function, so concurrent
use from any number of threads is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvariantViolation, TruncationInsufficient

# Absolute tolerances for structural invariants (double-precision headroom).
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
NORM_TOL = 1e-12
POSITIVITY_TOL = 1e-10

#: Default Fock-space truncation used by the bosonic catalog models.
DEFAULT_FOCK_DIM = 40

#: Population allowed on the top truncated level of a coherent state.
COHERENT_LEAKAGE_TOL = 1e-10


def _as_complex_matrix(matrix) -> np.ndarray:
    m = np.array(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvariantViolation(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvariantViolation("matrix entries must be finite")
    return m


@dataclass(frozen=True)
class Operator:
    """A linear operator on a dim-dimensional Hilbert space."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_complex_matrix(self.matrix))
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return bool(np.abs(self.matrix - self.matrix.conj().T).max() <= tol)

    def dagger(self) -> "Operator":
        return Operator(self.matrix.conj().T)


@dataclass(frozen=True)
class StateVector:
    """A normalized pure state; Euclidean norm must be 1 within 1e-12."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(amps)):
            raise InvariantViolation("state amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvariantViolation(f"state norm {norm!r} is not 1 within {NORM_TOL}")
        object.__setattr__(self, "amplitudes", amps)
        self.amplitudes.setflags(write=False)

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        """Build a StateVector from an unnormalized amplitude vector."""
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0.0 or not np.isfinite(norm):
            raise InvariantViolation("cannot normalize a zero or non-finite vector")
        return cls(amps / norm)

    @classmethod
    def basis(cls, dim: int, index: int) -> "StateVector":
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> np.ndarray:
        """The rank-1 projector |psi><psi| as a raw matrix."""
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.projector())


@dataclass(frozen=True)
class DensityMatrix:
    """A mixed state: Hermitian, unit trace, positive semidefinite.

    ``eig_tol`` is the slack allowed on the minimum eigenvalue; the default
    -1e-10 suits freshly constructed states, while long propagations validate
    at their own (looser) gate.
    """

    matrix: np.ndarray
    eig_tol: float = field(default=POSITIVITY_TOL, compare=False)

    def __post_init__(self):
        m = _as_complex_matrix(self.matrix)
        herm_defect = np.abs(m - m.conj().T).max()
        if herm_defect > HERMITICITY_TOL:
            raise InvariantViolation(
                f"density matrix is not Hermitian (defect {herm_defect:.3e})"
            )
        tr = m.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvariantViolation(f"density matrix trace {tr!r} is not 1")
        min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
        if min_eig < -abs(self.eig_tol):
            raise InvariantViolation(
                f"density matrix has eigenvalue {min_eig:.3e} below -{abs(self.eig_tol):.1e}"
            )
        object.__setattr__(self, "matrix", m)
        self.matrix.setflags(write=False)

    @classmethod
    def from_state(cls, psi: StateVector) -> "DensityMatrix":
        return cls(psi.projector())

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class GridSpec:
    """A uniform one-dimensional position grid."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise InvariantViolation("grid requires x_min < x_max")
        if self.n_points < 8:
            raise InvariantViolation("grid requires at least 8 points")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)


DEFAULT_GRID = GridSpec(-5.0, 5.0, 128)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def _density_array(rho) -> np.ndarray:
    """Accept a DensityMatrix or a raw matrix; validate the raw case."""
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return DensityMatrix(rho).matrix


def _state_array(psi) -> np.ndarray:
    if isinstance(psi, StateVector):
        return psi.amplitudes
    return StateVector(np.asarray(psi, dtype=complex).reshape(-1)).amplitudes


def _operator_array(op) -> np.ndarray:
    if isinstance(op, Operator):
        return op.matrix
    return _as_complex_matrix(op)


def purity(rho) -> float:
    """tr(rho^2); equals 1 exactly iff rho is a rank-1 projector.

    Lies in (0, 1] for any valid density matrix, with minimum 1/dim at the
    maximally mixed state.
    """
    m = _density_array(rho)
    # For Hermitian rho, tr(rho^2) = sum |rho_ij|^2.
    return float(np.vdot(m, m).real)


def expectation(op, psi) -> complex:
    """<psi| op |psi>; real within 1e-12 when op is Hermitian."""
    a = _operator_array(op)
    v = _state_array(psi)
    if a.shape[0] != v.shape[0]:
        raise DimensionMismatch(f"operator dim {a.shape[0]} vs state dim {v.shape[0]}")
    return complex(np.vdot(v, a @ v))


def variance(op, psi) -> float:
    """Var(op) = <op^2> - <op>^2 for a Hermitian operator; non-negative."""
    a = _operator_array(op)
    if np.abs(a - a.conj().T).max() > HERMITICITY_TOL:
        raise InvariantViolation("variance requires a Hermitian operator")
    v = _state_array(psi)
    if a.shape[0] != v.shape[0]:
        raise DimensionMismatch(f"operator dim {a.shape[0]} vs state dim {v.shape[0]}")
    av = a @ v
    mean = np.vdot(v, av).real
    second = np.vdot(av, av).real  # <psi|a^2|psi> for Hermitian a
    return float(second - mean * mean)


def pauli_operators() -> tuple[Operator, Operator, Operator, Operator, Operator]:
    """The qubit operators (sigma_x, sigma_y, sigma_z, sigma_+, sigma_-).

    Basis ordering is (|+>, |->) with sigma_z = diag(+1, -1), so
    sigma_- = |-><+| lowers and [sigma_+, sigma_-] = sigma_z.
    """
    sx = Operator(np.array([[0, 1], [1, 0]], dtype=complex))
    sy = Operator(np.array([[0, -1j], [1j, 0]], dtype=complex))
    sz = Operator(np.array([[1, 0], [0, -1]], dtype=complex))
    sp = Operator(np.array([[0, 1], [0, 0]], dtype=complex))
    sm = Operator(np.array([[0, 0], [1, 0]], dtype=complex))
    return sx, sy, sz, sp, sm


def fock_operators(dim: int) -> tuple[Operator, Operator, Operator]:
    """Truncated bosonic ladder operators (a, a_dagger, N) on dim levels.

    The canonical commutator [a, a_dagger] equals the identity on the lowest
    dim-1 levels; the truncation shows up only in the top diagonal entry,
    which equals -(dim-1) instead of +1.
    """
    if dim < 2:
        raise InvariantViolation("fock_operators requires dim >= 2")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    a_dag = a.conj().T
    n_op = np.diag(np.arange(dim, dtype=float)).astype(complex)
    return Operator(a), Operator(a_dag), Operator(n_op)


def coherent_state(alpha: complex, dim: int = DEFAULT_FOCK_DIM) -> StateVector:
    """Truncated coherent state with amplitudes ~ alpha^n / sqrt(n!).

    Guards against truncation leakage: the (untruncated) Poisson weight of
    the top level must stay below 1e-10, otherwise the requested dimension
    cannot faithfully host the state and TruncationInsufficient is raised.
    """
    if dim < 2:
        raise InvariantViolation("coherent_state requires dim >= 2")
    alpha = complex(alpha)
    mod2 = abs(alpha) ** 2
    if mod2 > 0:
        # log of the Poisson weight e^{-|a|^2} |a|^{2(dim-1)} / (dim-1)!
        log_top = -mod2 + (dim - 1) * math.log(mod2) - math.lgamma(dim)
        if log_top > math.log(COHERENT_LEAKAGE_TOL):
            raise TruncationInsufficient(
                f"top-level population exp({log_top:.2f}) exceeds "
                f"{COHERENT_LEAKAGE_TOL:.0e}; increase dim for alpha={alpha}"
            )
    n = np.arange(dim)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    if alpha == 0:
        return StateVector.basis(dim, 0)
    log_mod = n * math.log(abs(alpha)) - 0.5 * log_fact
    phases = np.exp(1j * n * np.angle(alpha))
    amps = np.exp(log_mod - log_mod.max()) * phases
    return StateVector.normalized(amps)


def position_operator(grid: GridSpec) -> Operator:
    """Diagonal position operator carrying the grid abscissae."""
    return Operator(np.diag(grid.points).astype(complex))
