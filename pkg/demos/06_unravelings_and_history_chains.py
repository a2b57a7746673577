#!/usr/bin/env python3
"""Unraveling a mixed trajectory, and projector histories.

A candidate unraveling writes the density-matrix trajectory as a weighted
mixture of normalized pure trajectories,
rho(t) = sum_k p_k(t) |psi_k(t)><psi_k(t)|.  Differentiating term by term
and comparing against the generator applied to the mixture gives a residual
that certifies (small) or falsifies (large) the candidate.

For the dephasing qubit:

  * the stationary diagonal decomposition of a diagonal state is a valid
    unraveling (residual at roundoff);
  * freezing the eigendecomposition of a state with coherences misses the
    off-diagonal decay -- the residual equals 2 gamma |rho_01|;
  * since no pure trajectories exist for this model (any superposition
    mixes immediately), no frozen- or moving-pure-state candidate built
    from genuine solutions is available: the mixture is not dynamically
    decomposable.

History chains make the same point kinematically: projecting a state
repeatedly along a time grid assigns a weight to each "history", but with
no pure trajectories available the chain states cannot be solutions of the
dynamics between projections.

Run:  python3 demos/06_unravelings_and_history_chains.py
Exit: 0 when every check passes.
"""

import sys

import numpy as np

from ppsd_lab import (
    ModelSpec,
    StateVector,
    catalog_model,
    evolve_pure_nonlinear,
    fidelity,
    history_chain,
    unraveling_check,
)


def main() -> int:
    failures = []
    model = catalog_model(ModelSpec("dephasing_qubit", {"gamma": 1.0}))
    times = np.linspace(0.0, 1.0, 21)
    n = len(times)
    basis0, basis1 = StateVector.basis(2, 0), StateVector.basis(2, 1)

    weights = np.tile([[0.3], [0.7]], (1, n))
    ok = unraveling_check(model, weights, [[basis0] * n, [basis1] * n], times)
    print(f"stationary diagonal decomposition: residual = {ok:.2e}")
    if ok > 1e-8:
        failures.append("diagonal stationary unraveling should certify")

    rho10 = 0.3
    rho = np.array([[0.5, rho10], [rho10, 0.5]], dtype=complex)
    eigvals, eigvecs = np.linalg.eigh(rho)
    frozen = [[StateVector(eigvecs[:, k])] * n for k in range(2)]
    bad = unraveling_check(model, np.tile(eigvals[:, None], (1, n)), frozen, times)
    print(
        f"frozen eigendecomposition with coherence {rho10}: residual = {bad:.4f} "
        f"(expected 2 gamma |rho_01| = {2 * rho10})"
    )
    if abs(bad - 2 * rho10) / (2 * rho10) > 0.1:
        failures.append("coherent counterexample should fail at rate 2 gamma |rho_01|")

    # single-trajectory candidate from the purity-preserving flow
    psi0 = StateVector.normalized([1.0, 1.0])
    path = evolve_pure_nonlinear(model, psi0, times)
    single = unraveling_check(model, np.ones((1, n)), [path], times)
    print(f"single pure-flow trajectory from |+x>: residual = {single:.4f} "
          "(the purity-loss rate it cannot account for)")
    if single < 0.5:
        failures.append("a single pure path cannot reproduce dephasing")

    # history chains
    print("\nhistory chains on the dephasing qubit:")
    p_plus = np.outer(psi0.amplitudes, psi0.amplitudes.conj())
    p0 = np.outer(basis0.amplitudes, basis0.amplitudes.conj())
    p1 = np.outer(basis1.amplitudes, basis1.amplitudes.conj())

    same = history_chain(basis0, [0.5, 1.0, 1.5], [p0, p0, p0])
    print(f"  repeated projection onto the start: weight = {same.chain_weight}")
    if abs(same.chain_weight - 1.0) > 1e-12:
        failures.append("repeated projection should keep weight 1")

    killed = history_chain(basis0, [0.5, 1.0], [p0, p1])
    print(f"  orthogonal second projector: weight = {killed.chain_weight}, "
          f"chain truncated after {len(killed.chain_states)} state(s)")
    if killed.chain_weight != 0.0:
        failures.append("orthogonal projection should kill the chain")

    born = history_chain(psi0, [1.0], [p0])
    print(f"  |+x> through the |1> projector: weight = {born.chain_weight} "
          f"(Born rule 1/2), end state fidelity with |1> = "
          f"{fidelity(born.chain_states[0], basis0):.1f}")
    if abs(born.chain_weight - 0.5) > 1e-12:
        failures.append("Born weight should be 1/2")

    mixed_history = history_chain(psi0, [0.4, 0.8], [p_plus, p0])
    print(f"  |+x> -> project |+x> -> project |1>: weight = {mixed_history.chain_weight}")

    if failures:
        print("\nFAILED:")
        for f in failures:
            print(" -", f)
        return 1
    print("\nall checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
