#!/usr/bin/env python3
"""Hermitian jump families: pointer bases of measurement-like models.

When every jump operator is Hermitian, the purity-loss rate is the
rate-weighted sum of variances, so the only zero-residual states are common
eigenvectors -- and those are always stationary, so none of these models
admits a moving pure trajectory.  Four catalog models have this structure:

  * phase-damped oscillator   (jump operator N; Fock pointer basis)
  * photon-number measurement (jump operator N; Fock pointer basis)
  * spontaneous localization  (Gaussian operators exp(-alpha (x-s)^2 / 2)
    for every center s, quadrature-discretized; grid pointer basis)
  * small-instance CSL        (commuting mode-occupation operators;
    product occupation pointer basis)

For the localization model the script also compares the quadrature-
discretized generator against the exact entrywise solution
rho_ij(t) = rho_ij(0) exp[lam t (e^{-alpha (xi - xj)^2 / 4} - 1)].

Run:  python3 demos/05_localization_and_measurement_models.py
Exit: 0 when every check passes.
"""

import sys

import numpy as np

from ppsd_lab import (
    DensityMatrix,
    GridSpec,
    ModelSpec,
    StateVector,
    catalog_model,
    grw_closed_form,
    hermitian_lindblad_fixed_points,
    liouvillian_norm,
    ppsd_residual,
    propagate,
    stationarity_defect,
)


def main() -> int:
    failures = []
    cases = [
        (ModelSpec("phase_damped_oscillator", {"dim": 10}), 10),
        (ModelSpec("walls_collet_milburn", {"dim": 10}), 10),
        (ModelSpec("grw", {}, GridSpec(-5.0, 5.0, 64)), 64),
        (ModelSpec("csl", {}), 16),
    ]
    print("model                      | pointer states | worst stationarity defect")
    for spec, expected in cases:
        model = catalog_model(spec)
        states = hermitian_lindblad_fixed_points(model)
        norm = liouvillian_norm(model)
        worst = max(
            stationarity_defect(model, np.outer(s.amplitudes, s.amplitudes.conj()))
            for s in states
        )
        print(f"  {spec.name:24s} | {len(states):14d} | {worst:.2e} (||L|| = {norm:.1f})")
        if len(states) != expected:
            failures.append(f"{spec.name}: expected {expected} pointer states")
        if worst > 1e-10 * norm:
            failures.append(f"{spec.name}: pointer states must be stationary")
        superposition = StateVector.normalized(
            states[0].amplitudes + states[-1].amplitudes
        )
        r = ppsd_residual(model, superposition)
        if r <= 0:
            failures.append(f"{spec.name}: superpositions must lose purity")

    # localization model vs its closed form
    grid = GridSpec(-5.0, 5.0, 128)
    lam, alpha = 1.0, 1.0
    model = catalog_model(ModelSpec("grw", {"lam": lam, "alpha": alpha}, grid))
    x = grid.points
    psi = StateVector.normalized(np.exp(-(x**2) / (4 * 0.5**2)))
    rho0 = DensityMatrix.from_state(psi)
    traj = propagate(model, rho0, [0.0, 1.0])
    expected_rho = grw_closed_form(rho0, grid, lam, alpha, 1.0)
    err = np.abs(traj.states[-1].matrix - expected_rho.matrix).max()
    print(f"\nlocalization closed form vs quadrature model (128-point grid): {err:.2e}")
    if err > 1e-7:
        failures.append("localization closed form mismatch")

    # distant superposition decoheres at the full localization rate
    left = np.exp(-((x + 2.5) ** 2))
    right = np.exp(-((x - 2.5) ** 2))
    cat = StateVector.normalized(left + right)
    rho_cat = DensityMatrix.from_state(cat)
    decohered = grw_closed_form(rho_cat, grid, lam, alpha, 3.0)
    far = abs(decohered.matrix[32, 96]) / abs(rho_cat.matrix[32, 96])
    print(f"cat-state far coherence after t=3: factor {far:.4f} "
          f"(full-rate limit e^-3 = {np.exp(-3.0):.4f})")
    if abs(far - np.exp(-3.0)) > 1e-3:
        failures.append("cat state should decohere at the full localization rate")

    if failures:
        print("\nFAILED:")
        for f in failures:
            print(" -", f)
        return 1
    print("\nall checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
