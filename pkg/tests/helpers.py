"""Shared test utilities: random stable VARs and direct path simulation.

The simulators here are deliberately independent of windvecm.simulate so
they can serve as oracles for it.
"""

from __future__ import annotations

import numpy as np

from windvecm import DeterministicSpec, TimeSeriesPanel, VarModel, companion_matrix


def stable_var_coeffs(
    rng: np.random.Generator, d: int, p: int, radius: float = 0.9
) -> tuple[np.ndarray, ...]:
    """Random VAR coefficients scaled to spectral radius <= radius."""
    phi = [rng.normal(scale=0.5 / (k + 1), size=(d, d)) for k in range(p)]
    rho = np.max(np.abs(np.linalg.eigvals(companion_matrix(phi))))
    if rho > radius:
        scale = radius / rho
        phi = [m * scale ** (k + 1) for k, m in enumerate(phi)]
    return tuple(phi)


def stable_var_model(
    rng: np.random.Generator,
    d: int,
    p: int,
    det: DeterministicSpec = DeterministicSpec.NONE,
    radius: float = 0.9,
) -> VarModel:
    phi = stable_var_coeffs(rng, d, p, radius)
    psi = rng.normal(size=(d, det.n_terms))
    return VarModel(phi=phi, psi=psi, det=det, resid_cov=np.eye(d))


def simulate_var_panel(
    model: VarModel,
    n_obs: int,
    rng: np.random.Generator,
    noise_scale: float = 1.0,
    burn_in: int = 100,
) -> TimeSeriesPanel:
    """Simulate a levels VAR forward; plain loop, no shortcuts."""
    d, p = model.d, model.p
    total = burn_in + n_obs
    y = np.zeros((total + p, d))
    const = model.psi[:, 0] if model.det.n_terms else np.zeros(d)
    for t in range(p, total + p):
        acc = const + noise_scale * rng.standard_normal(d)
        for k in range(p):
            acc = acc + model.phi[k] @ y[t - 1 - k]
        y[t] = acc
    return TimeSeriesPanel.from_values(y[p + burn_in :])
