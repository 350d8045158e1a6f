"""Synthetic cointegrated data generation for oracle tests and studies.

A spec fixes the error-correction dynamics (loadings, cointegrating vectors,
short-run matrices) plus Gaussian noise, and is validated at construction:
the implied companion matrix must have no explosive roots and exactly
d - r_true unit roots. Generation simulates the difference equation forward
with a burn-in so the returned panel is free of initial-condition
transients.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, InvalidSpecError
from .panel import DeterministicSpec, TimeSeriesPanel
from .var import companion_matrix
from .vecm import VecmModel, vecm_to_var

#: Steps simulated and discarded before collecting observations.
BURN_IN = 200

#: |modulus - 1| below this counts as a unit root; above 1 + this is explosive.
UNIT_ROOT_TOL = 1e-6


@dataclass(frozen=True)
class SpecDiagnostics:
    """Companion-matrix root moduli (sorted descending) and unit-root count."""

    root_moduli: np.ndarray
    n_unit_roots: int


def _implied_var(alpha, beta, gamma, noise_cov) -> "VecmModel":
    d = alpha.shape[0]
    return VecmModel(
        alpha=alpha,
        beta=beta,
        gamma=tuple(gamma),
        psi=np.zeros((d, 0)),
        det=DeterministicSpec.NONE,
        eigenvalues=None,
        r=alpha.shape[1],
        p=len(gamma) + 1,
        resid_cov=noise_cov,
    )


def _diagnostics(alpha, beta, gamma, noise_cov) -> SpecDiagnostics:
    var = vecm_to_var(_implied_var(alpha, beta, gamma, noise_cov))
    moduli = np.sort(np.abs(np.linalg.eigvals(companion_matrix(var.phi))))[::-1]
    n_unit = int(np.sum(np.abs(moduli - 1.0) <= UNIT_ROOT_TOL))
    return SpecDiagnostics(root_moduli=moduli, n_unit_roots=n_unit)


@dataclass(frozen=True, eq=False)
class DgpSpec:
    """Cointegrated data-generating process.

    dY_t = alpha beta' Y_{t-1} + sum_k gamma[k] dY_{t-k} + eps_t with
    eps_t ~ N(0, noise_cov). Construction validates the spectral condition:
    no root of the implied companion matrix outside the unit circle and
    exactly d - r_true unit roots.
    """

    d: int
    r_true: int
    alpha: np.ndarray
    beta: np.ndarray
    gamma: tuple[np.ndarray, ...]
    noise_cov: np.ndarray
    n_obs: int
    seed: int
    initial: np.ndarray
    p_true: int = field(init=False)

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        if alpha.shape != (self.d, self.r_true) or beta.shape != (self.d, self.r_true):
            raise InvalidSpecError(
                f"alpha/beta must be {self.d} x {self.r_true}, got "
                f"{alpha.shape} and {beta.shape}"
            )
        gamma = tuple(np.asarray(g, dtype=float) for g in self.gamma)
        for g in gamma:
            if g.shape != (self.d, self.d):
                raise InvalidSpecError("every gamma matrix must be d x d")
        cov = np.asarray(self.noise_cov, dtype=float)
        if cov.shape != (self.d, self.d) or not np.allclose(cov, cov.T):
            raise InvalidSpecError("noise_cov must be a symmetric d x d matrix")
        initial = np.asarray(self.initial, dtype=float).reshape(-1)
        if initial.shape != (self.d,):
            raise InvalidSpecError(f"initial state must have {self.d} entries")
        if self.n_obs < 1:
            raise InvalidSpecError("n_obs must be >= 1")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "noise_cov", cov)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "p_true", len(gamma) + 1)

        diag = _diagnostics(alpha, beta, gamma, cov)
        if np.any(diag.root_moduli > 1.0 + UNIT_ROOT_TOL):
            raise InvalidSpecError(
                f"explosive spec: largest companion root modulus "
                f"{diag.root_moduli[0]:.6f} > 1"
            )
        if diag.n_unit_roots != self.d - self.r_true:
            raise InvalidSpecError(
                f"spec implies {diag.n_unit_roots} unit roots, expected "
                f"d - r_true = {self.d - self.r_true}"
            )


def validate_spec(spec: DgpSpec) -> SpecDiagnostics:
    """Companion root moduli and unit-root count of a spec."""
    return _diagnostics(spec.alpha, spec.beta, spec.gamma, spec.noise_cov)


def _psd_factor(cov: np.ndarray) -> np.ndarray:
    """Factor F with F F' = cov for PSD cov (zero matrices allowed)."""
    if not cov.any():
        return np.zeros_like(cov)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        w, u = np.linalg.eigh(cov)
        if w.min() < -1e-10 * max(1.0, w.max()):
            raise InvalidSpecError("noise_cov is not positive semidefinite") from None
        return u * np.sqrt(np.clip(w, 0.0, None))


def generate(spec: DgpSpec) -> TimeSeriesPanel:
    """Simulate the spec forward; reproducible from ``spec.seed``.

    Discards a burn-in of 200 steps, then returns n_obs rows on a synthetic
    quarter-hourly clock.
    """
    diag = validate_spec(spec)
    if np.any(diag.root_moduli > 1.0 + UNIT_ROOT_TOL):
        raise InvalidSpecError("explosive spec")
    d = spec.d
    rng = np.random.default_rng(spec.seed)
    factor = _psd_factor(spec.noise_cov)
    total = BURN_IN + spec.n_obs
    eps = rng.standard_normal((total, d)) @ factor.T

    pi = spec.alpha @ spec.beta.T
    y = spec.initial.copy()
    diffs = [np.zeros(d) for _ in range(spec.p_true - 1)]  # diffs[k-1] = dY_{t-k}
    out = np.empty((total, d))
    for t in range(total):
        dy = pi @ y + eps[t]
        for k, g in enumerate(spec.gamma):
            dy += g @ diffs[k]
        y = y + dy
        if diffs:
            diffs = [dy] + diffs[:-1]
        out[t] = y
    return TimeSeriesPanel.from_values(out[BURN_IN:])


def cointegrated_spec(
    d: int = 4,
    r_true: int = 2,
    n_obs: int = 2000,
    seed: int = 0,
    p_true: int = 2,
    adjust: float = 0.4,
    short_run: float = 0.25,
    noise_scale: float = 1.0,
) -> DgpSpec:
    """Library DGP: orthonormal cointegrating directions, loading -adjust.

    The cointegrating space is a fixed (seed-independent) orthonormal basis,
    so the same (d, r_true) always shares one true space across data seeds;
    the seed only drives the noise. Short-run dynamics are short_run * I per
    lag. Valid for 0 <= r_true <= d.
    """
    if not 0 <= r_true <= d:
        raise InvalidInputError(f"r_true outside [0, {d}]")
    basis_rng = np.random.default_rng(19156)
    q, _ = np.linalg.qr(basis_rng.standard_normal((d, d)))
    beta = q[:, :r_true]
    alpha = -adjust * beta
    gamma = tuple(short_run * 0.5**k * np.eye(d) for k in range(p_true - 1))
    return DgpSpec(
        d=d,
        r_true=r_true,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        noise_cov=noise_scale**2 * np.eye(d),
        n_obs=n_obs,
        seed=seed,
        initial=np.zeros(d),
    )


def random_walk_spec(
    d: int, n_obs: int, seed: int = 0, noise_scale: float = 1.0
) -> DgpSpec:
    """d independent random walks (r_true = 0, no short-run dynamics)."""
    return DgpSpec(
        d=d,
        r_true=0,
        alpha=np.zeros((d, 0)),
        beta=np.zeros((d, 0)),
        gamma=(),
        noise_cov=noise_scale**2 * np.eye(d),
        n_obs=n_obs,
        seed=seed,
        initial=np.zeros(d),
    )


def spec_to_json(spec: DgpSpec) -> str:
    """Serialize a spec to the JSON config format used by the CLI."""
    payload = {
        "d": spec.d,
        "r_true": spec.r_true,
        "alpha": spec.alpha.tolist(),
        "beta": spec.beta.tolist(),
        "gamma": [g.tolist() for g in spec.gamma],
        "noise_cov": spec.noise_cov.tolist(),
        "n_obs": spec.n_obs,
        "seed": spec.seed,
        "initial": spec.initial.tolist(),
    }
    return json.dumps(payload, indent=2)


def spec_from_json(text: str) -> DgpSpec:
    """Parse the JSON config format back into a validated spec."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpecError(f"malformed spec JSON: {exc}") from None
    def _matrix(key: str, rows: int, cols: int) -> np.ndarray:
        arr = np.asarray(payload[key], dtype=float)
        return arr.reshape(rows, cols) if arr.size else np.zeros((rows, cols))

    try:
        d = int(payload["d"])
        r_true = int(payload["r_true"])
        return DgpSpec(
            d=d,
            r_true=r_true,
            alpha=_matrix("alpha", d, r_true),
            beta=_matrix("beta", d, r_true),
            gamma=tuple(np.asarray(g, dtype=float) for g in payload.get("gamma", [])),
            noise_cov=np.asarray(payload["noise_cov"], dtype=float),
            n_obs=int(payload["n_obs"]),
            seed=int(payload.get("seed", 0)),
            initial=np.asarray(
                payload.get("initial", np.zeros(d)), dtype=float
            ),
        )
    except KeyError as exc:
        raise InvalidSpecError(f"spec JSON missing field {exc}") from None
