"""VAR(p) estimation by multivariate least squares and recursive forecasting.

This is the workhorse behind both the full-rank (levels VAR) and zero-rank
(differenced VAR) limit cases of the error-correction models, so the fitting
and forecasting paths here are deliberately free of any special-casing: the
same recursion produces the persistence path when the estimated dynamics are
the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, InsufficientHistoryError, InvalidInputError
from .lstsq import DEFAULT_CONDITION_LIMIT, solve_ls
from .metrics import ForecastPath
from .panel import DeterministicSpec, TimeSeriesPanel, build_design


@dataclass(frozen=True, eq=False)
class VarModel:
    """Levels VAR(p): Y_t = psi x_t + sum_k phi[k] Y_{t-k} + eps_t.

    ``phi`` holds p coefficient matrices (d x d each); ``psi`` is d x m with
    m the number of deterministic terms; ``resid_cov`` is the maximum
    likelihood residual covariance (divisor = effective sample size).
    """

    phi: tuple[np.ndarray, ...]
    psi: np.ndarray
    det: DeterministicSpec
    resid_cov: np.ndarray
    p: int = field(init=False)
    d: int = field(init=False)

    def __post_init__(self):
        phi = tuple(np.asarray(m, dtype=float) for m in self.phi)
        if not phi:
            raise InvalidInputError("phi must contain at least one matrix")
        d = phi[0].shape[0]
        for m in phi:
            if m.shape != (d, d):
                raise InvalidInputError("every phi matrix must be d x d")
        psi = np.asarray(self.psi, dtype=float)
        if psi.shape != (d, self.det.n_terms):
            raise InvalidInputError(
                f"psi must be d x m = {d} x {self.det.n_terms}, got {psi.shape}"
            )
        cov = np.asarray(self.resid_cov, dtype=float)
        if cov.shape != (d, d):
            raise InvalidInputError("resid_cov must be d x d")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "resid_cov", cov)
        object.__setattr__(self, "p", len(phi))
        object.__setattr__(self, "d", d)


def companion_matrix(phi: tuple[np.ndarray, ...] | list[np.ndarray]) -> np.ndarray:
    """Block companion matrix of a VAR(p); its eigenvalues decide stability."""
    phi = [np.asarray(m, dtype=float) for m in phi]
    d = phi[0].shape[0]
    p = len(phi)
    comp = np.zeros((d * p, d * p))
    for k, m in enumerate(phi):
        comp[:d, k * d : (k + 1) * d] = m
    if p > 1:
        comp[d:, : d * (p - 1)] = np.eye(d * (p - 1))
    return comp


def fit_var(
    panel: TimeSeriesPanel,
    p: int,
    det: DeterministicSpec = DeterministicSpec.CONSTANT,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
) -> VarModel:
    """Estimate a VAR(p) equation-by-equation by least squares.

    Requires n_obs - p >= d*p + m + 1 rows. Raises `SingularDesignError`
    (with the condition diagnostic) on rank-deficient designs rather than
    regularizing.
    """
    design = build_design(panel, p, det)
    d, m = panel.d, det.n_terms
    eff = design.effective_n
    if eff < d * p + m + 1:
        raise InsufficientDataError(
            f"need n_obs - p >= {d * p + m + 1} rows for d={d}, p={p}, m={m}; "
            f"have {eff}"
        )
    x = np.hstack([design.lag_block, design.deterministic_block])
    b, resid, _ = solve_ls(x, design.response, condition_limit)
    phi = tuple(b[k * d : (k + 1) * d, :].T for k in range(p))
    psi = b[d * p :, :].T
    resid_cov = resid.T @ resid / eff
    return VarModel(phi=phi, psi=psi, det=det, resid_cov=resid_cov)


def forecast_var(
    model: VarModel,
    history: TimeSeriesPanel,
    horizon: int,
    origin_index: int | None = None,
    clip_nonnegative: bool = False,
) -> ForecastPath:
    """Recursive plug-in point forecasts for ``horizon`` steps.

    Predicted values replace unobserved lags as the recursion advances. The
    returned path is H x d. ``clip_nonnegative`` floors the *reported* path
    at 0 MW; the recursion itself is never clipped, so the linear model the
    metrics evaluate is unchanged except for the final floor.
    """
    if horizon < 1:
        raise InvalidInputError(f"horizon must be >= 1, got {horizon}")
    if history.d != model.d:
        raise InvalidInputError(
            f"history has {history.d} series but the model expects {model.d}"
        )
    if history.n_obs < model.p:
        raise InsufficientHistoryError(
            f"need at least p={model.p} rows of history, have {history.n_obs}"
        )
    lags = [history.values[-k] for k in range(1, model.p + 1)]  # lags[k-1] = Y_{t-k+1}
    m = model.det.n_terms
    const = model.psi[:, 0] if m else None
    out = np.empty((horizon, model.d))
    for h in range(horizon):
        acc = np.zeros(model.d)
        for k in range(model.p):
            acc += model.phi[k] @ lags[k]
        if const is not None:
            acc = acc + const
        out[h] = acc
        lags = [acc] + lags[:-1]
    if clip_nonnegative:
        out = np.maximum(out, 0.0)
    origin = history.n_obs - 1 if origin_index is None else origin_index
    return ForecastPath(out, origin)
