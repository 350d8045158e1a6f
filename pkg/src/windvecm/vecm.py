"""Reduced-rank (Johansen) estimation of error-correction models.

The model for the differenced series is

    dY_t = psi x_t + alpha beta' Y_{t-1} + sum_k gamma[k] dY_{t-k} + eps_t

with ``Pi = alpha beta'`` of rank r. Estimation follows the maximum
likelihood recipe: concentrate out the short-run terms, solve the resulting
generalized eigenproblem on the residual product-moment matrices, keep the r
directions with the largest eigenvalues as the cointegrating space, then
recover the remaining coefficients by least squares given beta.

``r = d`` leaves Pi unrestricted (equivalent to a levels VAR(p)); ``r = 0``
drops the level term entirely (a VAR(p-1) on differences). Both limits run
through the same code path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

from .errors import (
    InsufficientDataError,
    InvalidInputError,
    InvalidRankError,
    SingularMomentError,
)
from .lstsq import DEFAULT_CONDITION_LIMIT, solve_ls
from .metrics import ForecastPath
from .panel import DeterministicSpec, TimeSeriesPanel, build_design
from .var import VarModel, forecast_var


@dataclass(frozen=True, eq=False)
class VecmModel:
    """Fitted (or converted) error-correction model.

    ``alpha`` (loadings) and ``beta`` (cointegrating vectors) are d x r;
    both are empty for r = 0. ``gamma`` holds the p-1 short-run matrices.
    ``eigenvalues`` are the d Johansen eigenvalues sorted descending in
    [0, 1); they are None for models obtained by conversion from a VAR (no
    eigenproblem was solved) or when the moment matrices were degenerate in
    an r = 0 fit.
    """

    alpha: np.ndarray
    beta: np.ndarray
    gamma: tuple[np.ndarray, ...]
    psi: np.ndarray
    det: DeterministicSpec
    eigenvalues: np.ndarray | None
    r: int
    p: int
    resid_cov: np.ndarray
    d: int = field(init=False)

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        if alpha.ndim != 2 or beta.ndim != 2:
            raise InvalidInputError("alpha and beta must be 2-D (d x r)")
        d = alpha.shape[0]
        if not 0 <= self.r <= d:
            raise InvalidRankError(f"rank {self.r} outside [0, {d}]")
        if alpha.shape != (d, self.r) or beta.shape != (d, self.r):
            raise InvalidInputError(
                f"alpha/beta must be d x r = {d} x {self.r}, got "
                f"{alpha.shape} and {beta.shape}"
            )
        if self.p < 1:
            raise InvalidInputError(f"lag order must be >= 1, got {self.p}")
        gamma = tuple(np.asarray(g, dtype=float) for g in self.gamma)
        if len(gamma) != self.p - 1:
            raise InvalidInputError(f"need p - 1 = {self.p - 1} gamma matrices")
        for g in gamma:
            if g.shape != (d, d):
                raise InvalidInputError("every gamma matrix must be d x d")
        psi = np.asarray(self.psi, dtype=float)
        if psi.shape != (d, self.det.n_terms):
            raise InvalidInputError(
                f"psi must be d x m = {d} x {self.det.n_terms}, got {psi.shape}"
            )
        cov = np.asarray(self.resid_cov, dtype=float)
        if cov.shape != (d, d):
            raise InvalidInputError("resid_cov must be d x d")
        eig = self.eigenvalues
        if eig is not None:
            eig = np.asarray(eig, dtype=float)
            if eig.shape != (d,):
                raise InvalidInputError(f"expected {d} eigenvalues, got {eig.shape}")
            if np.any(eig < 0.0) or np.any(eig >= 1.0):
                raise InvalidInputError("eigenvalues must lie in [0, 1)")
            if np.any(np.diff(eig) > 0.0):
                raise InvalidInputError("eigenvalues must be sorted descending")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "resid_cov", cov)
        object.__setattr__(self, "eigenvalues", eig)
        object.__setattr__(self, "d", d)

    @property
    def pi(self) -> np.ndarray:
        """Long-run impact matrix alpha @ beta' (rank <= r)."""
        return self.alpha @ self.beta.T


def _johansen_eigen(
    s00: np.ndarray, s01: np.ndarray, s11: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Solve lambda S11 v = S10 S00^-1 S01 v via symmetrization.

    S11 is Cholesky-factored (S11 = L L') and the problem reduced to an
    ordinary symmetric eigenproblem on L^-1 S10 S00^-1 S01 L^-T, which is
    far better behaved at small sample sizes than a direct nonsymmetric
    solve. Returns eigenvalues sorted descending (clipped into [0, 1)) and
    eigenvector columns v normalized so that v' S11 v = I.
    """
    d = s11.shape[0]
    try:
        l11 = np.linalg.cholesky(s11)
    except np.linalg.LinAlgError:
        raise SingularMomentError("product-moment matrix S11 is singular") from None
    try:
        c00 = sla.cho_factor(s00, lower=True)
    except np.linalg.LinAlgError:
        raise SingularMomentError("product-moment matrix S00 is singular") from None
    mid = s01.T @ sla.cho_solve(c00, s01)  # S10 S00^-1 S01
    l_inv = sla.solve_triangular(l11, np.eye(d), lower=True)
    sym = l_inv @ mid @ l_inv.T
    sym = 0.5 * (sym + sym.T)
    lam, w = np.linalg.eigh(sym)
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    w = w[:, order]
    vectors = l_inv.T @ w
    lam = np.clip(lam, 0.0, np.nextafter(1.0, 0.0))
    return lam, vectors


def fit_vecm(
    panel: TimeSeriesPanel,
    p: int,
    r: int,
    det: DeterministicSpec = DeterministicSpec.CONSTANT,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
) -> VecmModel:
    """Johansen reduced-rank fit with fixed cointegrating rank ``r``.

    Steps: (i) regress dY_t and Y_{t-1} on the short-run regressors
    [lagged differences, deterministic term] keeping residuals R0, R1;
    (ii) form S00, S01, S11; (iii) solve the generalized eigenproblem;
    (iv) beta = eigenvectors of the r largest eigenvalues (beta' S11 beta
    = I); (v)-(vi) alpha, gamma, psi by least squares of dY_t on
    [lagged differences, det, beta' Y_{t-1}].

    The eigenvalues are computed for every rank (including r = 0, where
    they are purely diagnostic); if the moment matrices are degenerate the
    fit proceeds without them for r = 0 and fails for r > 0.
    """
    d = panel.d
    if not 0 <= r <= d:
        raise InvalidRankError(f"rank {r} outside [0, {d}]")
    design = build_design(panel, p, det)
    m = det.n_terms
    eff = design.effective_n
    if eff < d * p + m + 1:
        raise InsufficientDataError(
            f"need n_obs - p >= {d * p + m + 1} rows for d={d}, p={p}, m={m}; "
            f"have {eff}"
        )
    z = np.hstack([design.diff_lag_block, design.deterministic_block])
    # Residuals of the concentration step. The projection onto span(z) is
    # well defined even for rank-deficient z, so no condition guard here.
    if z.shape[1]:
        r0 = design.diff_response - z @ np.linalg.lstsq(z, design.diff_response, rcond=None)[0]
        r1 = design.lagged_level - z @ np.linalg.lstsq(z, design.lagged_level, rcond=None)[0]
    else:
        r0 = design.diff_response
        r1 = design.lagged_level
    s00 = r0.T @ r0 / eff
    s01 = r0.T @ r1 / eff
    s11 = r1.T @ r1 / eff

    eigenvalues: np.ndarray | None
    try:
        eigenvalues, vectors = _johansen_eigen(s00, s01, s11)
    except SingularMomentError:
        if r > 0:
            raise
        eigenvalues, vectors = None, np.zeros((d, d))
    beta = vectors[:, :r].copy()

    ect = design.lagged_level @ beta
    x = np.hstack([design.diff_lag_block, design.deterministic_block, ect])
    b, resid, _ = solve_ls(x, design.diff_response, condition_limit)
    n_sr = d * (p - 1)
    gamma = tuple(b[k * d : (k + 1) * d, :].T for k in range(p - 1))
    psi = b[n_sr : n_sr + m, :].T
    alpha = b[n_sr + m :, :].T
    resid_cov = resid.T @ resid / eff
    return VecmModel(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        psi=psi,
        det=det,
        eigenvalues=eigenvalues,
        r=r,
        p=p,
        resid_cov=resid_cov,
    )


def vecm_to_var(model: VecmModel) -> VarModel:
    """Exact levels-VAR representation of an error-correction model.

    phi_1 = I + Pi + gamma_1, phi_k = gamma_k - gamma_{k-1} for
    2 <= k <= p-1, phi_p = -gamma_{p-1}; for p = 1 simply phi_1 = I + Pi.
    """
    d, p = model.d, model.p
    pi = model.pi
    eye = np.eye(d)
    if p == 1:
        phi: tuple[np.ndarray, ...] = (eye + pi,)
    else:
        g = model.gamma
        mats = [eye + pi + g[0]]
        for k in range(2, p):
            mats.append(g[k - 1] - g[k - 2])
        mats.append(-g[p - 2])
        phi = tuple(mats)
    return VarModel(
        phi=phi, psi=model.psi.copy(), det=model.det, resid_cov=model.resid_cov.copy()
    )


def var_to_vecm(model: VarModel) -> VecmModel:
    """Error-correction form of a levels VAR.

    Pi = -I + sum_k phi_k and gamma_k = -sum_{j=k+1}^p phi_j. The long-run
    matrix is carried as the trivial full-rank factorization alpha = Pi,
    beta = I (only the product alpha beta' matters downstream); no
    eigenproblem is solved, so ``eigenvalues`` is None.
    """
    d, p = model.d, model.p
    pi = -np.eye(d) + sum(model.phi)
    gamma = tuple(
        -sum(model.phi[j] for j in range(k, p)) for k in range(1, p)
    )
    return VecmModel(
        alpha=pi,
        beta=np.eye(d),
        gamma=gamma,
        psi=model.psi.copy(),
        det=model.det,
        eigenvalues=None,
        r=d,
        p=p,
        resid_cov=model.resid_cov.copy(),
    )


def forecast_vecm(
    model: VecmModel,
    history: TimeSeriesPanel,
    horizon: int,
    origin_index: int | None = None,
    clip_nonnegative: bool = False,
) -> ForecastPath:
    """Forecast by converting to the levels-VAR representation."""
    return forecast_var(
        vecm_to_var(model),
        history,
        horizon,
        origin_index=origin_index,
        clip_nonnegative=clip_nonnegative,
    )
