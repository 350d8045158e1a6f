"""Shared multivariate least-squares solve with a condition guard.

All estimators route through :func:`solve_ls` so that near-singular designs
fail identically everywhere: a rank-revealing (SVD) solve is used, and when
the condition number exceeds the threshold the solve is rejected instead of
silently regularized. The one exception is an exactly consistent system
(residuals numerically zero), where the minimum-norm solution reproduces the
data and every forecast derived from it; such degenerate-but-exact fits are
accepted so that noiseless panels remain usable.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularDesignError

#: Designs with condition number above this raise SingularDesignError.
DEFAULT_CONDITION_LIMIT = 1e10

#: Residual tolerance (relative to response scale) for the exact-fit escape.
_CONSISTENT_RTOL = 1e-9


def solve_ls(
    x: np.ndarray,
    y: np.ndarray,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Least-squares solve of ``x @ b = y`` for matrix right-hand sides.

    Returns ``(b, residuals, condition)`` where ``residuals = y - x @ b``.
    Raises `SingularDesignError` when the design is ill-conditioned and the
    system is not exactly consistent.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = x.shape
    if k == 0:
        return np.zeros((0, y.shape[1])), y.copy(), 1.0

    b, _, rank, sv = np.linalg.lstsq(x, y, rcond=None)
    if sv[-1] > 0 and rank == k:
        cond = float(sv[0] / sv[-1])
    else:
        cond = float("inf")
    resid = y - x @ b
    if cond > condition_limit:
        scale = max(1.0, float(np.max(np.abs(y))) if y.size else 1.0)
        if float(np.max(np.abs(resid))) > _CONSISTENT_RTOL * scale:
            raise SingularDesignError(
                f"regressor matrix is rank deficient or ill-conditioned "
                f"(condition {cond:.3e} > {condition_limit:.1e})",
                condition=cond,
            )
    return b, resid, cond
