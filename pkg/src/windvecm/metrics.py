"""Point-forecast loss metrics, equal-weight combination, Diebold-Mariano test.

The multivariate MAE/MSE sum the L1 / squared-L2 norm of the d-dimensional
error vector over origins and horizons and divide by N*H only; there is no
division by d, so a unit error in every one of d components at a single
(origin, horizon) scores d, not 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np
from scipy import stats

from .errors import DegenerateVarianceError, InvalidInputError


@dataclass(frozen=True, eq=False)
class ForecastPath:
    """H x d matrix of point forecasts issued from one origin.

    ``origin_index`` is the time index of the last known observation in
    whatever indexing the producer used (absolute panel index for backtest
    cells, history length - 1 for standalone forecasts).
    """

    values: np.ndarray
    origin_index: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 1:
            raise InvalidInputError("forecast path must be H x d with H >= 1")
        if not np.isfinite(values).all():
            raise InvalidInputError("forecast path contains non-finite values")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def horizon(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def _stack_errors(errors: Iterable[np.ndarray]) -> np.ndarray:
    mats = [np.asarray(e, dtype=float) for e in errors]
    if not mats:
        raise InvalidInputError("empty error collection")
    shape = mats[0].shape
    if any(m.shape != shape for m in mats):
        raise InvalidInputError("error matrices must share one H x d shape")
    return np.stack(mats)  # (N, H, d)


def mae(errors: Iterable[np.ndarray]) -> float:
    """Multivariate mean absolute error over per-origin H x d error matrices.

    sum_n sum_h ||e[n, h, :]||_1 / (N * H).
    """
    e = _stack_errors(errors)
    n, h = e.shape[0], e.shape[1]
    return float(np.abs(e).sum() / (n * h))


def mse(errors: Iterable[np.ndarray]) -> float:
    """Multivariate mean squared error: squared L2 norms averaged over N*H."""
    e = _stack_errors(errors)
    n, h = e.shape[0], e.shape[1]
    return float((e**2).sum() / (n * h))


def per_origin_loss(errors: Iterable[np.ndarray], kind: str) -> np.ndarray:
    """One aggregated loss per origin: norms summed over horizons.

    ``kind`` is "absolute" (L1) or "squared" (squared L2). This is the
    granularity fed to the Diebold-Mariano test: one exchangeable draw per
    sampled origin.
    """
    e = _stack_errors(errors)
    if kind == "absolute":
        return np.abs(e).sum(axis=(1, 2))
    if kind == "squared":
        return (e**2).sum(axis=(1, 2))
    raise InvalidInputError(f"unknown loss kind {kind!r}")


def combine_equal(paths: Sequence[ForecastPath]) -> ForecastPath:
    """Equal-weight (elementwise mean) combination of forecast paths.

    All paths must share shape and origin.
    """
    if len(paths) < 2:
        raise InvalidInputError("need at least 2 paths to combine")
    shape = paths[0].values.shape
    origin = paths[0].origin_index
    for p in paths[1:]:
        if p.values.shape != shape:
            raise InvalidInputError("combined paths must share one H x d shape")
        if p.origin_index != origin:
            raise InvalidInputError("combined paths must share the forecast origin")
    stacked = np.stack([p.values for p in paths])
    return ForecastPath(stacked.mean(axis=0), origin)


@dataclass(frozen=True)
class DmTestResult:
    """Diebold-Mariano comparison of two per-origin loss series."""

    statistic: float
    p_value: float
    n_effective: int
    loss_kind: Literal["absolute", "squared"]
    variance_estimator: str

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise InvalidInputError("p_value outside [0, 1]")


def dm_test(
    loss_a: np.ndarray,
    loss_b: np.ndarray,
    loss_kind: Literal["absolute", "squared"] = "absolute",
    bandwidth: int = 0,
) -> DmTestResult:
    """Test the mean of the loss differential loss_a - loss_b against zero.

    Losses must be computed on the same origins, in the same order. The
    long-run variance defaults to the plain sample variance (bandwidth 0),
    appropriate when origins are randomly sampled and the differential has no
    natural serial ordering; a positive ``bandwidth`` applies Bartlett
    weights for contiguous evaluation designs. Two-sided normal p-value.
    """
    a = np.asarray(loss_a, dtype=float)
    b = np.asarray(loss_b, dtype=float)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise InvalidInputError("loss series must be 1-D and equally long")
    n = a.shape[0]
    if n < 10:
        raise InvalidInputError(f"need at least 10 paired losses, got {n}")
    if bandwidth < 0 or bandwidth >= n:
        raise InvalidInputError("bandwidth must be in [0, n)")

    delta = a - b
    mean = delta.mean()
    centered = delta - mean
    gamma0 = float(centered @ centered) / n
    lrv = gamma0
    for lag in range(1, bandwidth + 1):
        cov = float(centered[lag:] @ centered[:-lag]) / n
        lrv += 2.0 * (1.0 - lag / (bandwidth + 1.0)) * cov
    if lrv <= 0.0:
        raise DegenerateVarianceError(
            "loss differential has no variance; the forecasters are identical"
        )
    statistic = float(mean / np.sqrt(lrv / n))
    p_value = float(2.0 * stats.norm.sf(abs(statistic)))
    estimator = "sample-variance" if bandwidth == 0 else f"bartlett(L={bandwidth})"
    return DmTestResult(
        statistic=statistic,
        p_value=p_value,
        n_effective=n,
        loss_kind=loss_kind,
        variance_estimator=estimator,
    )
