"""Multivariate time-series container and lag/difference design construction.

The panel is a dense (n_obs x d) matrix of simultaneously observed series on
a uniform clock. All estimators consume the stacked-regressor blocks built
here, so the column convention is fixed in one place: lag blocks are ordered
lag-major, region-minor, i.e. ``[lag 1 | lag 2 | ... | lag p]`` with each lag
a d-wide group in region order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InsufficientDataError, InvalidInputError

QUARTER_HOUR = np.timedelta64(15, "m")


class DeterministicSpec(Enum):
    """Deterministic regressor choice: nothing, or an unrestricted constant."""

    NONE = "none"
    CONSTANT = "constant"

    @property
    def n_terms(self) -> int:
        """Number of deterministic columns (0 or 1)."""
        return 0 if self is DeterministicSpec.NONE else 1

    def block(self, n_rows: int) -> np.ndarray:
        """Deterministic block with ``n_rows`` rows (n_rows x m)."""
        if self is DeterministicSpec.NONE:
            return np.zeros((n_rows, 0))
        return np.ones((n_rows, 1))


def quarter_hour_range(n: int, start: str | np.datetime64 = "2015-01-01T00:00") -> np.ndarray:
    """Uniform quarter-hourly timestamp vector of length ``n``."""
    t0 = np.datetime64(start, "s")
    return t0 + np.arange(n) * QUARTER_HOUR.astype("timedelta64[s]")


@dataclass(frozen=True, eq=False)
class TimeSeriesPanel:
    """Uniformly spaced d-dimensional observation matrix.

    Parameters
    ----------
    values : ndarray, shape (n_obs, d)
        Observations in MW, one column per region. Must be finite.
    timestamps : ndarray of datetime64, shape (n_obs,)
        Strictly increasing, constant spacing.
    labels : tuple of str, length d
        Region identifiers in column order.
    """

    values: np.ndarray
    timestamps: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise InvalidInputError("values must be 2-dimensional (n_obs x d)")
        n, d = values.shape
        if n < 1 or d < 1:
            raise InvalidInputError("panel needs n_obs >= 1 and d >= 1")
        if not np.isfinite(values).all():
            raise InvalidInputError("values contain NaN or infinite entries")
        ts = np.asarray(self.timestamps)
        if ts.shape != (n,):
            raise InvalidInputError("timestamps must have one entry per row")
        if n > 1:
            deltas = np.diff(ts)
            if not (deltas > np.timedelta64(0, "s")).all():
                raise InvalidInputError("timestamps must be strictly increasing")
            if not (deltas == deltas[0]).all():
                raise InvalidInputError("timestamps must have constant spacing")
        labels = tuple(str(x) for x in self.labels)
        if len(labels) != d:
            raise InvalidInputError(f"expected {d} labels, got {len(labels)}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "timestamps", ts.copy())
        object.__setattr__(self, "labels", labels)

    @property
    def n_obs(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def window(self, start: int, stop: int) -> "TimeSeriesPanel":
        """Sub-panel over rows [start, stop)."""
        if not (0 <= start < stop <= self.n_obs):
            raise InvalidInputError(f"window [{start}, {stop}) out of range")
        return TimeSeriesPanel(
            self.values[start:stop], self.timestamps[start:stop], self.labels
        )

    @classmethod
    def from_values(
        cls,
        values,
        labels: tuple[str, ...] | None = None,
        start: str | np.datetime64 = "2015-01-01T00:00",
    ) -> "TimeSeriesPanel":
        """Panel from a value matrix with synthetic quarter-hourly timestamps.

        1-D input is treated as a single series (one column).
        """
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        n, d = values.shape
        if labels is None:
            labels = tuple(f"s{i}" for i in range(d))
        return cls(values, quarter_hour_range(n, start), labels)


def difference(panel: TimeSeriesPanel) -> TimeSeriesPanel:
    """First differences, timestamps shifted to the later instant.

    Row t of the output equals ``Y[t+1] - Y[t]``; the result has n_obs - 1
    rows.
    """
    if panel.n_obs < 2:
        raise InvalidInputError("differencing needs at least 2 observations")
    dv = panel.values[1:] - panel.values[:-1]
    return TimeSeriesPanel(dv, panel.timestamps[1:], panel.labels)


@dataclass(frozen=True, eq=False)
class RegressionDesign:
    """Aligned regression blocks for a panel and lag order p.

    Row i of every block corresponds to time index t = p + i of the source
    panel. ``lag_block`` stacks levels ``[Y_{t-1} | ... | Y_{t-p}]``;
    ``diff_lag_block`` stacks differences ``[dY_{t-1} | ... | dY_{t-p+1}]``.
    """

    response: np.ndarray          # (effective_n, d)   Y_t
    lag_block: np.ndarray         # (effective_n, d*p)
    diff_response: np.ndarray     # (effective_n, d)   Y_t - Y_{t-1}
    lagged_level: np.ndarray      # (effective_n, d)   Y_{t-1}
    diff_lag_block: np.ndarray    # (effective_n, d*(p-1))
    deterministic_block: np.ndarray  # (effective_n, m)
    p: int = field(default=1)
    det: DeterministicSpec = field(default=DeterministicSpec.NONE)

    @property
    def effective_n(self) -> int:
        return self.response.shape[0]

    @property
    def d(self) -> int:
        return self.response.shape[1]


def build_design(
    panel: TimeSeriesPanel, p: int, det: DeterministicSpec = DeterministicSpec.NONE
) -> RegressionDesign:
    """Construct all lag/difference blocks for lag order ``p``.

    Requires p >= 1 and n_obs > p; effective_n = n_obs - p.
    """
    if p < 1:
        raise InvalidInputError(f"lag order must be >= 1, got {p}")
    n, d = panel.n_obs, panel.d
    if n <= p:
        raise InsufficientDataError(f"need more than p={p} observations, have {n}")
    y = panel.values
    eff = n - p

    response = y[p:]
    lag_cols = [y[p - k : n - k] for k in range(1, p + 1)]
    lag_block = np.hstack(lag_cols) if lag_cols else np.zeros((eff, 0))
    lagged_level = y[p - 1 : n - 1]
    diff_response = response - lagged_level

    dy = y[1:] - y[:-1]  # dy[t-1] = Y_t - Y_{t-1}, length n-1
    diff_cols = [dy[p - 1 - k : n - 1 - k] for k in range(1, p)]
    diff_lag_block = np.hstack(diff_cols) if diff_cols else np.zeros((eff, 0))

    return RegressionDesign(
        response=response,
        lag_block=lag_block,
        diff_response=diff_response,
        lagged_level=lagged_level,
        diff_lag_block=diff_lag_block,
        deterministic_block=det.block(eff),
        p=p,
        det=det,
    )
