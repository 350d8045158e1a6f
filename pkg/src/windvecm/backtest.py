"""Rolling-origin forecasting study over a (T, p, r) grid.

One origin set is drawn once, with the largest calibration length in the
grid as the lower bound, and reused for every cell so that all cells are
scored on identical test points. A cell fits on the T observations ending at
each origin, forecasts H steps, and records the H x d error matrix; singular
fits are recorded as failures, never replaced by substitute forecasts.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import metrics
from .errors import (
    InsufficientDataError,
    InsufficientRangeError,
    InvalidInputError,
    SingularDesignError,
    SingularMomentError,
)
from .metrics import combine_equal
from .panel import DeterministicSpec, TimeSeriesPanel
from .vecm import fit_vecm, forecast_vecm

#: Default grids mirror the quarter-hourly study design: calibration windows
#: of 1..32 days, orders 1..7, every rank up to the panel dimension.
DEFAULT_T_GRID = (96, 192, 384, 768, 1536, 3072)
DEFAULT_P_GRID = (1, 2, 3, 4, 5, 6, 7)

WORKERS_ENV_VAR = "WINDVECM_WORKERS"

#: Estimation failures recorded per origin instead of aborting a cell.
_CELL_FAILURES = (InsufficientDataError, SingularDesignError, SingularMomentError)


@dataclass(frozen=True)
class BacktestConfig:
    """Grid and sampling parameters of a backtest run.

    ``r_grid=None`` resolves to 0..d once the panel is known. Every T must
    leave room for the largest order plus a usable effective sample.
    """

    T_grid: tuple[int, ...] = DEFAULT_T_GRID
    p_grid: tuple[int, ...] = DEFAULT_P_GRID
    r_grid: tuple[int, ...] | None = None
    horizon: int = 8
    n_origins: int = 1000
    seed: int = 0
    det: DeterministicSpec = DeterministicSpec.CONSTANT
    clip_nonnegative: bool = False

    def __post_init__(self):
        if not self.T_grid or not self.p_grid:
            raise InvalidInputError("T_grid and p_grid must be non-empty")
        if self.r_grid is not None and not self.r_grid:
            raise InvalidInputError("r_grid must be non-empty when given")
        if self.horizon < 1:
            raise InvalidInputError("horizon must be >= 1")
        if self.n_origins < 1:
            raise InvalidInputError("need at least one origin")
        p_max = max(self.p_grid)
        if min(self.T_grid) < p_max + 2:
            raise InvalidInputError(
                f"every T must be >= max(p_grid) + 2 = {p_max + 2}"
            )
        if min(self.p_grid) < 1 or (self.r_grid is not None and min(self.r_grid) < 0):
            raise InvalidInputError("orders must be >= 1 and ranks >= 0")

    def resolve_ranks(self, d: int) -> tuple[int, ...]:
        return tuple(range(d + 1)) if self.r_grid is None else self.r_grid


def sample_origins(
    n_obs: int, t_max: int, horizon: int, n_origins: int, seed: int
) -> np.ndarray:
    """Draw origin indices uniformly without replacement, sorted ascending.

    An origin is the 0-based index of the last known observation; feasible
    values are [t_max, n_obs - horizon - 1]. The same origin set must be
    reused for every grid cell to keep cells comparable.
    """
    if n_origins < 1:
        raise InvalidInputError("need at least one origin")
    feasible = n_obs - horizon - t_max
    if feasible < 1:
        raise InsufficientRangeError(
            f"no feasible origins: n_obs={n_obs} <= T_max + H = {t_max + horizon}"
        )
    if feasible < n_origins:
        raise InsufficientRangeError(
            f"only {feasible} feasible origins for {n_origins} requested draws"
        )
    rng = np.random.default_rng(seed)
    picks = rng.choice(np.arange(t_max, n_obs - horizon), size=n_origins, replace=False)
    return np.sort(picks)


@dataclass(frozen=True, eq=False)
class CellResult:
    """Per-origin forecast errors of one (T, p, r) cell."""

    origins_ok: np.ndarray        # origins with a successful fit, ascending
    errors: np.ndarray            # (n_ok, H, d) actual - forecast
    failures: tuple[tuple[int, str], ...]  # (origin, error class name)


def run_cell(
    panel: TimeSeriesPanel,
    T: int,
    p: int,
    r: int,
    origins: np.ndarray,
    horizon: int,
    det: DeterministicSpec = DeterministicSpec.CONSTANT,
    clip_nonnegative: bool = False,
) -> CellResult:
    """Fit-and-forecast at every origin with calibration length T.

    The fit window is rows [o - T + 1, o]; forecasts target rows
    o + 1 .. o + horizon. Estimation failures are recorded per origin.
    """
    origins = np.asarray(origins, dtype=int)
    if origins.size and (origins.min() < T or origins.max() + horizon >= panel.n_obs):
        raise InvalidInputError(
            "every origin must satisfy o >= T and o + H < n_obs"
        )
    ok: list[int] = []
    errs: list[np.ndarray] = []
    failures: list[tuple[int, str]] = []
    for o in origins:
        window = panel.window(o - T + 1, o + 1)
        try:
            model = fit_vecm(window, p, r, det)
            path = forecast_vecm(
                model, window, horizon, origin_index=o,
                clip_nonnegative=clip_nonnegative,
            )
        except _CELL_FAILURES as exc:
            failures.append((int(o), type(exc).__name__))
            continue
        actual = panel.values[o + 1 : o + 1 + horizon]
        ok.append(int(o))
        errs.append(actual - path.values)
    errors = (
        np.stack(errs) if errs else np.zeros((0, horizon, panel.d))
    )
    return CellResult(
        origins_ok=np.asarray(ok, dtype=int),
        errors=errors,
        failures=tuple(failures),
    )


@dataclass(frozen=True, eq=False)
class CellRecord:
    """Aggregated scores of one grid cell."""

    T: int
    p: int
    r: int
    n_failed: int
    mae: float | None
    mse: float | None
    per_origin_abs: np.ndarray
    per_origin_sq: np.ndarray
    origins_ok: np.ndarray
    failures: tuple[tuple[int, str], ...]

    @property
    def n_ok(self) -> int:
        return int(self.origins_ok.size)


@dataclass(frozen=True, eq=False)
class BacktestGridResult:
    """All cell records plus the shared origin set and run metadata."""

    records: tuple[CellRecord, ...]
    origins: np.ndarray
    d: int
    T_grid: tuple[int, ...]
    p_grid: tuple[int, ...]
    r_grid: tuple[int, ...]
    horizon: int
    metadata: dict

    def cell(self, T: int, p: int, r: int) -> CellRecord:
        for rec in self.records:
            if (rec.T, rec.p, rec.r) == (T, p, r):
                return rec
        raise KeyError((T, p, r))


def _summarize_cell(T: int, p: int, r: int, cell: CellResult) -> CellRecord:
    if cell.errors.shape[0]:
        error_list = list(cell.errors)
        cell_mae = metrics.mae(error_list)
        cell_mse = metrics.mse(error_list)
        abs_losses = metrics.per_origin_loss(error_list, "absolute")
        sq_losses = metrics.per_origin_loss(error_list, "squared")
    else:
        cell_mae = cell_mse = None
        abs_losses = np.zeros(0)
        sq_losses = np.zeros(0)
    return CellRecord(
        T=T,
        p=p,
        r=r,
        n_failed=len(cell.failures),
        mae=cell_mae,
        mse=cell_mse,
        per_origin_abs=abs_losses,
        per_origin_sq=sq_losses,
        origins_ok=cell.origins_ok,
        failures=cell.failures,
    )


# Worker-process state for parallel grid evaluation: the panel is shipped
# once per worker instead of once per cell.
_worker: dict = {}


def _init_worker(values, timestamps, labels, origins, horizon, det_value, clip):
    _worker["panel"] = TimeSeriesPanel(values, timestamps, labels)
    _worker["origins"] = origins
    _worker["horizon"] = horizon
    _worker["det"] = DeterministicSpec(det_value)
    _worker["clip"] = clip


def _eval_cell(cell_key: tuple[int, int, int]) -> tuple[tuple[int, int, int], CellRecord]:
    T, p, r = cell_key
    result = run_cell(
        _worker["panel"], T, p, r, _worker["origins"], _worker["horizon"],
        det=_worker["det"], clip_nonnegative=_worker["clip"],
    )
    return cell_key, _summarize_cell(T, p, r, result)


def data_fingerprint(panel: TimeSeriesPanel) -> str:
    """Stable content hash of a panel (values, shape, labels)."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(panel.values).tobytes())
    h.update(repr(panel.values.shape).encode())
    h.update(",".join(panel.labels).encode())
    return h.hexdigest()


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV_VAR, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_grid(
    panel: TimeSeriesPanel,
    config: BacktestConfig,
    workers: int | None = None,
) -> BacktestGridResult:
    """Evaluate every (T, p, r) cell on one shared origin set.

    Deterministic given (panel, config): cells are aggregated in grid order
    regardless of the number of worker processes.
    """
    r_grid = config.resolve_ranks(panel.d)
    if max(r_grid) > panel.d:
        raise InvalidInputError(f"r_grid exceeds panel dimension d={panel.d}")
    t_max = max(config.T_grid)
    origins = sample_origins(
        panel.n_obs, t_max, config.horizon, config.n_origins, config.seed
    )
    cells = [
        (T, p, r)
        for T in config.T_grid
        for p in config.p_grid
        for r in r_grid
    ]
    n_workers = default_workers() if workers is None else max(1, workers)
    records_by_key: dict[tuple[int, int, int], CellRecord] = {}
    if n_workers == 1 or len(cells) == 1:
        for key in cells:
            T, p, r = key
            cell = run_cell(
                panel, T, p, r, origins, config.horizon,
                det=config.det, clip_nonnegative=config.clip_nonnegative,
            )
            records_by_key[key] = _summarize_cell(T, p, r, cell)
    else:
        init_args = (
            np.asarray(panel.values), panel.timestamps, panel.labels,
            origins, config.horizon, config.det.value, config.clip_nonnegative,
        )
        with ProcessPoolExecutor(
            max_workers=min(n_workers, len(cells)),
            initializer=_init_worker,
            initargs=init_args,
        ) as pool:
            for key, record in pool.map(_eval_cell, cells):
                records_by_key[key] = record
    records = tuple(records_by_key[key] for key in cells)
    metadata = {
        "seed": config.seed,
        "data_fingerprint": data_fingerprint(panel),
        "coverage_start": str(panel.timestamps[0]),
        "coverage_end": str(panel.timestamps[-1]),
        "n_origins": config.n_origins,
        "horizon": config.horizon,
        "det": config.det.value,
        "clip_nonnegative": config.clip_nonnegative,
        "shared_origins": True,
    }
    return BacktestGridResult(
        records=records,
        origins=origins,
        d=panel.d,
        T_grid=config.T_grid,
        p_grid=config.p_grid,
        r_grid=r_grid,
        horizon=config.horizon,
        metadata=metadata,
    )


@dataclass(frozen=True)
class TSummary:
    """Best cell for one calibration length plus improvements vs the limits.

    ``improvement_vs_diff_var`` compares against the best r=0 cell (the VAR
    on differences), ``improvement_vs_levels_var`` against the best r=d cell
    (the VAR on levels); both use (loss_alt - loss_best) / loss_alt and are
    None when the respective limit cells are absent or all failed.
    """

    T: int
    best_p: int | None
    best_r: int | None
    best_loss: float | None
    improvement_vs_diff_var: float | None
    improvement_vs_levels_var: float | None
    note: str = ""


def _improvement(alt: float | None, best: float) -> float | None:
    if alt is None or alt == 0.0:
        return None
    return (alt - best) / alt


def summarize_best(
    result: BacktestGridResult, metric: str = "mae"
) -> tuple[TSummary, ...]:
    """Per-T best cells in the layout of the study's summary tables."""
    if metric not in ("mae", "mse"):
        raise InvalidInputError(f"metric must be 'mae' or 'mse', got {metric!r}")
    if not result.records:
        raise InvalidInputError("empty backtest result")
    rows = []
    for T in result.T_grid:
        scored = [
            rec for rec in result.records
            if rec.T == T and getattr(rec, metric) is not None
        ]
        if not scored:
            rows.append(TSummary(T, None, None, None, None, None,
                                 note="all cells failed"))
            continue
        best = min(scored, key=lambda rec: getattr(rec, metric))
        best_loss = getattr(best, metric)
        diff_cells = [getattr(c, metric) for c in scored if c.r == 0]
        levels_cells = [getattr(c, metric) for c in scored if c.r == result.d]
        rows.append(
            TSummary(
                T=T,
                best_p=best.p,
                best_r=best.r,
                best_loss=best_loss,
                improvement_vs_diff_var=_improvement(
                    min(diff_cells) if diff_cells else None, best_loss
                ),
                improvement_vs_levels_var=_improvement(
                    min(levels_cells) if levels_cells else None, best_loss
                ),
            )
        )
    return tuple(rows)


@dataclass(frozen=True, eq=False)
class CombinationResult:
    """Losses of two forecasters and their equal-weight combination."""

    spec_a: tuple[int, int]
    spec_b: tuple[int, int]
    T: int
    origins_ok: np.ndarray
    n_failed: int
    mae_a: float
    mae_b: float
    mae_combined: float
    mse_a: float
    mse_b: float
    mse_combined: float
    abs_losses: dict          # name -> per-origin absolute losses
    sq_losses: dict           # name -> per-origin squared losses


def run_combination(
    panel: TimeSeriesPanel,
    T: int,
    spec_a: tuple[int, int],
    spec_b: tuple[int, int],
    origins: np.ndarray,
    horizon: int,
    det: DeterministicSpec = DeterministicSpec.CONSTANT,
    clip_nonnegative: bool = False,
) -> CombinationResult:
    """Evaluate models (p, r) A and B and their mean on identical origins.

    Origins where either component fails to fit are skipped for all three
    forecasters, keeping the three loss series aligned.
    """
    origins = np.asarray(origins, dtype=int)
    if origins.size and (origins.min() < T or origins.max() + horizon >= panel.n_obs):
        raise InvalidInputError("every origin must satisfy o >= T and o + H < n_obs")
    p_a, r_a = spec_a
    p_b, r_b = spec_b
    ok: list[int] = []
    err_a: list[np.ndarray] = []
    err_b: list[np.ndarray] = []
    err_c: list[np.ndarray] = []
    n_failed = 0
    for o in origins:
        window = panel.window(o - T + 1, o + 1)
        try:
            model_a = fit_vecm(window, p_a, r_a, det)
            model_b = fit_vecm(window, p_b, r_b, det)
            path_a = forecast_vecm(model_a, window, horizon, origin_index=o,
                                   clip_nonnegative=clip_nonnegative)
            path_b = forecast_vecm(model_b, window, horizon, origin_index=o,
                                   clip_nonnegative=clip_nonnegative)
        except _CELL_FAILURES:
            n_failed += 1
            continue
        path_c = combine_equal([path_a, path_b])
        actual = panel.values[o + 1 : o + 1 + horizon]
        ok.append(int(o))
        err_a.append(actual - path_a.values)
        err_b.append(actual - path_b.values)
        err_c.append(actual - path_c.values)
    if not ok:
        raise InsufficientDataError("every origin failed for the combination run")
    abs_losses = {
        "a": metrics.per_origin_loss(err_a, "absolute"),
        "b": metrics.per_origin_loss(err_b, "absolute"),
        "combined": metrics.per_origin_loss(err_c, "absolute"),
    }
    sq_losses = {
        "a": metrics.per_origin_loss(err_a, "squared"),
        "b": metrics.per_origin_loss(err_b, "squared"),
        "combined": metrics.per_origin_loss(err_c, "squared"),
    }
    return CombinationResult(
        spec_a=spec_a,
        spec_b=spec_b,
        T=T,
        origins_ok=np.asarray(ok, dtype=int),
        n_failed=n_failed,
        mae_a=metrics.mae(err_a),
        mae_b=metrics.mae(err_b),
        mae_combined=metrics.mae(err_c),
        mse_a=metrics.mse(err_a),
        mse_b=metrics.mse(err_b),
        mse_combined=metrics.mse(err_c),
        abs_losses=abs_losses,
        sq_losses=sq_losses,
    )
