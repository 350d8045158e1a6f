"""Read delimited quarter-hourly production data into a clean panel.

Two canonical shapes are accepted, autodetected from the header row:

* long form  -- ``timestamp,region,value``, one observation per line;
* wide form  -- ``timestamp,<region>,<region>,...``, one instant per line.

Comma and semicolon delimiters are autodetected. Timestamps are ISO 8601,
with or without a zone offset; offsets are normalized to UTC and naive
timestamps are taken as already UTC. Duplicate (timestamp, region) readings
(clock-change exports) are averaged; interior gaps of at most
``max_gap_slots`` grid steps are filled linearly; anything longer leaves the
rows incomplete and the longest contiguous run of complete rows is returned,
so the output always satisfies the uniform-grid/no-missing panel contract.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import NoOverlapError, ParseError, SchemaError
from .panel import TimeSeriesPanel

_MISSING_TOKENS = {"", "na", "nan", "null", "none", "-"}


@dataclass(frozen=True)
class IngestOptions:
    """Knobs for gap handling and schema checking."""

    max_gap_slots: int = 8           # 8 quarter-hours = 2 h
    expected_regions: int | None = None
    step_minutes: int = 15


@dataclass(frozen=True)
class IngestReport:
    """What ingestion read and how conflicts were resolved."""

    rows_read: int
    gaps_filled: int
    duplicates_resolved: int
    regions_found: tuple[str, ...]
    coverage_span: tuple[np.datetime64, np.datetime64]
    rows_dropped: int


def _parse_timestamp(token: str, line_no: int) -> np.datetime64:
    text = token.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        stamp = datetime.fromisoformat(text)
    except ValueError:
        raise ParseError(f"unparseable timestamp {token!r}", line=line_no) from None
    if stamp.tzinfo is not None:
        stamp = stamp.astimezone(timezone.utc).replace(tzinfo=None)
    return np.datetime64(stamp, "s")


def _parse_value(token: str, line_no: int) -> float | None:
    text = token.strip()
    if text.lower() in _MISSING_TOKENS:
        return None
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"unparseable value {token!r}", line=line_no) from None


def _sniff_delimiter(header_line: str) -> str:
    if header_line.count(";") > header_line.count(","):
        return ";"
    return ","


def _read_file(path: Path, cells: dict[str, dict[np.datetime64, list[float]]]) -> int:
    """Accumulate (region -> timestamp -> readings); returns data rows read."""
    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        header_line = fh.readline()
        if not header_line.strip():
            raise ParseError("empty file", line=1)
        delim = _sniff_delimiter(header_line)
        header = [h.strip() for h in header_line.rstrip("\r\n").split(delim)]
        lowered = [h.lower() for h in header]
        reader = csv.reader(fh, delimiter=delim)
        rows = 0
        if lowered == ["timestamp", "region", "value"]:
            for line_no, row in enumerate(reader, start=2):
                if not row or not "".join(row).strip():
                    continue
                if len(row) != 3:
                    raise ParseError(
                        f"expected 3 fields, found {len(row)}", line=line_no
                    )
                ts = _parse_timestamp(row[0], line_no)
                region = row[1].strip()
                if not region:
                    raise ParseError("empty region label", line=line_no)
                value = _parse_value(row[2], line_no)
                if value is not None:
                    cells.setdefault(region, {}).setdefault(ts, []).append(value)
                rows += 1
        elif lowered and lowered[0] == "timestamp" and len(header) >= 2:
            regions = header[1:]
            if any(not r for r in regions):
                raise ParseError("empty region label in header", line=1)
            for line_no, row in enumerate(reader, start=2):
                if not row or not "".join(row).strip():
                    continue
                if len(row) != len(header):
                    raise ParseError(
                        f"expected {len(header)} fields, found {len(row)}",
                        line=line_no,
                    )
                ts = _parse_timestamp(row[0], line_no)
                for region, token in zip(regions, row[1:]):
                    value = _parse_value(token, line_no)
                    if value is not None:
                        cells.setdefault(region, {}).setdefault(ts, []).append(value)
                rows += 1
        else:
            raise ParseError(
                "unknown header; expected 'timestamp,region,value' or "
                "'timestamp,<region>,...'",
                line=1,
            )
        return rows


def _longest_complete_run(complete: np.ndarray) -> tuple[int, int]:
    """(start, stop) of the earliest longest True run."""
    best_start, best_len = 0, 0
    run_start, run_len = 0, 0
    for i, flag in enumerate(complete):
        if flag:
            if run_len == 0:
                run_start = i
            run_len += 1
            if run_len > best_len:
                best_start, best_len = run_start, run_len
        else:
            run_len = 0
    return best_start, best_start + best_len


def load_panel(
    paths, options: IngestOptions | None = None
) -> tuple[TimeSeriesPanel, IngestReport]:
    """Ingest one or more delimited files into a clean panel plus a report.

    Region columns come out in sorted label order; the grid runs from the
    first to the last instant covered by every region.
    """
    options = options or IngestOptions()
    if isinstance(paths, (str, Path)):
        paths = [paths]
    cells: dict[str, dict[np.datetime64, list[float]]] = {}
    rows_read = 0
    for path in paths:
        rows_read += _read_file(Path(path), cells)
    regions = tuple(sorted(cells))
    if not regions:
        raise SchemaError("no regions found in input")
    if options.expected_regions is not None and len(regions) != options.expected_regions:
        raise SchemaError(
            f"expected {options.expected_regions} regions, found {len(regions)}"
        )

    duplicates = 0
    per_region: dict[str, dict[np.datetime64, float]] = {}
    for region in regions:
        resolved = {}
        for ts, readings in cells[region].items():
            if len(readings) > 1:
                duplicates += len(readings) - 1
            resolved[ts] = float(np.mean(readings))
        if not resolved:
            raise SchemaError(f"region {region!r} has no usable values")
        per_region[region] = resolved

    start = max(min(r.keys()) for r in per_region.values())
    end = min(max(r.keys()) for r in per_region.values())
    if start > end:
        raise NoOverlapError("input series share no common coverage")
    step = np.timedelta64(options.step_minutes * 60, "s")
    grid = np.arange(start, end + step, step)
    n, d = grid.size, len(regions)

    values = np.full((n, d), np.nan)
    for j, region in enumerate(regions):
        for ts, value in per_region[region].items():
            offset = (ts - start) // step
            if 0 <= offset < n and start + offset * step == ts:
                values[int(offset), j] = value

    gaps_filled = 0
    for j in range(d):
        col = values[:, j]
        missing = np.isnan(col)
        if not missing.any():
            continue
        observed = np.flatnonzero(~missing)
        if observed.size == 0:
            continue
        i = 0
        while i < n:
            if not missing[i]:
                i += 1
                continue
            run_start = i
            while i < n and missing[i]:
                i += 1
            run_len = i - run_start
            # interior runs only: never extrapolate beyond observed endpoints
            if run_start == 0 or i == n or run_len > options.max_gap_slots:
                continue
            lo, hi = run_start - 1, i
            frac = (np.arange(run_start, i) - lo) / (hi - lo)
            col[run_start:i] = col[lo] + frac * (col[hi] - col[lo])
            gaps_filled += run_len
        values[:, j] = col

    complete = ~np.isnan(values).any(axis=1)
    if not complete.any():
        raise NoOverlapError("no complete rows remain after gap handling")
    lo, hi = _longest_complete_run(complete)
    rows_dropped = int(n - (hi - lo))

    panel = TimeSeriesPanel(values[lo:hi], grid[lo:hi], regions)
    report = IngestReport(
        rows_read=rows_read,
        gaps_filled=gaps_filled,
        duplicates_resolved=duplicates,
        regions_found=regions,
        coverage_span=(panel.timestamps[0], panel.timestamps[-1]),
        rows_dropped=rows_dropped,
    )
    return panel, report


def save_wide(panel: TimeSeriesPanel, path) -> None:
    """Write a panel in the wide format; loading it back is value-exact."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("timestamp," + ",".join(panel.labels) + "\n")
        for i in range(panel.n_obs):
            stamp = str(panel.timestamps[i].astype("datetime64[s]")) + "Z"
            row = ",".join(f"{v:.17g}" for v in panel.values[i])
            fh.write(f"{stamp},{row}\n")
