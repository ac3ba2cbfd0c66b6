"""Rebuild lines and a table grid from positioned text runs.

Used by the PDF reader and by remote OCR responses carrying bounding boxes.
Coordinates are top-down: a larger y is further down the page.
"""

from dataclasses import dataclass
from statistics import median
from typing import Optional

from src.ingest.models import TableModel

DEFAULT_LINE_HEIGHT = 16.0
COLUMN_SLACK = 2.0
RUN_SEPARATOR = "  "


@dataclass(frozen=True)
class PositionedRun:
    x: float
    y: float
    text: str


def estimate_line_height(runs: list[PositionedRun]) -> float:
    ys = sorted({round(run.y, 1) for run in runs})
    gaps = [b - a for a, b in zip(ys, ys[1:]) if b - a > 2.0]
    return median(gaps) if gaps else DEFAULT_LINE_HEIGHT


def group_lines(runs: list[PositionedRun], line_height: Optional[float] = None) -> list[list[PositionedRun]]:
    """Bucket runs into lines by y within half a line height, each sorted by x."""
    if not runs:
        return []
    tolerance = (line_height or estimate_line_height(runs)) / 2
    lines: list[list[PositionedRun]] = []
    anchor = None
    for run in sorted(runs, key=lambda r: (r.y, r.x)):
        if anchor is None or run.y - anchor > tolerance:
            lines.append([])
            anchor = run.y
        lines[-1].append(run)
    return [sorted(line, key=lambda r: r.x) for line in lines]


def linearize(lines: list[list[PositionedRun]]) -> str:
    return "\n".join(RUN_SEPARATOR.join(run.text for run in line) for line in lines)


def _column_of(x: float, breakpoints: list[float]) -> int:
    column = 0
    for index, start in enumerate(breakpoints):
        if x + COLUMN_SLACK >= start:
            column = index
    return column


def grid_from_lines(lines: list[list[PositionedRun]]) -> Optional[TableModel]:
    """Table whose columns start at the header line's run positions.

    The header is the first line with two or more runs; every later line with
    two or more runs is a data row. Returns None when no usable table exists.
    """
    header_index = next((i for i, line in enumerate(lines) if len(line) >= 2), None)
    if header_index is None:
        return None
    header_line = lines[header_index]
    breakpoints = [run.x for run in header_line]
    width = len(breakpoints)

    rows = []
    for line in lines[header_index + 1:]:
        if len(line) < 2:
            continue
        cells = [""] * width
        for run in line:
            column = _column_of(run.x, breakpoints)
            cells[column] = f"{cells[column]} {run.text}".strip() if cells[column] else run.text
        rows.append(cells)
    table = TableModel(header=[run.text for run in header_line], rows=rows)
    return None if table.is_degenerate() else table
