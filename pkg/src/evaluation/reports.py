"""Report files for a MatrixReport.

Floats are written with fixed precision so reruns under the virtual clock
produce byte-identical files.
"""

import csv
import hashlib
import io
import json
from pathlib import Path
from typing import Any

from src.core.errors import IoFailure
from src.core.logger import get_logger
from src.evaluation.harness import REFERENCE_NOTE, CellReport, MatrixReport

logger = get_logger(__name__)

MATRIX_FILE = "matrix.json"
TABLE_FILE = "table.csv"
HEATMAP_F1_FILE = "heatmap_f1.csv"
HEATMAP_TIME_FILE = "heatmap_time.csv"
OUTCOMES_FILE = "outcomes.jsonl"
NULL_MARKER = "null"
PRECISION = 6

TABLE_COLUMNS = [
    "method", "format", "precision", "recall", "f1", "f1_std",
    "success_rate", "perfect_rate", "ocr_s", "llm_s", "total_s", "n_docs", "note",
]


def _fixed(value: float) -> str:
    return f"{value:.{PRECISION}f}"


def _rounded(data: Any) -> Any:
    if isinstance(data, float):
        return round(data, PRECISION)
    if isinstance(data, dict):
        return {key: _rounded(value) for key, value in data.items()}
    if isinstance(data, list):
        return [_rounded(item) for item in data]
    return data


def _csv_text(rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    return buffer.getvalue()


def matrix_json(report: MatrixReport) -> str:
    data = _rounded(report.model_dump(mode="json", exclude={"documents"}))
    data["f1_std_kind"] = "population standard deviation of per-document F1"
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _table_row(cell: CellReport) -> list[str]:
    return [
        cell.method,
        cell.format.value,
        _fixed(cell.precision),
        _fixed(cell.recall),
        _fixed(cell.f1),
        _fixed(cell.f1_std),
        _fixed(cell.success_rate),
        _fixed(cell.perfect_rate),
        _fixed(cell.ocr_s),
        _fixed(cell.llm_s),
        _fixed(cell.total_s),
        str(cell.n_docs),
        REFERENCE_NOTE if cell.reference else "",
    ]


def flat_table_csv(report: MatrixReport) -> str:
    return _csv_text([TABLE_COLUMNS] + [_table_row(cell) for cell in report.cells])


def heatmap_csv(report: MatrixReport, field: str) -> str:
    """Method rows by format columns; unsupported cells hold the null marker."""
    rows = [["method"] + [fmt.value for fmt in report.formats]]
    for method in report.methods:
        row = [method]
        for fmt in report.formats:
            cell = report.cell(method, fmt)
            row.append(NULL_MARKER if cell is None else _fixed(getattr(cell, field)))
        rows.append(row)
    return _csv_text(rows)


def outcomes_jsonl(report: MatrixReport) -> str:
    lines = [
        json.dumps(_rounded(score.model_dump(mode="json")), ensure_ascii=False, sort_keys=True)
        for score in report.documents
    ]
    return "".join(line + "\n" for line in lines)


def emit_reports(report: MatrixReport, out_dir: Path) -> dict[str, Path]:
    """Write every report file into out_dir.

    Raises:
        IoFailure: A file cannot be written.
    """
    out_dir = Path(out_dir)
    contents = {
        MATRIX_FILE: matrix_json(report),
        TABLE_FILE: flat_table_csv(report),
        HEATMAP_F1_FILE: heatmap_csv(report, "f1"),
        HEATMAP_TIME_FILE: heatmap_csv(report, "total_s"),
        OUTCOMES_FILE: outcomes_jsonl(report),
    }
    written = {}
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in contents.items():
            path = out_dir / name
            path.write_text(text, encoding="utf-8")
            written[name] = path
    except OSError as e:
        raise IoFailure(f"cannot write reports to {out_dir}: {e}") from e
    logger.info(f"Wrote {len(written)} report files to {out_dir}")
    return written


def file_digests(paths: dict[str, Path]) -> dict[str, str]:
    try:
        return {name: hashlib.sha256(path.read_bytes()).hexdigest() for name, path in sorted(paths.items())}
    except OSError as e:
        raise IoFailure(f"cannot read report file: {e}") from e
