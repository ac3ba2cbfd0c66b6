"""Tests for report files."""

import json

import pytest

from src.core.config import ClockMode
from src.core.errors import IoFailure
from src.evaluation.harness import MULTIMODAL_REFERENCE, CellReport, DocumentScore, MatrixReport, run_matrix
from src.evaluation.reports import (
    HEATMAP_F1_FILE,
    MATRIX_FILE,
    NULL_MARKER,
    OUTCOMES_FILE,
    TABLE_COLUMNS,
    TABLE_FILE,
    emit_reports,
    file_digests,
    flat_table_csv,
    heatmap_csv,
    matrix_json,
    outcomes_jsonl,
)
from src.ingest.models import DocumentFormat
from src.router.policy import MethodConfig


def cell(method: str, fmt: DocumentFormat, f1: float, total_s: float) -> CellReport:
    return CellReport(
        method=method, format=fmt, precision=f1, recall=f1, f1=f1, f1_std=0.0,
        success_rate=1.0, perfect_rate=1.0 if f1 == 1.0 else 0.0,
        ocr_s=0.1, llm_s=total_s - 0.1, total_s=total_s, n_docs=2,
    )


@pytest.fixture
def small_report() -> MatrixReport:
    return MatrixReport(
        cells=[
            cell("native_docx+table", DocumentFormat.DOCX, 1.0, 0.49),
            cell("native_xlsx+table", DocumentFormat.XLSX, 2 / 3, 0.39),
            MULTIMODAL_REFERENCE,
        ],
        methods=["native_docx+table", "native_xlsx+table"],
        formats=[DocumentFormat.DOCX, DocumentFormat.XLSX],
        corpus_digest="abc",
        config_digest="def",
        clock_mode=ClockMode.VIRTUAL,
        documents=[
            DocumentScore(
                doc_id="docx-0000", method="native_docx+table", format=DocumentFormat.DOCX,
                precision=1.0, recall=1.0, f1=1.0, fatal=False, ocr_s=0.1, llm_s=0.39, total_s=0.49,
            ),
        ],
    )


class TestMatrixJson:
    """Tests for matrix.json."""

    def test_contents(self, small_report):
        data = json.loads(matrix_json(small_report))
        assert data["corpus_digest"] == "abc"
        assert data["clock_mode"] == "virtual"
        assert "documents" not in data
        assert "population" in data["f1_std_kind"]
        assert data["cells"][1]["f1"] == 0.666667
        assert data["cells"][-1]["reference"] is True


class TestFlatTable:
    """Tests for table.csv."""

    def test_header_and_rows(self, small_report):
        lines = flat_table_csv(small_report).splitlines()
        assert lines[0] == ",".join(TABLE_COLUMNS)
        assert lines[1].startswith("native_docx+table,docx,1.000000,1.000000,1.000000,0.000000,")
        assert lines[2].split(",")[4] == "0.666667"
        assert len(lines) == 4

    def test_reference_row_is_flagged(self, small_report):
        last = flat_table_csv(small_report).splitlines()[-1].split(",")
        assert last[0] == "multimodal_reference"
        assert last[1] == "transcript"
        assert last[-1] == "reference constants"


class TestHeatmap:
    """Tests for the heatmap grids."""

    def test_unsupported_cells_hold_null(self, small_report):
        assert heatmap_csv(small_report, "f1") == (
            "method,docx,xlsx\n"
            "native_docx+table,1.000000,null\n"
            f"native_xlsx+table,{NULL_MARKER},0.666667\n"
        )

    def test_time_grid(self, small_report):
        rows = heatmap_csv(small_report, "total_s").splitlines()
        assert rows[1] == "native_docx+table,0.490000,null"

    def test_reference_row_excluded(self, small_report):
        assert "multimodal_reference" not in heatmap_csv(small_report, "f1")


class TestOutcomes:
    """Tests for the per-document log."""

    def test_one_sorted_json_object_per_line(self, small_report):
        lines = outcomes_jsonl(small_report).splitlines()
        assert len(lines) == 1
        record = json.loads(lines[0])
        assert record["doc_id"] == "docx-0000"
        assert record["format"] == "docx"
        assert list(record) == sorted(record)


class TestEmitReports:
    """Tests for writing the report directory."""

    def test_writes_every_file(self, small_report, tmp_path):
        written = emit_reports(small_report, tmp_path / "report")
        assert set(written) == {MATRIX_FILE, TABLE_FILE, HEATMAP_F1_FILE, "heatmap_time.csv", OUTCOMES_FILE}
        assert all(path.is_file() for path in written.values())
        assert written[TABLE_FILE].read_text(encoding="utf-8") == flat_table_csv(small_report)

    def test_empty_report_keeps_headers(self, tmp_path):
        empty = MatrixReport(
            cells=[], methods=[], formats=[], corpus_digest="a", config_digest="b", clock_mode=ClockMode.VIRTUAL,
        )
        written = emit_reports(empty, tmp_path)
        assert written[TABLE_FILE].read_text(encoding="utf-8") == ",".join(TABLE_COLUMNS) + "\n"
        assert written[HEATMAP_F1_FILE].read_text(encoding="utf-8") == "method\n"
        assert written[OUTCOMES_FILE].read_text(encoding="utf-8") == ""

    def test_unwritable_directory(self, small_report, tmp_path):
        blocker = tmp_path / "taken"
        blocker.write_text("not a directory", encoding="utf-8")
        with pytest.raises(IoFailure):
            emit_reports(small_report, blocker)

    def test_digests_cover_every_file(self, small_report, tmp_path):
        digests = file_digests(emit_reports(small_report, tmp_path))
        assert list(digests) == sorted(digests)
        assert all(len(value) == 64 for value in digests.values())

    @pytest.mark.asyncio
    async def test_reruns_are_byte_identical(self, corpus_factory, registry, gateway, tmp_path):
        records = corpus_factory((DocumentFormat.DOCX, DocumentFormat.TRANSCRIPT), 2)
        methods = [MethodConfig.parse(name) for name in ("native_docx+table", "ocr_preserving+direct")]

        async def run():
            return await run_matrix(
                records, methods, registry, gateway,
                clock_mode=ClockMode.VIRTUAL, corpus_digest="c", config_digest="d",
            )

        first = file_digests(emit_reports(await run(), tmp_path / "a"))
        second = file_digests(emit_reports(await run(), tmp_path / "b"))
        assert first == second
