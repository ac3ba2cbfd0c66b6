"""Tests for format detection."""

import io
import zipfile

import pytest

from src.core.errors import IoFailure
from src.ingest.detect import detect_format, read_payload
from src.ingest.models import DocumentFormat


def zip_with(*names: str) -> bytes:
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as archive:
        for name in names:
            archive.writestr(name, "<x/>")
    return buffer.getvalue()


class TestDetectFormat:
    """Tests for detect_format."""

    @pytest.mark.parametrize("fmt", [
        DocumentFormat.MARKDOWN,
        DocumentFormat.DOCX,
        DocumentFormat.XLSX,
        DocumentFormat.PDF,
        DocumentFormat.TRANSCRIPT,
    ])
    def test_generated_documents(self, render, fmt):
        record = render(fmt, n=3)
        assert detect_format(record.payload_path) is fmt

    def test_content_beats_extension(self, tmp_path):
        path = tmp_path / "misnamed.md"
        path.write_bytes(zip_with("word/document.xml"))
        assert detect_format(path) is DocumentFormat.DOCX

    def test_xlsx_by_part_names(self, tmp_path):
        assert detect_format(tmp_path / "a.bin", zip_with("xl/workbook.xml")) is DocumentFormat.XLSX

    def test_pdf_header(self, tmp_path):
        assert detect_format(tmp_path / "a.txt", b"%PDF-1.4\n") is DocumentFormat.PDF

    def test_zip_without_office_parts(self, tmp_path):
        assert detect_format(tmp_path / "a.docx", zip_with("readme.txt")) is DocumentFormat.UNKNOWN

    def test_broken_zip(self, tmp_path):
        assert detect_format(tmp_path / "a.docx", b"PK\x03\x04garbage") is DocumentFormat.UNKNOWN

    def test_unknown_extension(self, tmp_path):
        assert detect_format(tmp_path / "notes.txt", b"hello") is DocumentFormat.UNKNOWN

    def test_empty_payload(self, tmp_path):
        assert detect_format(tmp_path / "empty.md", b"") is DocumentFormat.UNKNOWN

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoFailure):
            read_payload(tmp_path / "absent.pdf")
        with pytest.raises(IoFailure):
            detect_format(tmp_path / "absent.pdf")
