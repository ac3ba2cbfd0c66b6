"""Tests for the docx and xlsx readers."""

import io
import time
import zipfile

import pytest

from src.core.errors import MalformedInput
from src.ingest.models import DocumentFormat, Fidelity
from src.ingest.office import (
    SS_NS,
    W_NS,
    column_index,
    column_letters,
    parse_docx,
    parse_xlsx,
    render_numeric,
)


def archive(parts: dict[str, str]) -> bytes:
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as zf:
        for name, text in parts.items():
            zf.writestr(name, text.encode("utf-8"))
    return buffer.getvalue()


def docx_body(inner: str) -> bytes:
    return archive({"word/document.xml": f'<w:document xmlns:w="{W_NS}"><w:body>{inner}</w:body></w:document>'})


def sheet(rows: str) -> bytes:
    return archive({"xl/worksheets/sheet1.xml": f'<worksheet xmlns="{SS_NS}"><sheetData>{rows}</sheetData></worksheet>'})


class TestParseDocx:
    """Tests for parse_docx."""

    def test_generated_document(self, render):
        """A 30-entry form yields a 31-row table, header included."""
        record = render(DocumentFormat.DOCX, n=30)
        st = parse_docx(record.payload_path.read_bytes())
        assert st.fidelity is Fidelity.PRESERVED
        assert len(st.table.rows) + 1 == 31
        assert st.table.header == ["序号", "姓名", "身份证号", "险种"]
        assert [(row[1], row[2]) for row in st.table.rows] == [(p.name, p.id_number) for p in record.truth]
        assert st.plain_text.startswith("参保人员登记表")

    def test_paragraph_order_kept(self):
        inner = (
            "<w:p><w:r><w:t>第一段</w:t></w:r></w:p>"
            "<w:p><w:r><w:t>王芳</w:t><w:tab/><w:t>11010519491231002X</w:t></w:r></w:p>"
        )
        st = parse_docx(docx_body(inner))
        assert st.plain_text == "第一段\n王芳\t11010519491231002X"
        assert st.table is None
        assert st.fidelity is Fidelity.SYMBOLIC_ONLY

    def test_first_table_wins(self):
        row = "<w:tr><w:tc><w:p><w:r><w:t>{}</w:t></w:r></w:p></w:tc><w:tc><w:p><w:r><w:t>{}</w:t></w:r></w:p></w:tc></w:tr>"
        inner = (
            "<w:tbl>" + row.format("a", "b") + row.format("1", "2") + "</w:tbl>"
            + "<w:tbl>" + row.format("c", "d") + row.format("3", "4") + "</w:tbl>"
        )
        st = parse_docx(docx_body(inner))
        assert st.table.header == ["a", "b"]
        assert st.table.rows == [["1", "2"]]
        assert "c\td" in st.plain_text

    def test_truncated_archive(self, render):
        payload = render(DocumentFormat.DOCX, n=5).payload_path.read_bytes()
        with pytest.raises(MalformedInput):
            parse_docx(payload[: len(payload) // 2])

    def test_missing_main_part(self):
        with pytest.raises(MalformedInput, match="missing part"):
            parse_docx(archive({"word/other.xml": "<x/>"}))

    def test_bad_xml(self):
        with pytest.raises(MalformedInput, match="cannot parse"):
            parse_docx(archive({"word/document.xml": "<w:document"}))

    def test_no_text(self):
        with pytest.raises(MalformedInput, match="no text"):
            parse_docx(docx_body("<w:p/>"))


class TestParseXlsx:
    """Tests for parse_xlsx."""

    def test_generated_workbook(self, render):
        record = render(DocumentFormat.XLSX, n=30, template_id="travel_record")
        st = parse_xlsx(record.payload_path.read_bytes())
        assert st.fidelity is Fidelity.PRESERVED
        assert st.table.header == ["姓名", "身份证号", "出行日期"]
        assert [(row[0], row[1]) for row in st.table.rows] == [(p.name, p.id_number) for p in record.truth]

    def test_ten_thousand_rows_parse_within_a_second(self, render):
        payload = render(DocumentFormat.XLSX, n=10_000, template_id="travel_record").payload_path.read_bytes()
        started = time.perf_counter()
        st = parse_xlsx(payload)
        assert time.perf_counter() - started < 1.0
        assert len(st.table.rows) == 10_000

    def test_inline_and_sparse_cells(self):
        rows = (
            '<row r="1"><c r="A1" t="inlineStr"><is><t>姓名</t></is></c>'
            '<c r="C1" t="inlineStr"><is><t>身份证号</t></is></c></row>'
            '<row r="2"><c r="A2" t="str"><v>王芳</v></c><c r="C2" t="str"><v>11010519491231002X</v></c></row>'
        )
        st = parse_xlsx(sheet(rows))
        assert st.table.header == ["姓名", "", "身份证号"]
        assert st.table.rows == [["王芳", "", "11010519491231002X"]]

    def test_numeric_cells_lose_exponent(self):
        rows = '<row r="1"><c r="A1"><v>1.5E+3</v></c><c r="B1"><v>42</v></c></row>'
        st = parse_xlsx(sheet(rows))
        assert st.plain_text == "1500\t42"

    def test_empty_worksheet(self):
        with pytest.raises(MalformedInput, match="no cells"):
            parse_xlsx(sheet(""))

    def test_bad_shared_string_reference(self):
        with pytest.raises(MalformedInput, match="shared string"):
            parse_xlsx(sheet('<row r="1"><c r="A1" t="s"><v>7</v></c></row>'))

    def test_not_a_zip(self):
        with pytest.raises(MalformedInput, match="not a zip"):
            parse_xlsx(b"plain text")


class TestColumnNames:
    """Tests for spreadsheet column naming."""

    @pytest.mark.parametrize("letters, index", [("A", 0), ("Z", 25), ("AA", 26), ("AZ", 51), ("BA", 52)])
    def test_both_directions(self, letters, index):
        assert column_index(letters) == index
        assert column_letters(index) == letters

    def test_render_numeric_plain(self):
        assert render_numeric("3.25") == "3.25"
