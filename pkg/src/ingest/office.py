"""Readers for the minimal Office Open XML subset (docx, xlsx)."""

import io
import re
import time
import zipfile
import xml.etree.ElementTree as ET
from decimal import Decimal, InvalidOperation
from typing import Optional

from src.core.errors import MalformedInput
from src.ingest.models import DocumentFormat, StructuredText, TableModel, structured

W_NS = "http://schemas.openxmlformats.org/wordprocessingml/2006/main"
SS_NS = "http://schemas.openxmlformats.org/spreadsheetml/2006/main"
R_NS = "http://schemas.openxmlformats.org/officeDocument/2006/relationships"
PKG_REL_NS = "http://schemas.openxmlformats.org/package/2006/relationships"

DOCX_MAIN_PART = "word/document.xml"
XLSX_WORKBOOK_PART = "xl/workbook.xml"
XLSX_DEFAULT_SHEET = "xl/worksheets/sheet1.xml"
XLSX_SHARED_STRINGS = "xl/sharedStrings.xml"

_W = f"{{{W_NS}}}"
_S = f"{{{SS_NS}}}"
RE_CELL_REF = re.compile(r"^([A-Z]+)(\d+)$")


def _open_archive(payload: bytes, kind: str) -> zipfile.ZipFile:
    try:
        return zipfile.ZipFile(io.BytesIO(payload))
    except (zipfile.BadZipFile, ValueError) as e:
        raise MalformedInput(f"{kind} payload is not a zip archive: {e}") from e


def _read_xml(archive: zipfile.ZipFile, part: str) -> ET.Element:
    try:
        return ET.fromstring(archive.read(part))
    except KeyError as e:
        raise MalformedInput(f"missing part {part}") from e
    except ET.ParseError as e:
        raise MalformedInput(f"cannot parse {part}: {e}") from e
    except (zipfile.BadZipFile, OSError, EOFError) as e:
        raise MalformedInput(f"cannot read {part}: {e}") from e


# docx

def _run_text(element: ET.Element) -> str:
    chunks = []
    for node in element.iter():
        if node.tag == f"{_W}t":
            chunks.append(node.text or "")
        elif node.tag == f"{_W}tab":
            chunks.append("\t")
        elif node.tag == f"{_W}br":
            chunks.append("\n")
    return "".join(chunks)


def _docx_table_rows(table: ET.Element) -> list[list[str]]:
    rows = []
    for row in table.findall(f"{_W}tr"):
        rows.append([_run_text(cell).strip() for cell in row.findall(f"{_W}tc")])
    return rows


def parse_docx(payload: bytes) -> StructuredText:
    """Parse a docx body: paragraphs in order, first table as the TableModel.

    Raises:
        MalformedInput: Not a zip, missing main part or unparseable XML.
    """
    started = time.perf_counter()
    with _open_archive(payload, "docx") as archive:
        root = _read_xml(archive, DOCX_MAIN_PART)

    body = root.find(f"{_W}body")
    if body is None:
        raise MalformedInput("docx main part has no body")

    lines: list[str] = []
    table: Optional[TableModel] = None
    for child in body:
        if child.tag == f"{_W}p":
            lines.append(_run_text(child))
        elif child.tag == f"{_W}tbl":
            rows = _docx_table_rows(child)
            lines.extend("\t".join(row) for row in rows)
            if table is None:
                table = TableModel.from_grid(rows)

    text = "\n".join(lines)
    if not text.strip():
        raise MalformedInput("docx document has no text")
    return structured(text, table, DocumentFormat.DOCX, time.perf_counter() - started)


# xlsx

def column_index(letters: str) -> int:
    """Zero-based index of a spreadsheet column name (A=0, AA=26)."""
    index = 0
    for letter in letters:
        index = index * 26 + (ord(letter) - ord("A") + 1)
    return index - 1


def column_letters(index: int) -> str:
    letters = ""
    index += 1
    while index:
        index, remainder = divmod(index - 1, 26)
        letters = chr(ord("A") + remainder) + letters
    return letters


def render_numeric(raw: str) -> str:
    """Numeric cell text without exponent notation."""
    if "e" not in raw.lower():
        return raw
    try:
        return format(Decimal(raw).normalize(), "f")
    except InvalidOperation:
        return raw


def _shared_strings(archive: zipfile.ZipFile) -> list[str]:
    if XLSX_SHARED_STRINGS not in archive.namelist():
        return []
    root = _read_xml(archive, XLSX_SHARED_STRINGS)
    return ["".join(t.text or "" for t in si.iter(f"{_S}t")) for si in root.findall(f"{_S}si")]


def _first_sheet_part(archive: zipfile.ZipFile) -> str:
    names = archive.namelist()
    if XLSX_WORKBOOK_PART not in names:
        return XLSX_DEFAULT_SHEET
    workbook = _read_xml(archive, XLSX_WORKBOOK_PART)
    sheets = workbook.find(f"{_S}sheets")
    rels_part = "xl/_rels/workbook.xml.rels"
    if sheets is None or len(sheets) == 0 or rels_part not in names:
        return XLSX_DEFAULT_SHEET
    rel_id = sheets[0].get(f"{{{R_NS}}}id")
    rels = _read_xml(archive, rels_part)
    for rel in rels.findall(f"{{{PKG_REL_NS}}}Relationship"):
        if rel.get("Id") == rel_id:
            target = rel.get("Target", "").lstrip("/")
            return target if target.startswith("xl/") else f"xl/{target}"
    return XLSX_DEFAULT_SHEET


def _cell_value(cell: ET.Element, shared: list[str]) -> str:
    kind = cell.get("t")
    if kind == "inlineStr":
        inline = cell.find(f"{_S}is")
        return "".join(t.text or "" for t in inline.iter(f"{_S}t")) if inline is not None else ""
    value = cell.find(f"{_S}v")
    raw = value.text if value is not None and value.text is not None else ""
    if kind == "s":
        try:
            return shared[int(raw)]
        except (ValueError, IndexError) as e:
            raise MalformedInput(f"bad shared string reference {raw!r}") from e
    if kind in ("str", "b", "e"):
        return raw
    return render_numeric(raw)


def parse_xlsx(payload: bytes) -> StructuredText:
    """Parse the first worksheet; row 1 is the header.

    Raises:
        MalformedInput: Not a zip, missing worksheet, unparseable XML or an
            empty worksheet.
    """
    started = time.perf_counter()
    with _open_archive(payload, "xlsx") as archive:
        shared = _shared_strings(archive)
        sheet = _read_xml(archive, _first_sheet_part(archive))

        grid: list[list[str]] = []
        for row in sheet.iter(f"{_S}row"):
            values: dict[int, str] = {}
            next_col = 0
            for cell in row.findall(f"{_S}c"):
                match = RE_CELL_REF.match(cell.get("r", ""))
                col = column_index(match.group(1)) if match else next_col
                values[col] = _cell_value(cell, shared)
                next_col = col + 1
            if any(v.strip() for v in values.values()):
                width = max(values) + 1
                grid.append([values.get(i, "") for i in range(width)])

    if not grid:
        raise MalformedInput("worksheet has no cells")
    width = max(len(row) for row in grid)
    grid = [row + [""] * (width - len(row)) for row in grid]
    text = "\n".join("\t".join(row) for row in grid)
    return structured(text, TableModel.from_grid(grid), DocumentFormat.XLSX, time.perf_counter() - started)
