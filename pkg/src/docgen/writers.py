"""Byte-deterministic writers for every corpus format."""

import io
import json
import zipfile
from typing import Callable
from xml.sax.saxutils import escape

from src.core.errors import UnsupportedFormat
from src.docgen.templates import DocumentLayout
from src.ingest.models import DocumentFormat
from src.ingest.office import PKG_REL_NS, R_NS, SS_NS, W_NS, column_letters

EPOCH = (1980, 1, 1, 0, 0, 0)
XML_DECLARATION = '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
OFFICE_DOC_REL = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument"


def _zip_bytes(parts: list[tuple[str, str]]) -> bytes:
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as zf:
        for name, data in parts:
            info = zipfile.ZipInfo(name, date_time=EPOCH)
            info.compress_type = zipfile.ZIP_DEFLATED
            info.create_system = 0
            zf.writestr(info, data.encode("utf-8"))
    return buffer.getvalue()


# markdown

def write_markdown(layout: DocumentLayout) -> bytes:
    def cell(text: str) -> str:
        return text.replace("|", "\\|")

    lines = [f"# {layout.title}", ""]
    for line in layout.context:
        lines.extend([line, ""])
    lines.append("| " + " | ".join(cell(c) for c in layout.header) + " |")
    lines.append("|" + "|".join("---" for _ in layout.header) + "|")
    lines.extend("| " + " | ".join(cell(c) for c in row) + " |" for row in layout.rows)
    lines.extend(["", layout.footer, ""])
    return "\n".join(lines).encode("utf-8")


# docx

def _docx_paragraph(text: str) -> str:
    return f'<w:p><w:r><w:t xml:space="preserve">{escape(text)}</w:t></w:r></w:p>'


def _docx_row(cells: list[str]) -> str:
    return "<w:tr>" + "".join(f"<w:tc>{_docx_paragraph(c)}</w:tc>" for c in cells) + "</w:tr>"


def write_docx(layout: DocumentLayout) -> bytes:
    content_types = (
        XML_DECLARATION
        + '<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">'
        '<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>'
        '<Default Extension="xml" ContentType="application/xml"/>'
        '<Override PartName="/word/document.xml" '
        'ContentType="application/vnd.openxmlformats-officedocument.wordprocessingml.document.main+xml"/>'
        "</Types>"
    )
    rels = (
        XML_DECLARATION
        + f'<Relationships xmlns="{PKG_REL_NS}">'
        f'<Relationship Id="rId1" Type="{OFFICE_DOC_REL}" Target="word/document.xml"/>'
        "</Relationships>"
    )
    body = [_docx_paragraph(layout.title)]
    body.extend(_docx_paragraph(line) for line in layout.context)
    body.append("<w:tbl><w:tblPr><w:tblW w:w=\"0\" w:type=\"auto\"/></w:tblPr>")
    body.append(_docx_row(layout.header))
    body.extend(_docx_row(row) for row in layout.rows)
    body.append("</w:tbl>")
    body.append(_docx_paragraph(layout.footer))
    document = (
        XML_DECLARATION
        + f'<w:document xmlns:w="{W_NS}" xmlns:r="{R_NS}"><w:body>'
        + "".join(body)
        + "</w:body></w:document>"
    )
    return _zip_bytes([
        ("[Content_Types].xml", content_types),
        ("_rels/.rels", rels),
        ("word/document.xml", document),
    ])


# xlsx

def write_xlsx(layout: DocumentLayout) -> bytes:
    """One worksheet: header on row 1, identity rows from row 2, all cells shared strings."""
    strings: dict[str, int] = {}
    sheet_rows = []
    for row_number, cells in enumerate([layout.header] + layout.rows, start=1):
        xml_cells = []
        for col, text in enumerate(cells):
            index = strings.setdefault(text, len(strings))
            xml_cells.append(f'<c r="{column_letters(col)}{row_number}" t="s"><v>{index}</v></c>')
        sheet_rows.append(f'<row r="{row_number}">' + "".join(xml_cells) + "</row>")

    total = len(layout.header) * (len(layout.rows) + 1)
    shared = (
        XML_DECLARATION
        + f'<sst xmlns="{SS_NS}" count="{total}" uniqueCount="{len(strings)}">'
        + "".join(f'<si><t xml:space="preserve">{escape(text)}</t></si>' for text in strings)
        + "</sst>"
    )
    sheet = (
        XML_DECLARATION
        + f'<worksheet xmlns="{SS_NS}" xmlns:r="{R_NS}"><sheetData>'
        + "".join(sheet_rows)
        + "</sheetData></worksheet>"
    )
    workbook = (
        XML_DECLARATION
        + f'<workbook xmlns="{SS_NS}" xmlns:r="{R_NS}"><sheets>'
        '<sheet name="Sheet1" sheetId="1" r:id="rId1"/>'
        "</sheets></workbook>"
    )
    workbook_rels = (
        XML_DECLARATION
        + f'<Relationships xmlns="{PKG_REL_NS}">'
        '<Relationship Id="rId1" '
        'Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/worksheet" '
        'Target="worksheets/sheet1.xml"/>'
        '<Relationship Id="rId2" '
        'Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/sharedStrings" '
        'Target="sharedStrings.xml"/>'
        "</Relationships>"
    )
    content_types = (
        XML_DECLARATION
        + '<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">'
        '<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>'
        '<Default Extension="xml" ContentType="application/xml"/>'
        '<Override PartName="/xl/workbook.xml" '
        'ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.sheet.main+xml"/>'
        '<Override PartName="/xl/worksheets/sheet1.xml" '
        'ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.worksheet+xml"/>'
        '<Override PartName="/xl/sharedStrings.xml" '
        'ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.sharedStrings+xml"/>'
        "</Types>"
    )
    rels = (
        XML_DECLARATION
        + f'<Relationships xmlns="{PKG_REL_NS}">'
        f'<Relationship Id="rId1" Type="{OFFICE_DOC_REL}" Target="xl/workbook.xml"/>'
        "</Relationships>"
    )
    return _zip_bytes([
        ("[Content_Types].xml", content_types),
        ("_rels/.rels", rels),
        ("xl/workbook.xml", workbook),
        ("xl/_rels/workbook.xml.rels", workbook_rels),
        ("xl/worksheets/sheet1.xml", sheet),
        ("xl/sharedStrings.xml", shared),
    ])


# pdf

PAGE_WIDTH = 595
PAGE_HEIGHT = 842
TOP_Y = 800
LEFT_X = 50
LINE_HEIGHT = 16
FONT_SIZE = 10
COLUMN_GAP = 20
MIN_COLUMN_WIDTH = 40


def _text_width(text: str) -> int:
    return sum(FONT_SIZE if ord(ch) > 0x7F else 6 for ch in text)


def _column_positions(layout: DocumentLayout) -> list[int]:
    positions = []
    x = LEFT_X
    for col in range(len(layout.header)):
        positions.append(x)
        widest = max(_text_width(row[col]) for row in [layout.header] + layout.rows)
        x += max(widest, MIN_COLUMN_WIDTH) + COLUMN_GAP
    return positions


def _pdf_text(text: str, x: int, y: int) -> str:
    if text.isascii():
        literal = text.replace("\\", "\\\\").replace("(", "\\(").replace(")", "\\)")
        return f"BT /F1 {FONT_SIZE} Tf {x} {y} Td ({literal}) Tj ET"
    return f"BT /F2 {FONT_SIZE} Tf {x} {y} Td <{text.encode('utf-16-be').hex().upper()}> Tj ET"


def write_pdf(layout: DocumentLayout) -> bytes:
    """Single page; IDs in Courier literals, other text as UTF-16BE hex in a Type0 font."""
    ops = []
    y = TOP_Y
    for line in [layout.title] + layout.context:
        ops.append(_pdf_text(line, LEFT_X, y))
        y -= LINE_HEIGHT
    y -= LINE_HEIGHT
    positions = _column_positions(layout)
    for row in [layout.header] + layout.rows:
        for x, cell in zip(positions, row):
            if cell:
                ops.append(_pdf_text(cell, x, y))
        y -= LINE_HEIGHT
    y -= LINE_HEIGHT
    ops.append(_pdf_text(layout.footer, LEFT_X, y))
    content = ("\n".join(ops) + "\n").encode("latin-1")

    objects = [
        b"<< /Type /Catalog /Pages 2 0 R >>",
        b"<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
        (
            f"<< /Type /Page /Parent 2 0 R /MediaBox [0 0 {PAGE_WIDTH} {PAGE_HEIGHT}] "
            "/Resources << /Font << /F1 5 0 R /F2 6 0 R >> >> /Contents 4 0 R >>"
        ).encode("latin-1"),
        f"<< /Length {len(content)} >>\nstream\n".encode("latin-1") + content + b"endstream",
        b"<< /Type /Font /Subtype /Type1 /BaseFont /Courier >>",
        (
            b"<< /Type /Font /Subtype /Type0 /BaseFont /STSong-Light /Encoding /UniGB-UCS2-H "
            b"/DescendantFonts [7 0 R] >>"
        ),
        (
            b"<< /Type /Font /Subtype /CIDFontType0 /BaseFont /STSong-Light "
            b"/CIDSystemInfo << /Registry (Adobe) /Ordering (GB1) /Supplement 2 >> "
            b"/FontDescriptor 8 0 R >>"
        ),
        (
            b"<< /Type /FontDescriptor /FontName /STSong-Light /Flags 6 "
            b"/FontBBox [-25 -254 1000 880] /ItalicAngle 0 /Ascent 880 /Descent -120 "
            b"/CapHeight 880 /StemV 93 >>"
        ),
    ]

    out = bytearray(b"%PDF-1.4\n%\xe2\xe3\xcf\xd3\n")
    offsets = []
    for number, body in enumerate(objects, start=1):
        offsets.append(len(out))
        out += f"{number} 0 obj\n".encode("latin-1") + body + b"\nendobj\n"
    xref_at = len(out)
    out += f"xref\n0 {len(objects) + 1}\n0000000000 65535 f \n".encode("latin-1")
    for offset in offsets:
        out += f"{offset:010d} 00000 n \n".encode("latin-1")
    out += (
        f"trailer\n<< /Size {len(objects) + 1} /Root 1 0 R >>\nstartxref\n{xref_at}\n%%EOF\n"
    ).encode("latin-1")
    return bytes(out)


# transcript

def write_transcript(layout: DocumentLayout) -> bytes:
    """OCR-transcript fixture: the rendered page's text content as JSON."""
    fixture = {
        "title": layout.title,
        "context": layout.context,
        "header": layout.header,
        "rows": layout.rows,
        "footer": layout.footer,
    }
    return (json.dumps(fixture, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


WRITERS: dict[DocumentFormat, Callable[[DocumentLayout], bytes]] = {
    DocumentFormat.MARKDOWN: write_markdown,
    DocumentFormat.DOCX: write_docx,
    DocumentFormat.XLSX: write_xlsx,
    DocumentFormat.PDF: write_pdf,
    DocumentFormat.TRANSCRIPT: write_transcript,
}


def render_bytes(layout: DocumentLayout, fmt: DocumentFormat) -> bytes:
    try:
        writer = WRITERS[fmt]
    except KeyError as e:
        raise UnsupportedFormat(f"cannot render format {fmt.value}") from e
    return writer(layout)
