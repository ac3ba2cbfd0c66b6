"""Markup-tag lane: tables re-emitted as HTML-style tags, structure dropped.

Stands in for parsers whose table output is tag markup rather than a grid the
table paradigm can address.
"""

from html import escape

from src.core.errors import UnsupportedFormat
from src.ingest.layout import RUN_SEPARATOR
from src.ingest.models import DocumentFormat, Fidelity, StructuredText, TableModel


def _row_markup(cells: list[str], tag: str) -> str:
    return "<tr>" + "".join(f"<{tag}>{escape(cell)}</{tag}>" for cell in cells) + "</tr>"


def table_markup(table: TableModel) -> str:
    lines = ["<table>", _row_markup(table.header, "td")]
    lines.extend(_row_markup(row, "td") for row in table.rows)
    lines.append("</table>")
    return "\n".join(lines)


def wrap_table_tags(st: StructuredText) -> StructuredText:
    """Replace the parsed table with tag markup; the result has no TableModel.

    Raises:
        UnsupportedFormat: The input is not a PDF parse.
    """
    if st.source_format is not DocumentFormat.PDF:
        raise UnsupportedFormat(f"tag wrapping applies to pdf, not {st.source_format.value}")
    if st.table is None:
        return StructuredText(
            plain_text=st.plain_text,
            table=None,
            fidelity=Fidelity.SYMBOLIC_ONLY,
            source_format=st.source_format,
            extract_time=st.extract_time,
        )

    lines = st.plain_text.split("\n")
    header_line = RUN_SEPARATOR.join(st.table.header)
    prefix = lines[:lines.index(header_line)] if header_line in lines else []
    text = "\n".join(prefix + [table_markup(st.table)])
    return StructuredText(
        plain_text=text,
        table=None,
        fidelity=Fidelity.SYMBOLIC_ONLY,
        source_format=st.source_format,
        extract_time=st.extract_time,
    )
