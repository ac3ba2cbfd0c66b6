"""Native parser dispatch by format."""

from typing import Callable

from src.core.errors import UnsupportedFormat
from src.ingest.markdown import parse_markdown
from src.ingest.models import DocumentFormat, StructuredText
from src.ingest.office import parse_docx, parse_xlsx
from src.ingest.pdf import parse_pdf

NATIVE_PARSERS: dict[DocumentFormat, Callable[[bytes], StructuredText]] = {
    DocumentFormat.MARKDOWN: parse_markdown,
    DocumentFormat.DOCX: parse_docx,
    DocumentFormat.XLSX: parse_xlsx,
    DocumentFormat.PDF: parse_pdf,
}


def parse_native(fmt: DocumentFormat, payload: bytes) -> StructuredText:
    try:
        parser = NATIVE_PARSERS[fmt]
    except KeyError as e:
        raise UnsupportedFormat(f"no native parser for {fmt.value}") from e
    return parser(payload)
