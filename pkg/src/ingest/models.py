"""Data model shared by parsers, OCR lanes and extraction paradigms."""

from dataclasses import dataclass
from enum import Enum
from typing import Optional


class DocumentFormat(str, Enum):
    MARKDOWN = "markdown"
    DOCX = "docx"
    XLSX = "xlsx"
    PDF = "pdf"
    TRANSCRIPT = "transcript"
    UNKNOWN = "unknown"


FILE_EXTENSIONS = {
    DocumentFormat.MARKDOWN: "md",
    DocumentFormat.DOCX: "docx",
    DocumentFormat.XLSX: "xlsx",
    DocumentFormat.PDF: "pdf",
    DocumentFormat.TRANSCRIPT: "json",
}


class Fidelity(str, Enum):
    """How much row/column structure survived text extraction."""
    PRESERVED = "Preserved"
    SYMBOLIC_ONLY = "SymbolicOnly"
    LOST = "Lost"


@dataclass
class TableModel:
    header: list[str]
    rows: list[list[str]]

    def __post_init__(self):
        width = len(self.header)
        for index, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {index} has {len(row)} cells, header has {width}")

    @property
    def n_cols(self) -> int:
        return len(self.header)

    def is_degenerate(self) -> bool:
        return self.n_cols < 2 or not self.rows

    @classmethod
    def from_grid(cls, grid: list[list[str]]) -> Optional["TableModel"]:
        """Build a table from a header-first grid, padding short rows.

        Returns None when the grid cannot hold a usable table.
        """
        if not grid:
            return None
        width = max(len(row) for row in grid)
        padded = [list(row) + [""] * (width - len(row)) for row in grid]
        table = cls(header=padded[0], rows=padded[1:])
        return None if table.is_degenerate() else table


@dataclass
class StructuredText:
    plain_text: str
    table: Optional[TableModel]
    fidelity: Fidelity
    source_format: DocumentFormat
    extract_time: float = 0.0

    def __post_init__(self):
        if self.fidelity is Fidelity.PRESERVED and (self.table is None or self.table.is_degenerate()):
            raise ValueError("Preserved fidelity requires a non-degenerate table")
        if self.extract_time < 0:
            raise ValueError("extract_time must be >= 0")


def structured(
    plain_text: str,
    table: Optional[TableModel],
    source_format: DocumentFormat,
    extract_time: float = 0.0,
) -> StructuredText:
    """StructuredText whose fidelity follows from whether a usable table exists."""
    if table is not None and table.is_degenerate():
        table = None
    fidelity = Fidelity.PRESERVED if table is not None else Fidelity.SYMBOLIC_ONLY
    return StructuredText(
        plain_text=plain_text,
        table=table,
        fidelity=fidelity,
        source_format=source_format,
        extract_time=extract_time,
    )
