"""Markdown reader: the first pipe table becomes the document's table."""

import re
import time
from typing import Optional

from src.core.errors import MalformedInput
from src.ingest.models import DocumentFormat, StructuredText, TableModel, structured

RE_DELIMITER_CELL = re.compile(r"^:?-+:?$")


def split_pipe_row(line: str) -> list[str]:
    body = line.strip()
    if body.startswith("|"):
        body = body[1:]
    if body.endswith("|") and not body.endswith("\\|"):
        body = body[:-1]
    cells = re.split(r"(?<!\\)\|", body)
    return [cell.strip().replace("\\|", "|") for cell in cells]


def _is_delimiter_row(line: str) -> bool:
    if "|" not in line or "-" not in line:
        return False
    cells = split_pipe_row(line)
    return bool(cells) and all(RE_DELIMITER_CELL.match(cell) for cell in cells)


def _is_table_line(line: str) -> bool:
    return "|" in line and line.strip() != ""


def find_pipe_table(lines: list[str]) -> Optional[TableModel]:
    """First header + delimiter + body block in lines, or None."""
    for index in range(len(lines) - 1):
        if not _is_table_line(lines[index]) or not _is_delimiter_row(lines[index + 1]):
            continue
        header = split_pipe_row(lines[index])
        width = len(header)
        rows = []
        for line in lines[index + 2:]:
            if not _is_table_line(line):
                break
            row = split_pipe_row(line)[:width]
            rows.append(row + [""] * (width - len(row)))
        return TableModel(header=header, rows=rows)
    return None


def parse_markdown(payload: bytes) -> StructuredText:
    """Parse markdown text; fidelity is Preserved when a pipe table parses.

    Raises:
        MalformedInput: Invalid UTF-8 or an empty document.
    """
    started = time.perf_counter()
    try:
        text = payload.decode("utf-8")
    except UnicodeDecodeError as e:
        raise MalformedInput(f"markdown is not valid UTF-8: {e}") from e
    text = text.lstrip("\ufeff")
    if not text.strip():
        raise MalformedInput("markdown document is empty")

    table = find_pipe_table(text.splitlines())
    return structured(text, table, DocumentFormat.MARKDOWN, time.perf_counter() - started)
