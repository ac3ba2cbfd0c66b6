"""Prompt texts for the three extraction tasks.

The reference backend recognizes the task from the system prompt, so these
constants are shared by the paradigms and the backend.
"""

from typing import Sequence

DIRECT_SYSTEM_PROMPT = (
    "You extract identity records from documents. Return every person's name "
    "and 18-character ID number as a JSON array of objects with the keys "
    '"name" and "id", in document order. Copy both fields exactly as written. '
    "Output only the JSON array."
)

REPLACE_SYSTEM_PROMPT = (
    "ID numbers in the document were replaced by placeholders. For each "
    "listed placeholder, give the name of the person the ID belongs to. "
    "Answer with exactly one name per line, in the listed order. Write - "
    "when no name applies. Output nothing else."
)

TABLE_SYSTEM_PROMPT = (
    "You locate identity columns in a table. Given the header row, one sample "
    "data row and the number of data rows, answer with four comma-separated "
    "integers: name column, ID column, first data row, last data row. Indices "
    "are zero-based and the row span is inclusive. Output nothing else."
)

DOCUMENT_OPEN = "<document>"
DOCUMENT_CLOSE = "</document>"
PLACEHOLDERS_PREFIX = "Placeholders: "
HEADER_PREFIX = "Header: "
SAMPLE_PREFIX = "Sample: "
ROWS_PREFIX = "Rows: "

DIRECT_MAX_OUTPUT_TOKENS = 4096
REPLACE_MAX_OUTPUT_TOKENS = 1024
TABLE_MAX_OUTPUT_TOKENS = 64


def _wrap_document(text: str) -> str:
    return f"{DOCUMENT_OPEN}\n{text}\n{DOCUMENT_CLOSE}"


def render_row(cells: Sequence[str]) -> str:
    return "| " + " | ".join(cells) + " |"


def parse_row(line: str) -> list[str]:
    body = line.strip()
    if body.startswith("|"):
        body = body[1:]
    if body.endswith("|"):
        body = body[:-1]
    return [cell.strip() for cell in body.split("|")]


def direct_prompt(text: str) -> str:
    return "Extract all name and ID number pairs.\n" + _wrap_document(text)


def replace_prompt(masked_text: str, placeholders: Sequence[str]) -> str:
    return (
        f"{PLACEHOLDERS_PREFIX}{', '.join(placeholders)}\n"
        + _wrap_document(masked_text)
    )


def table_prompt(header: Sequence[str], sample: Sequence[str], n_rows: int) -> str:
    return (
        f"{HEADER_PREFIX}{render_row(header)}\n"
        f"{SAMPLE_PREFIX}{render_row(sample)}\n"
        f"{ROWS_PREFIX}{n_rows}"
    )


def document_payload(user_prompt: str) -> str:
    """Text between the document markers, or the whole prompt when unmarked."""
    start = user_prompt.find(DOCUMENT_OPEN)
    end = user_prompt.rfind(DOCUMENT_CLOSE)
    if start == -1 or end == -1 or end < start:
        return user_prompt
    return user_prompt[start + len(DOCUMENT_OPEN) + 1:end].removesuffix("\n")
