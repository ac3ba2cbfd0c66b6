"""Simulated OCR lanes.

Two transcript modes model engines that keep or lose the page's spatial
layout. Both apply seeded confusable-glyph noise.
"""

import json
import random
import re
import unicodedata
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from src.core.errors import IoFailure, MalformedInput, NotRasterizable, PipelineError
from src.core.lexicon import CONFUSABLES
from src.docgen.models import DocumentRef
from src.ingest.detect import read_payload
from src.ingest.models import DocumentFormat, Fidelity, StructuredText, TableModel
from src.ingest.parsers import NATIVE_PARSERS

COLUMN_SEPARATOR = "    "
RE_COLUMN_GAP = re.compile(r"\s{2,}")


class OcrMode(str, Enum):
    LAYOUT_PRESERVING = "LayoutPreserving"
    LAYOUT_DESTROYING = "LayoutDestroying"


class OcrProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: OcrMode
    char_noise_rate: float = Field(ge=0.0, le=1.0)
    noise_seed: int = 0
    simulated_ocr_seconds: float = Field(default=0.0, ge=0.0)
    shuffle_window: float = Field(default=3.0, ge=0.0)


@dataclass
class Transcript:
    lines: list[str]
    provenance: OcrProfile


@dataclass
class PageContent:
    """Text content of a rendered page, in reading order."""
    title: str
    context: list[str]
    header: list[str]
    rows: list[list[str]]
    footer: str


def load_transcript_fixture(payload: bytes) -> PageContent:
    try:
        data = json.loads(payload.decode("utf-8"))
        return PageContent(
            title=str(data.get("title", "")),
            context=[str(line) for line in data.get("context", [])],
            header=[str(cell) for cell in data["header"]],
            rows=[[str(cell) for cell in row] for row in data["rows"]],
            footer=str(data.get("footer", "")),
        )
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, AttributeError) as e:
        raise MalformedInput(f"unreadable transcript fixture: {e}") from e


def source_page(doc: DocumentRef) -> PageContent:
    """Page content of a document with a tabular rendering.

    Raises:
        NotRasterizable: The document has no table to lay out.
        IoFailure: The payload cannot be read.
    """
    payload = read_payload(doc.payload_path)
    if doc.format is DocumentFormat.TRANSCRIPT:
        return load_transcript_fixture(payload)

    parser = NATIVE_PARSERS.get(doc.format)
    if parser is None:
        raise NotRasterizable(f"{doc.doc_id}: no rendering for format {doc.format.value}")
    try:
        st = parser(payload)
    except IoFailure:
        raise
    except PipelineError as e:
        raise NotRasterizable(f"{doc.doc_id}: {e.message}") from e
    if st.table is None:
        raise NotRasterizable(f"{doc.doc_id}: document has no table")
    return PageContent(title="", context=[], header=st.table.header, rows=st.table.rows, footer="")


def apply_noise(text: str, rate: float, rng: random.Random) -> str:
    """Substitute confusable glyphs, each eligible character with probability rate."""
    if rate <= 0:
        return text
    out = []
    for char in text:
        options = CONFUSABLES.get(char)
        if options and rng.random() < rate:
            out.append(rng.choice(options))
        else:
            out.append(char)
    return "".join(out)


def noisy_page(page: PageContent, profile: OcrProfile, doc_id: str) -> PageContent:
    rng = random.Random(f"{profile.noise_seed}:{doc_id}")

    def noise(text: str) -> str:
        return apply_noise(text, profile.char_noise_rate, rng)

    return PageContent(
        title=noise(page.title),
        context=[noise(line) for line in page.context],
        header=[noise(cell) for cell in page.header],
        rows=[[noise(cell) for cell in row] for row in page.rows],
        footer=noise(page.footer),
    )


def display_width(text: str) -> int:
    return sum(2 if unicodedata.east_asian_width(ch) in ("W", "F") else 1 for ch in text)


def _pad(text: str, width: int) -> str:
    return text + " " * (width - display_width(text))


def _prose_lines(page: PageContent) -> list[str]:
    return [line for line in [page.title, *page.context] if line]


def _preserving_lines(page: PageContent) -> list[str]:
    grid = [page.header] + page.rows
    widths = [max(display_width(row[col]) for row in grid) for col in range(len(page.header))]
    lines = _prose_lines(page)
    for row in grid:
        lines.append(COLUMN_SEPARATOR.join(_pad(cell, w) for cell, w in zip(row, widths)).rstrip())
    if page.footer:
        lines.append(page.footer)
    return lines


def _destroying_lines(page: PageContent, profile: OcrProfile, doc_id: str) -> list[str]:
    rng = random.Random(f"{profile.noise_seed}:{doc_id}:order")
    fragments = [cell for row in [page.header] + page.rows for cell in row if cell]
    keyed = [(index + rng.uniform(0.0, profile.shuffle_window), index, cell) for index, cell in enumerate(fragments)]
    lines = _prose_lines(page)
    lines.extend(cell for _, _, cell in sorted(keyed))
    if page.footer:
        lines.append(page.footer)
    return lines


def render_transcript(page: PageContent, profile: OcrProfile, doc_id: str) -> Transcript:
    noisy = noisy_page(page, profile, doc_id)
    if profile.mode is OcrMode.LAYOUT_PRESERVING:
        lines = _preserving_lines(noisy)
    else:
        lines = _destroying_lines(noisy, profile, doc_id)
    return Transcript(lines=lines, provenance=profile)


def table_from_aligned_lines(lines: list[str]) -> Optional[TableModel]:
    """Header is the first line with two or more whitespace-separated columns;
    the table continues while lines keep the same column count."""
    split = [RE_COLUMN_GAP.split(line.strip()) if line.strip() else [] for line in lines]
    for index, cells in enumerate(split):
        if len(cells) < 2:
            continue
        rows = []
        for following in split[index + 1:]:
            if len(following) != len(cells):
                break
            rows.append(following)
        return TableModel.from_grid([cells] + rows)
    return None


def transcribe(doc: DocumentRef, profile: OcrProfile) -> StructuredText:
    """Simulated OCR of a document's rendered page.

    Raises:
        NotRasterizable: The document has no tabular rendering.
    """
    transcript = render_transcript(source_page(doc), profile, doc.doc_id)
    text = "\n".join(transcript.lines)
    if profile.mode is OcrMode.LAYOUT_PRESERVING:
        table = table_from_aligned_lines(transcript.lines)
        fidelity = Fidelity.PRESERVED if table is not None else Fidelity.SYMBOLIC_ONLY
    else:
        table = None
        fidelity = Fidelity.LOST
    return StructuredText(
        plain_text=text,
        table=table,
        fidelity=fidelity,
        source_format=doc.format,
        extract_time=profile.simulated_ocr_seconds,
    )
