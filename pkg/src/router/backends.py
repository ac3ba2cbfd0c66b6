"""Ingest backends: every way a document becomes StructuredText.

Each backend supports a fixed set of formats. The registry charges the
time a backend costs under the active clock: fixed nominal seconds under
the virtual clock, measured seconds under the wall clock.
"""

import asyncio
import dataclasses
import time
from enum import Enum
from typing import Optional

import httpx

from src.core.config import AppConfig, ClockMode
from src.core.errors import UnsupportedFormat
from src.core.logger import get_logger
from src.docgen.models import DocumentRef
from src.ingest.detect import read_payload
from src.ingest.models import DocumentFormat, StructuredText
from src.ingest.parsers import parse_native
from src.ingest.tagging import wrap_table_tags
from src.ocr.remote import RemoteOcrClient
from src.ocr.simulate import OcrMode, OcrProfile, transcribe

logger = get_logger(__name__)


class IngestBackend(str, Enum):
    NATIVE_MARKDOWN = "native_markdown"
    NATIVE_DOCX = "native_docx"
    NATIVE_XLSX = "native_xlsx"
    NATIVE_PDF = "native_pdf"
    OCR_PRESERVING = "ocr_preserving"
    OCR_DESTROYING = "ocr_destroying"
    TAG_WRAPPING_FIXTURE = "tag_wrapping_fixture"
    REMOTE_OCR = "remote_ocr"


SUPPORT_MATRIX: dict[IngestBackend, frozenset[DocumentFormat]] = {
    IngestBackend.NATIVE_MARKDOWN: frozenset({DocumentFormat.MARKDOWN}),
    IngestBackend.NATIVE_DOCX: frozenset({DocumentFormat.DOCX}),
    IngestBackend.NATIVE_XLSX: frozenset({DocumentFormat.XLSX}),
    IngestBackend.NATIVE_PDF: frozenset({DocumentFormat.PDF}),
    IngestBackend.OCR_PRESERVING: frozenset({DocumentFormat.TRANSCRIPT}),
    IngestBackend.OCR_DESTROYING: frozenset({DocumentFormat.TRANSCRIPT}),
    IngestBackend.TAG_WRAPPING_FIXTURE: frozenset({DocumentFormat.PDF}),
    IngestBackend.REMOTE_OCR: frozenset({DocumentFormat.TRANSCRIPT}),
}

NATIVE_BACKENDS = {
    IngestBackend.NATIVE_MARKDOWN: DocumentFormat.MARKDOWN,
    IngestBackend.NATIVE_DOCX: DocumentFormat.DOCX,
    IngestBackend.NATIVE_XLSX: DocumentFormat.XLSX,
    IngestBackend.NATIVE_PDF: DocumentFormat.PDF,
}


def supports(backend: IngestBackend, fmt: DocumentFormat) -> bool:
    return fmt in SUPPORT_MATRIX[backend]


class BackendRegistry:
    """Runs ingest backends and charges their time."""

    def __init__(
        self,
        preserving: OcrProfile,
        destroying: OcrProfile,
        ingest_costs: Optional[dict[str, float]] = None,
        clock_mode: ClockMode = ClockMode.VIRTUAL,
        remote_ocr: Optional[RemoteOcrClient] = None,
    ):
        self.profiles = {
            IngestBackend.OCR_PRESERVING: preserving,
            IngestBackend.OCR_DESTROYING: destroying,
        }
        self.ingest_costs = dict(ingest_costs or {})
        self.clock_mode = clock_mode
        self.remote_ocr = remote_ocr

    @classmethod
    def from_config(cls, config: AppConfig, client: Optional[httpx.AsyncClient] = None) -> "BackendRegistry":
        ocr = config.ocr

        def profile(mode: OcrMode, settings) -> OcrProfile:
            return OcrProfile(
                mode=mode,
                char_noise_rate=settings.char_noise_rate,
                noise_seed=config.noise_seed,
                simulated_ocr_seconds=settings.simulated_ocr_seconds,
                shuffle_window=ocr.shuffle_window,
            )

        remote = None
        if ocr.remote_endpoint:
            remote = RemoteOcrClient(ocr.remote_endpoint, timeout=ocr.remote_timeout, client=client)
        return cls(
            preserving=profile(OcrMode.LAYOUT_PRESERVING, ocr.preserving),
            destroying=profile(OcrMode.LAYOUT_DESTROYING, ocr.destroying),
            ingest_costs=config.ingest_costs,
            clock_mode=config.clock,
            remote_ocr=remote,
        )

    @property
    def remote_ocr_configured(self) -> bool:
        return self.remote_ocr is not None

    async def close(self):
        if self.remote_ocr is not None:
            await self.remote_ocr.close()

    def _charge(self, backend: IngestBackend, st: StructuredText, measured: float) -> StructuredText:
        if backend in self.profiles:
            # OCR lanes are always charged their profile time.
            return st
        if self.clock_mode is ClockMode.VIRTUAL:
            seconds = self.ingest_costs.get(backend.value, 0.0)
        else:
            seconds = measured
        return dataclasses.replace(st, extract_time=seconds)

    async def ingest(self, doc: DocumentRef, backend: IngestBackend) -> StructuredText:
        """Turn a document into StructuredText with the given backend.

        Raises:
            UnsupportedFormat: The backend does not handle doc.format, or
                remote OCR is not configured.
            PipelineError: Whatever the backend itself raises.
        """
        if not supports(backend, doc.format):
            raise UnsupportedFormat(f"{backend.value} does not support {doc.format.value}")

        started = time.perf_counter()
        if backend in NATIVE_BACKENDS:
            payload = read_payload(doc.payload_path)
            st = await asyncio.to_thread(parse_native, NATIVE_BACKENDS[backend], payload)
        elif backend is IngestBackend.TAG_WRAPPING_FIXTURE:
            payload = read_payload(doc.payload_path)
            st = wrap_table_tags(await asyncio.to_thread(parse_native, DocumentFormat.PDF, payload))
        elif backend in self.profiles:
            st = await asyncio.to_thread(transcribe, doc, self.profiles[backend])
        else:
            if self.remote_ocr is None:
                raise UnsupportedFormat("remote OCR endpoint is not configured")
            st = await self.remote_ocr.remote_ocr(read_payload(doc.payload_path), doc.format)
        measured = time.perf_counter() - started

        logger.debug(f"Ingested {doc.doc_id} via {backend.value}: fidelity={st.fidelity.value}")
        return self._charge(backend, st, measured)
