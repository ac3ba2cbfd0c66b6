"""Method x format evaluation matrix.

Every supported (method, format, document) triple is executed, scored
against the manifest truth and folded into per-cell aggregates. Documents
fan out over a bounded pool; aggregation folds outcomes sorted by doc_id,
so the report does not depend on completion order.
"""

import asyncio
import hashlib
import json
import math
import statistics
from collections import defaultdict
from typing import Any, Optional

from pydantic import BaseModel, Field, model_validator

from src.core.config import ClockMode
from src.core.errors import CellMissing, ConfigInvalid, FailureKind, PipelineError
from src.core.identity import compute_metrics, match_pairs
from src.core.llm_client import LLMGateway
from src.core.logger import get_logger, log_outcome
from src.docgen.models import DocumentRecord
from src.extract.models import ExtractionOutcome, fatal_outcome
from src.ingest.models import DocumentFormat
from src.router.backends import BackendRegistry, IngestBackend
from src.router.policy import MethodConfig
from src.router.router import run_paradigm

logger = get_logger(__name__)

MULTIMODAL_METHOD = "multimodal_reference"
REFERENCE_NOTE = "reference constants"


class DocumentScore(BaseModel):
    """Per-document record kept next to the aggregates."""
    doc_id: str
    method: str
    format: DocumentFormat
    precision: float
    recall: float
    f1: float
    fatal: bool
    failure_kind: Optional[FailureKind] = None
    ocr_s: float
    llm_s: float
    total_s: float
    dropped_records: int = 0


class CellReport(BaseModel):
    method: str
    format: DocumentFormat
    precision: float = Field(ge=0.0, le=1.0)
    recall: float = Field(ge=0.0, le=1.0)
    f1: float = Field(ge=0.0, le=1.0)
    # Population standard deviation of per-document F1.
    f1_std: float = Field(ge=0.0)
    success_rate: float = Field(ge=0.0, le=1.0)
    perfect_rate: float = Field(ge=0.0, le=1.0)
    ocr_s: float = Field(ge=0.0)
    llm_s: float = Field(ge=0.0)
    total_s: float = Field(ge=0.0)
    n_docs: int = Field(default=0, ge=0)
    reference: bool = False

    @model_validator(mode="after")
    def _perfect_within_success(self) -> "CellReport":
        if self.perfect_rate > self.success_rate:
            raise ValueError("perfect_rate cannot exceed success_rate")
        return self


MULTIMODAL_REFERENCE = CellReport(
    method=MULTIMODAL_METHOD,
    format=DocumentFormat.TRANSCRIPT,
    precision=0.999,
    recall=0.999,
    f1=0.999,
    f1_std=0.007,
    success_rate=1.0,
    perfect_rate=0.97,
    ocr_s=0.0,
    llm_s=33.9,
    total_s=33.9,
    reference=True,
)


class MatrixReport(BaseModel):
    cells: list[CellReport]
    methods: list[str]
    formats: list[DocumentFormat]
    corpus_digest: str = Field(min_length=1)
    config_digest: str = Field(min_length=1)
    clock_mode: ClockMode
    documents: list[DocumentScore] = Field(default_factory=list)

    @model_validator(mode="after")
    def _unique_cells(self) -> "MatrixReport":
        keys = [(cell.method, cell.format) for cell in self.cells]
        if len(keys) != len(set(keys)):
            raise ValueError("duplicate (method, format) cell")
        return self

    def cell(self, method: str, fmt: DocumentFormat) -> Optional[CellReport]:
        return next((c for c in self.cells if c.method == method and c.format is fmt), None)


def digest_config(payload: dict[str, Any]) -> str:
    text = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def score_outcome(record: DocumentRecord, method: MethodConfig, outcome: ExtractionOutcome) -> DocumentScore:
    if outcome.fatal:
        precision = recall = f1 = 0.0
    else:
        metrics = compute_metrics(match_pairs(outcome.pairs, record.truth))
        precision, recall, f1 = metrics.precision, metrics.recall, metrics.f1
    return DocumentScore(
        doc_id=record.doc_id,
        method=method.name,
        format=record.format,
        precision=precision,
        recall=recall,
        f1=f1,
        fatal=outcome.fatal,
        failure_kind=outcome.failure_kind,
        ocr_s=outcome.ocr_seconds,
        llm_s=outcome.llm_seconds,
        total_s=outcome.total_seconds,
        dropped_records=outcome.dropped_records,
    )


def aggregate_cell(method: str, fmt: DocumentFormat, scores: list[DocumentScore]) -> CellReport:
    """Means over documents; fatal documents count as F1 0 and as failures."""
    scores = sorted(scores, key=lambda s: s.doc_id)
    n = len(scores)
    if n == 0:
        raise ValueError(f"no documents for {method} on {fmt.value}")

    def mean(values: list[float]) -> float:
        return math.fsum(values) / n

    f1s = [s.f1 for s in scores]
    return CellReport(
        method=method,
        format=fmt,
        precision=mean([s.precision for s in scores]),
        recall=mean([s.recall for s in scores]),
        f1=mean(f1s),
        f1_std=statistics.pstdev(f1s),
        success_rate=sum(1 for s in scores if not s.fatal) / n,
        perfect_rate=sum(1 for s in scores if not s.fatal and s.f1 == 1.0) / n,
        ocr_s=mean([s.ocr_s for s in scores]),
        llm_s=mean([s.llm_s for s in scores]),
        total_s=mean([s.total_s for s in scores]),
        n_docs=n,
    )


async def _run_backend(
    record: DocumentRecord,
    backend: IngestBackend,
    methods: list[MethodConfig],
    registry: BackendRegistry,
    gateway: LLMGateway,
) -> list[DocumentScore]:
    """Ingest once, then run every paradigm planned for this backend."""
    st = None
    ingest_error: Optional[PipelineError] = None
    try:
        st = await registry.ingest(record, backend)
    except PipelineError as e:
        ingest_error = e
    scores = []
    for method in methods:
        if st is None:
            outcome = fatal_outcome(method.paradigm, ingest_error)
        else:
            outcome = await run_paradigm(method.paradigm, st, gateway)
        log_outcome(logger, record.doc_id, method.name, outcome.fatal, outcome.detail or f"{len(outcome.pairs)} pairs")
        scores.append(score_outcome(record, method, outcome))
    return scores


async def run_matrix(
    records: list[DocumentRecord],
    methods: list[MethodConfig],
    registry: BackendRegistry,
    gateway: LLMGateway,
    clock_mode: ClockMode,
    corpus_digest: str,
    config_digest: str,
    workers: int = 4,
) -> MatrixReport:
    """Execute every supported triple and aggregate per cell.

    Unsupported (method, format) combinations get no cell at all.

    Raises:
        ConfigInvalid: A method supports none of the corpus formats.
    """
    formats = sorted({record.format for record in records}, key=lambda f: list(DocumentFormat).index(f))
    for method in methods:
        if not any(method.supports(fmt) for fmt in formats):
            raise ConfigInvalid(f"method {method.name} supports none of the corpus formats")

    by_backend: dict[IngestBackend, list[MethodConfig]] = defaultdict(list)
    for method in methods:
        by_backend[method.ingest_backend].append(method)

    slots = asyncio.Semaphore(workers)

    async def job(record: DocumentRecord, backend: IngestBackend) -> list[DocumentScore]:
        async with slots:
            return await _run_backend(record, backend, by_backend[backend], registry, gateway)

    jobs = [
        job(record, backend)
        for record in records
        for backend in by_backend
        if by_backend[backend][0].supports(record.format)
    ]
    logger.info(f"Running matrix: {len(records)} documents, {len(methods)} methods, {len(jobs)} ingest jobs")
    results = await asyncio.gather(*jobs)

    grouped: dict[tuple[str, DocumentFormat], list[DocumentScore]] = defaultdict(list)
    for scores in results:
        for score in scores:
            grouped[(score.method, score.format)].append(score)

    cells = [
        aggregate_cell(method.name, fmt, grouped[(method.name, fmt)])
        for method in methods
        for fmt in formats
        if grouped.get((method.name, fmt))
    ]
    cells.append(MULTIMODAL_REFERENCE)
    documents = sorted(
        (score for scores in grouped.values() for score in scores),
        key=lambda s: (s.method, s.format.value, s.doc_id),
    )
    return MatrixReport(
        cells=cells,
        methods=[method.name for method in methods],
        formats=formats,
        corpus_digest=corpus_digest,
        config_digest=config_digest,
        clock_mode=clock_mode,
        documents=documents,
    )


def compare_speedup(report: MatrixReport, fast: str, slow: str, fmt: DocumentFormat) -> float:
    """slow.total_s / fast.total_s for one format.

    The multimodal reference cell is looked up under the transcript format
    regardless of fmt.

    Raises:
        CellMissing: Either cell is absent, has no successful documents, or
            the fast cell took no time.
    """
    def lookup(method: str) -> CellReport:
        cell_format = DocumentFormat.TRANSCRIPT if method == MULTIMODAL_METHOD else fmt
        cell = report.cell(method, cell_format)
        if cell is None:
            raise CellMissing(f"no cell for {method} on {cell_format.value}")
        if cell.success_rate == 0.0:
            raise CellMissing(f"cell {method} on {cell_format.value} has no successful documents")
        return cell

    fast_cell, slow_cell = lookup(fast), lookup(slow)
    if fast_cell.total_s == 0.0:
        raise CellMissing(f"cell {fast} on {fmt.value} has zero total time")
    return slow_cell.total_s / fast_cell.total_s


def best_methods(report: MatrixReport) -> dict[DocumentFormat, CellReport]:
    """Highest mean F1 per format, ties broken by lower mean total time."""
    best: dict[DocumentFormat, CellReport] = {}
    for cell in report.cells:
        if cell.reference:
            continue
        current = best.get(cell.format)
        if current is None or (-cell.f1, cell.total_s, cell.method) < (-current.f1, current.total_s, current.method):
            best[cell.format] = cell
    return best

