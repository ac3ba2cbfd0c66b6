"""Document-aware routing: detect the format, run the policy's methods in
order until one produces a non-fatal outcome."""

from typing import Awaitable, Callable

from src.core.errors import FailureKind, MalformedInput, PipelineError, UnroutableFormat
from src.core.llm_client import LLMGateway
from src.core.logger import get_logger, log_outcome
from src.docgen.models import DocumentRef
from src.extract.direct import extract_direct
from src.extract.models import ExtractionOutcome, Paradigm, fatal_outcome
from src.extract.replace import extract_replace
from src.extract.table import extract_table
from src.ingest.detect import detect_format, read_payload
from src.ingest.models import DocumentFormat, StructuredText
from src.router.backends import BackendRegistry
from src.router.policy import MethodConfig, RoutingPolicy

logger = get_logger(__name__)

ParadigmFn = Callable[[StructuredText, LLMGateway], Awaitable[ExtractionOutcome]]

PARADIGMS: dict[Paradigm, ParadigmFn] = {
    Paradigm.DIRECT: extract_direct,
    Paradigm.REPLACE: extract_replace,
    Paradigm.TABLE: extract_table,
}


async def run_paradigm(paradigm: Paradigm, st: StructuredText, gateway: LLMGateway) -> ExtractionOutcome:
    """Run one paradigm; precondition failures become fatal outcomes."""
    try:
        return await PARADIGMS[paradigm](st, gateway)
    except MalformedInput as e:
        return fatal_outcome(paradigm, e, ocr_seconds=st.extract_time)


def _labelled(outcome: ExtractionOutcome, doc_id: str, method: MethodConfig) -> ExtractionOutcome:
    return outcome.model_copy(update={
        "pairs": outcome.pairs.model_copy(update={"source_doc": doc_id}),
        "method": method.name,
        "attempts": [method.name],
    })


async def execute_method(
    doc: DocumentRef,
    method: MethodConfig,
    registry: BackendRegistry,
    gateway: LLMGateway,
) -> ExtractionOutcome:
    """Ingest with the method's backend and extract with its paradigm.

    Every pipeline failure becomes a fatal outcome.
    """
    try:
        st = await registry.ingest(doc, method.ingest_backend)
    except PipelineError as e:
        outcome = _labelled(fatal_outcome(method.paradigm, e), doc.doc_id, method)
    else:
        outcome = _labelled(await run_paradigm(method.paradigm, st, gateway), doc.doc_id, method)
    log_outcome(logger, doc.doc_id, method.name, outcome.fatal, outcome.detail or f"{len(outcome.pairs)} pairs")
    return outcome


def resolve_document(doc: DocumentRef) -> DocumentRef:
    """The document with its format detected from the payload.

    Raises:
        UnroutableFormat: Nothing identifies the format.
        IoFailure: The payload cannot be read.
    """
    fmt = detect_format(doc.payload_path, read_payload(doc.payload_path))
    if fmt is DocumentFormat.UNKNOWN:
        raise UnroutableFormat(f"cannot detect the format of {doc.payload_path}")
    if fmt is not doc.format:
        logger.debug(f"{doc.doc_id}: detected {fmt.value}, recorded {doc.format.value}")
    return doc.model_copy(update={"format": fmt})


async def route_and_extract(
    doc: DocumentRef,
    policy: RoutingPolicy,
    registry: BackendRegistry,
    gateway: LLMGateway,
) -> ExtractionOutcome:
    """Run the policy's chain for the document's format.

    The returned outcome carries the successful method, every attempted
    method in order and the time of all attempts combined. When every
    attempt is fatal the outcome is fatal with kind Exhausted.

    Raises:
        UnroutableFormat: Unknown format or no route in the policy.
    """
    doc = resolve_document(doc)
    chain = policy.chain(doc.format)

    attempts: list[str] = []
    failures: list[str] = []
    ocr_seconds = llm_seconds = total_seconds = 0.0
    completions = output_tokens = 0
    outcome = None
    for method in chain:
        outcome = await execute_method(doc, method, registry, gateway)
        attempts.append(method.name)
        ocr_seconds += outcome.ocr_seconds
        llm_seconds += outcome.llm_seconds
        total_seconds += outcome.total_seconds
        completions += outcome.completions
        output_tokens += outcome.output_tokens
        if not outcome.fatal:
            break
        failures.append(f"{method.name}: {outcome.failure_kind.value}")
        logger.info(f"{doc.doc_id}: {method.name} failed ({outcome.detail}), trying next method")

    cumulative = {
        "ocr_seconds": ocr_seconds,
        "llm_seconds": llm_seconds,
        "total_seconds": total_seconds,
        "completions": completions,
        "output_tokens": output_tokens,
        "attempts": attempts,
    }
    if not outcome.fatal:
        return outcome.model_copy(update=cumulative)

    logger.warning(f"{doc.doc_id}: all {len(chain)} methods failed")
    return outcome.model_copy(update={
        **cumulative,
        "failure_kind": FailureKind.EXHAUSTED,
        "detail": "; ".join(failures),
        "method": "",
    })
