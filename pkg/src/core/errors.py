"""Typed failures shared by every pipeline stage."""

from enum import Enum
from typing import Optional


class FailureKind(str, Enum):
    """Machine-readable failure categories carried by fatal outcomes."""
    MALFORMED_INPUT = "MalformedInput"
    UNSUPPORTED_FORMAT = "UnsupportedFormat"
    UNSUPPORTED_PDF_FEATURE = "UnsupportedPdfFeature"
    IO_FAILURE = "IoFailure"
    NOT_RASTERIZABLE = "NotRasterizable"
    OCR_TIMEOUT = "OcrTimeout"
    REMOTE_OCR_FAILURE = "RemoteOcrFailure"
    MALFORMED_RESPONSE = "MalformedResponse"
    TIMEOUT = "Timeout"
    REMOTE_FAILURE = "RemoteFailure"
    OUTPUT_TRUNCATED = "OutputTruncated"
    GATEWAY_FAILURE = "GatewayFailure"
    UNPARSEABLE_OUTPUT = "UnparseableOutput"
    NO_IDS_FOUND = "NoIdsFound"
    ARITY_MISMATCH = "ArityMismatch"
    COORDINATE_UNRESOLVABLE = "CoordinateUnresolvable"
    SPEC_OUT_OF_BOUNDS = "SpecOutOfBounds"
    UNROUTABLE_FORMAT = "UnroutableFormat"
    EXHAUSTED = "Exhausted"
    CORPUS_MISSING = "CorpusMissing"
    CONFIG_INVALID = "ConfigInvalid"
    CELL_MISSING = "CellMissing"


class PipelineError(Exception):
    """Base class for every failure the pipeline reports."""
    kind: FailureKind = FailureKind.MALFORMED_INPUT

    def __init__(self, message: str = ""):
        super().__init__(message or self.kind.value)
        self.message = message or self.kind.value


# Ingest

class MalformedInput(PipelineError):
    kind = FailureKind.MALFORMED_INPUT


class UnsupportedFormat(PipelineError):
    kind = FailureKind.UNSUPPORTED_FORMAT


class UnsupportedPdfFeature(PipelineError):
    kind = FailureKind.UNSUPPORTED_PDF_FEATURE


class IoFailure(PipelineError):
    kind = FailureKind.IO_FAILURE


# OCR

class NotRasterizable(PipelineError):
    kind = FailureKind.NOT_RASTERIZABLE


class OcrTimeout(PipelineError):
    kind = FailureKind.OCR_TIMEOUT


class RemoteOcrFailure(PipelineError):
    kind = FailureKind.REMOTE_OCR_FAILURE


class MalformedResponse(PipelineError):
    kind = FailureKind.MALFORMED_RESPONSE


# Gateway

class GatewayError(PipelineError):
    """Any failure raised by LLMGateway.complete."""
    kind = FailureKind.REMOTE_FAILURE


class CompletionTimeout(GatewayError):
    kind = FailureKind.TIMEOUT


class RemoteFailure(GatewayError):
    kind = FailureKind.REMOTE_FAILURE


class OutputTruncated(GatewayError):
    kind = FailureKind.OUTPUT_TRUNCATED


# Extraction

class ExtractionFailure(PipelineError):
    """A paradigm-level failure; turned into a fatal outcome."""


class GatewayFailure(ExtractionFailure):
    kind = FailureKind.GATEWAY_FAILURE

    def __init__(self, cause: GatewayError):
        super().__init__(f"{cause.kind.value}: {cause.message}")
        self.cause = cause


class UnparseableOutput(ExtractionFailure):
    kind = FailureKind.UNPARSEABLE_OUTPUT


class NoIdsFound(ExtractionFailure):
    kind = FailureKind.NO_IDS_FOUND


class ArityMismatch(ExtractionFailure):
    kind = FailureKind.ARITY_MISMATCH


class CoordinateUnresolvable(ExtractionFailure):
    kind = FailureKind.COORDINATE_UNRESOLVABLE


class SpecOutOfBounds(ExtractionFailure):
    kind = FailureKind.SPEC_OUT_OF_BOUNDS


# Routing and evaluation

class UnroutableFormat(PipelineError):
    kind = FailureKind.UNROUTABLE_FORMAT


class CorpusMissing(PipelineError):
    kind = FailureKind.CORPUS_MISSING


class ConfigInvalid(PipelineError):
    kind = FailureKind.CONFIG_INVALID


class PolicyError(ConfigInvalid):
    """Invalid routing policy file, located to a line when possible."""

    def __init__(self, message: str, source: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if source is not None:
            location = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(f"{location}{message}")
        self.source = source
        self.line = line


class CellMissing(PipelineError):
    kind = FailureKind.CELL_MISSING
