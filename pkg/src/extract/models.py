"""Outcome and intermediate types of the extraction paradigms."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from src.core.errors import FailureKind, PipelineError
from src.core.identity import PairSet


class Paradigm(str, Enum):
    DIRECT = "direct"
    REPLACE = "replace"
    TABLE = "table"


class ExtractionOutcome(BaseModel):
    """Result of one extraction attempt (or a routed chain of attempts)."""
    pairs: PairSet = PairSet()
    paradigm: Paradigm
    ocr_seconds: float = Field(default=0.0, ge=0.0)
    llm_seconds: float = Field(default=0.0, ge=0.0)
    total_seconds: float = Field(default=0.0, ge=0.0)
    fatal: bool = False
    failure_kind: Optional[FailureKind] = None
    detail: str = ""
    method: str = ""
    attempts: list[str] = Field(default_factory=list)
    completions: int = 0
    output_tokens: int = 0
    dropped_records: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _fatal_is_empty(self) -> "ExtractionOutcome":
        if self.fatal and len(self.pairs) > 0:
            raise ValueError("fatal outcomes carry no pairs")
        if self.fatal and self.failure_kind is None:
            raise ValueError("fatal outcomes carry a failure kind")
        return self


def fatal_outcome(
    paradigm: Paradigm,
    error: PipelineError,
    ocr_seconds: float = 0.0,
    llm_seconds: float = 0.0,
    completions: int = 0,
    output_tokens: int = 0,
) -> ExtractionOutcome:
    return ExtractionOutcome(
        paradigm=paradigm,
        ocr_seconds=ocr_seconds,
        llm_seconds=llm_seconds,
        total_seconds=ocr_seconds + llm_seconds,
        fatal=True,
        failure_kind=error.kind,
        detail=error.message,
        completions=completions,
        output_tokens=output_tokens,
    )


def dropped_detail(dropped: int) -> str:
    return f"dropped {dropped} records with malformed IDs" if dropped else ""


@dataclass(frozen=True)
class PlaceholderEntry:
    token: str
    id_number: str
    char_offset: int


@dataclass
class PlaceholderMap:
    entries: list[PlaceholderEntry] = field(default_factory=list)

    def __post_init__(self):
        tokens = [entry.token for entry in self.entries]
        if len(tokens) != len(set(tokens)):
            raise ValueError("placeholder tokens must be unique")
        offsets = [entry.char_offset for entry in self.entries]
        if any(b <= a for a, b in zip(offsets, offsets[1:])):
            raise ValueError("placeholder offsets must be strictly increasing")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def tokens(self) -> list[str]:
        return [entry.token for entry in self.entries]


@dataclass(frozen=True)
class CellCoordinateSpec:
    name_col: int
    id_col: int
    row_start: int
    row_end: int

    def __post_init__(self):
        if self.name_col == self.id_col:
            raise ValueError("name_col and id_col must differ")
        if self.row_start > self.row_end:
            raise ValueError("row_start must not exceed row_end")
