"""Identity records, ID checksum validation and pair-level accuracy metrics."""

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

ID_WEIGHTS = (7, 9, 10, 5, 8, 4, 2, 1, 6, 3, 7, 9, 10, 5, 8, 4, 2)
# Indexed by (weighted sum mod 11); equals (12 - sum mod 11) mod 11 with 10 -> 'X'.
CHECK_CHARS = "10X98765432"
ID_PATTERN = r"^\d{17}[\dX]$"
ID_SHAPE = re.compile(ID_PATTERN, re.ASCII)
# 18-character candidates inside running text, bounded by non-alphanumerics.
ID_CANDIDATE = re.compile(r"(?<![0-9A-Za-z])\d{17}[\dX](?![0-9A-Za-z])", re.ASCII)


def check_character(body: str) -> str:
    """Return the MOD 11-2 check character for a 17-digit body."""
    total = sum(int(digit) * weight for digit, weight in zip(body, ID_WEIGHTS))
    return CHECK_CHARS[total % 11]


def validate_id(candidate: str) -> bool:
    """True iff candidate is 17 digits followed by its MOD 11-2 check character."""
    if not isinstance(candidate, str) or len(candidate) != 18:
        return False
    body = candidate[:17]
    if not (body.isascii() and body.isdigit()):
        return False
    return candidate[17] == check_character(body)


def expected_check_character(candidate: str) -> Optional[str]:
    """Check character the candidate should end with, or None if the body is unusable."""
    if len(candidate) != 18 or not (candidate[:17].isascii() and candidate[:17].isdigit()):
        return None
    return check_character(candidate[:17])


class IdentityPair(BaseModel):
    """One (name, 18-character ID) record."""
    model_config = ConfigDict(frozen=True)

    name: str
    id_number: str = Field(pattern=ID_PATTERN)

    def key(self) -> Tuple[str, str]:
        return normalize_field(self.name), normalize_field(self.id_number)


class PairSet(BaseModel):
    """Ordered pairs belonging to one document.

    Ground-truth sets are built with ``PairSet.truth`` which rejects repeated
    ID numbers; extraction results may repeat an ID so scoring can see it.
    """
    model_config = ConfigDict(frozen=True)

    pairs: Tuple[IdentityPair, ...] = ()
    source_doc: str = ""

    @classmethod
    def truth(cls, pairs: Iterable[IdentityPair], source_doc: str = "") -> "PairSet":
        return _UniquePairSet(pairs=tuple(pairs), source_doc=source_doc)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def id_numbers(self) -> list[str]:
        return [pair.id_number for pair in self.pairs]

    def has_unique_ids(self) -> bool:
        ids = self.id_numbers()
        return len(ids) == len(set(ids))


class _UniquePairSet(PairSet):

    @model_validator(mode="after")
    def _ids_unique(self) -> "_UniquePairSet":
        if not self.has_unique_ids():
            raise ValueError("ground-truth pair set repeats an id_number")
        return self


@dataclass(frozen=True)
class MatchResult:
    true_positives: int
    extracted_total: int
    truth_total: int

    def __post_init__(self):
        if min(self.true_positives, self.extracted_total, self.truth_total) < 0:
            raise ValueError("counts must be non-negative")
        if self.true_positives > min(self.extracted_total, self.truth_total):
            raise ValueError("true_positives exceeds a set size")


@dataclass(frozen=True)
class AccuracyMetrics:
    precision: float
    recall: float
    f1: float


def normalize_field(value: str) -> str:
    return unicodedata.normalize("NFC", value).strip()


def match_pairs(extracted: PairSet, truth: PairSet) -> MatchResult:
    """Count exact (name, ID) matches; each truth pair is consumed at most once."""
    remaining = Counter(pair.key() for pair in truth.pairs)
    true_positives = 0
    for pair in extracted.pairs:
        key = pair.key()
        if remaining[key] > 0:
            remaining[key] -= 1
            true_positives += 1
    return MatchResult(
        true_positives=true_positives,
        extracted_total=len(extracted.pairs),
        truth_total=len(truth.pairs),
    )


def compute_metrics(m: MatchResult) -> AccuracyMetrics:
    precision = m.true_positives / m.extracted_total if m.extracted_total else 0.0
    recall = m.true_positives / m.truth_total if m.truth_total else 0.0
    if precision + recall == 0:
        f1 = 0.0
    elif precision == recall:
        f1 = precision
    else:
        # The harmonic mean can round past its larger operand.
        f1 = min(2 * precision * recall / (precision + recall), max(precision, recall))
    return AccuracyMetrics(precision=precision, recall=recall, f1=f1)
