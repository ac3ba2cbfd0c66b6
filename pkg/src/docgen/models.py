"""Corpus records and the manifest contract between generation and evaluation."""

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

from src.core.config import CorpusSettings
from src.core.identity import IdentityPair, PairSet
from src.ingest.models import DocumentFormat

MANIFEST_NAME = "manifest.json"


class CorpusSpec(CorpusSettings):
    """Generation parameters with the seed resolved."""
    seed: int = 0


class DocumentRef(BaseModel):
    """A payload on disk and the format it was generated as."""
    model_config = ConfigDict(frozen=True)

    doc_id: str
    format: DocumentFormat
    payload_path: Path


class DocumentRecord(DocumentRef):
    """A generated document with its ground truth."""
    truth: PairSet
    template_id: str = ""
    seed: int = 0
    context_fields: dict[str, str] = Field(default_factory=dict)


class ManifestEntry(BaseModel):
    """One manifest line; paths are relative to the corpus directory."""
    doc_id: str
    format: DocumentFormat
    path: str
    truth: list[IdentityPair]
    template_id: str
    seed: int
    context_fields: dict[str, str] = Field(default_factory=dict)

    @classmethod
    def from_record(cls, record: DocumentRecord, corpus_dir: Path) -> "ManifestEntry":
        return cls(
            doc_id=record.doc_id,
            format=record.format,
            path=record.payload_path.relative_to(corpus_dir).as_posix(),
            truth=list(record.truth.pairs),
            template_id=record.template_id,
            seed=record.seed,
            context_fields=record.context_fields,
        )

    def to_record(self, corpus_dir: Path) -> DocumentRecord:
        return DocumentRecord(
            doc_id=self.doc_id,
            format=self.format,
            payload_path=corpus_dir / self.path,
            truth=PairSet.truth(self.truth, source_doc=self.doc_id),
            template_id=self.template_id,
            seed=self.seed,
            context_fields=self.context_fields,
        )


class Manifest(BaseModel):
    documents: list[ManifestEntry]
