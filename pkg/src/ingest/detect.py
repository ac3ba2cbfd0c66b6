"""Format detection from leading bytes, zip part names and extension."""

import io
import zipfile
from pathlib import Path
from typing import Optional

from src.core.errors import IoFailure
from src.ingest.models import DocumentFormat

ZIP_MAGIC = b"PK\x03\x04"
PDF_MAGIC = b"%PDF-"
LEADING_BYTES = 8

_EXTENSION_FORMATS = {
    ".md": DocumentFormat.MARKDOWN,
    ".markdown": DocumentFormat.MARKDOWN,
    ".json": DocumentFormat.TRANSCRIPT,
}


def _zip_format(payload: bytes) -> DocumentFormat:
    try:
        with zipfile.ZipFile(io.BytesIO(payload)) as archive:
            names = archive.namelist()
    except (zipfile.BadZipFile, ValueError):
        return DocumentFormat.UNKNOWN
    if "word/document.xml" in names:
        return DocumentFormat.DOCX
    if any(name.startswith("xl/") for name in names):
        return DocumentFormat.XLSX
    return DocumentFormat.UNKNOWN


def detect_format(path: Path, payload: Optional[bytes] = None) -> DocumentFormat:
    """Decide a document's format.

    Zip archives are told apart by their part names, PDFs by their header;
    anything else is decided by extension. Returns UNKNOWN when nothing matches.

    Raises:
        IoFailure: The file cannot be read.
    """
    path = Path(path)
    if payload is None:
        payload = read_payload(path)
    if not payload:
        return DocumentFormat.UNKNOWN
    if payload.startswith(ZIP_MAGIC):
        return _zip_format(payload)
    if payload.startswith(PDF_MAGIC):
        return DocumentFormat.PDF
    return _EXTENSION_FORMATS.get(path.suffix.lower(), DocumentFormat.UNKNOWN)


def read_payload(path: Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
