"""Seeded corpus generation: documents, ground truth and the manifest."""

import hashlib
import json
import random
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from src.core.errors import CorpusMissing, IoFailure, UnsupportedFormat
from src.core.identity import PairSet
from src.core.logger import get_logger
from src.docgen.identities import derive_seed, generate_identities
from src.docgen.models import MANIFEST_NAME, CorpusSpec, DocumentRecord, Manifest, ManifestEntry
from src.docgen.templates import TEMPLATE_IDS, fill_template
from src.docgen.writers import render_bytes
from src.ingest.models import FILE_EXTENSIONS, DocumentFormat

logger = get_logger(__name__)

AMBIGUOUS_TEMPLATE = "inline_roster"
ID_LABEL_PHRASE = "证件号码"


def _write(path: Path, payload: bytes):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


def render_document(
    truth: PairSet,
    fmt: DocumentFormat,
    template_id: str,
    seed: int,
    *,
    doc_id: str,
    out_dir: Path,
) -> DocumentRecord:
    """Render truth into one document under out_dir/<format>/.

    Raises:
        UnsupportedFormat: fmt has no writer or template_id is unknown.
        IoFailure: The payload cannot be written.
    """
    if fmt not in FILE_EXTENSIONS:
        raise UnsupportedFormat(f"cannot render format {fmt.value}")
    layout = fill_template(template_id, truth, random.Random(derive_seed(seed, "layout")))
    payload = render_bytes(layout, fmt)
    path = Path(out_dir) / fmt.value / f"{doc_id}.{FILE_EXTENSIONS[fmt]}"
    _write(path, payload)
    return DocumentRecord(
        doc_id=doc_id,
        format=fmt,
        payload_path=path,
        truth=PairSet.truth(truth.pairs, source_doc=doc_id),
        template_id=template_id,
        seed=seed,
        context_fields=layout.context_fields,
    )


def _plan(spec: CorpusSpec) -> list[tuple[DocumentFormat, int, int]]:
    return [
        (fmt, index, derive_seed(spec.seed, fmt.value, index))
        for fmt in spec.formats
        for index in range(spec.docs_per_format)
    ]


def _render_planned(spec: CorpusSpec, out_dir: Path, fmt: DocumentFormat, index: int, doc_seed: int) -> DocumentRecord:
    rng = random.Random(doc_seed)
    n_entries = rng.randint(spec.entries_min, spec.entries_max)
    template_id = rng.choice(TEMPLATE_IDS)
    truth = generate_identities(doc_seed, n_entries)
    return render_document(
        truth, fmt, template_id, doc_seed, doc_id=f"{fmt.value}-{index:04d}", out_dir=out_dir
    )


def generate_corpus(spec: CorpusSpec, out_dir: Path, workers: int = 4) -> list[DocumentRecord]:
    """Render every planned document in parallel, then write the manifest once.

    Raises:
        IoFailure: Any payload or the manifest cannot be written.
    """
    out_dir = Path(out_dir)
    plan = _plan(spec)
    logger.info(f"Generating {len(plan)} documents into {out_dir} with {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        records = list(pool.map(lambda item: _render_planned(spec, out_dir, *item), plan))
    write_manifest(records, out_dir)
    logger.info(f"Corpus complete: {len(records)} documents, {sum(len(r.truth) for r in records)} pairs")
    return records


def manifest_bytes(records: list[DocumentRecord], corpus_dir: Path) -> bytes:
    manifest = Manifest(documents=[ManifestEntry.from_record(r, corpus_dir) for r in records])
    text = json.dumps(manifest.model_dump(mode="json"), ensure_ascii=False, indent=2)
    return (text + "\n").encode("utf-8")


def write_manifest(records: list[DocumentRecord], corpus_dir: Path) -> Path:
    path = Path(corpus_dir) / MANIFEST_NAME
    _write(path, manifest_bytes(records, Path(corpus_dir)))
    return path


def manifest_digest(corpus_dir: Path) -> str:
    path = Path(corpus_dir) / MANIFEST_NAME
    try:
        return hashlib.sha256(path.read_bytes()).hexdigest()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e


def load_manifest(corpus_dir: Path) -> list[DocumentRecord]:
    """Records listed in corpus_dir/manifest.json.

    Raises:
        CorpusMissing: The manifest is absent or unreadable.
    """
    corpus_dir = Path(corpus_dir)
    path = corpus_dir / MANIFEST_NAME
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise CorpusMissing(f"no manifest at {path}") from e
    try:
        manifest = Manifest.model_validate_json(raw)
    except ValidationError as e:
        raise CorpusMissing(f"unreadable manifest {path}: {e.error_count()} errors") from e
    return [entry.to_record(corpus_dir) for entry in manifest.documents]


def render_ambiguous_document(
    truth: PairSet,
    seed: int,
    out_dir: Path,
    doc_id: Optional[str] = None,
    labeled_rate: float = 0.3,
) -> DocumentRecord:
    """Markdown roster written as one line of inline prose.

    Entries are "name id" or "name，证件号码：id". In the labeled form the next
    entry's name sits closer to the ID than the entry's own name.
    """
    rng = random.Random(derive_seed(seed, "ambiguous"))
    doc_id = doc_id or f"ambiguous-{seed}"
    entries = []
    for pair in truth.pairs:
        if rng.random() < labeled_rate:
            entries.append(f"{pair.name}，{ID_LABEL_PHRASE}：{pair.id_number}")
        else:
            entries.append(f"{pair.name} {pair.id_number}")
    text = "\n".join([
        "# 人员核查名单",
        "",
        "下列人员信息已完成核查登记：",
        "",
        "；".join(entries) + "。",
        "",
    ])
    path = Path(out_dir) / DocumentFormat.MARKDOWN.value / f"{doc_id}.md"
    _write(path, text.encode("utf-8"))
    return DocumentRecord(
        doc_id=doc_id,
        format=DocumentFormat.MARKDOWN,
        payload_path=path,
        truth=PairSet.truth(truth.pairs, source_doc=doc_id),
        template_id=AMBIGUOUS_TEMPLATE,
        seed=seed,
    )
