"""Pytest configuration and shared fixtures."""

from pathlib import Path

import pytest

from src.core.config import DEFAULT_INGEST_COSTS, ClockMode
from src.core.identity import PairSet
from src.core.llm_client import LLMGateway
from src.core.reference_backend import BackendReply, ReferenceBackend
from src.docgen.corpus import generate_corpus, render_document
from src.docgen.identities import generate_identities
from src.docgen.models import CorpusSpec, DocumentRecord
from src.ingest.models import DocumentFormat
from src.ocr.simulate import OcrMode, OcrProfile
from src.router.backends import BackendRegistry

TEST_SEED = 20240501


@pytest.fixture
def gateway():
    """Gateway over the deterministic reference backend, virtual clock."""
    return LLMGateway(backend=ReferenceBackend(), clock_mode=ClockMode.VIRTUAL)


class ScriptedBackend:
    """Backend replaying fixed replies or raising a fixed error."""

    name = "scripted"

    def __init__(self, replies: list[str], error: Exception = None):
        self.replies = list(replies)
        self.error = error
        self.prompts: list[str] = []

    async def generate(self, system_prompt: str, user_prompt: str, max_output_tokens: int) -> BackendReply:
        self.prompts.append(user_prompt)
        if self.error is not None:
            raise self.error
        return BackendReply(text=self.replies.pop(0))

    async def close(self):
        return None


@pytest.fixture
def scripted_gateway():
    """Build a gateway whose backend answers with the given replies in order."""
    def build(*replies: str, error: Exception = None) -> LLMGateway:
        return LLMGateway(backend=ScriptedBackend(list(replies), error))

    return build


def make_registry(
    preserving_noise: float = 0.0,
    destroying_noise: float = 0.0,
    noise_seed: int = TEST_SEED,
    clock_mode: ClockMode = ClockMode.VIRTUAL,
    remote_ocr=None,
) -> BackendRegistry:
    return BackendRegistry(
        preserving=OcrProfile(
            mode=OcrMode.LAYOUT_PRESERVING,
            char_noise_rate=preserving_noise,
            noise_seed=noise_seed,
            simulated_ocr_seconds=0.3,
        ),
        destroying=OcrProfile(
            mode=OcrMode.LAYOUT_DESTROYING,
            char_noise_rate=destroying_noise,
            noise_seed=noise_seed,
            simulated_ocr_seconds=1.2,
        ),
        ingest_costs=DEFAULT_INGEST_COSTS,
        clock_mode=clock_mode,
        remote_ocr=remote_ocr,
    )


@pytest.fixture
def registry():
    """Registry with noise-free OCR lanes."""
    return make_registry()


@pytest.fixture
def registry_factory():
    """Build registries with custom noise, clock or remote OCR."""
    return make_registry


@pytest.fixture(scope="session")
def corpus_factory(tmp_path_factory):
    """Generate (and cache) corpora by spec."""
    cache: dict[tuple, list[DocumentRecord]] = {}

    def build(
        formats: tuple[DocumentFormat, ...],
        docs_per_format: int,
        entries_min: int = 10,
        entries_max: int = 30,
        seed: int = TEST_SEED,
    ) -> list[DocumentRecord]:
        key = (formats, docs_per_format, entries_min, entries_max, seed)
        if key not in cache:
            spec = CorpusSpec(
                seed=seed,
                docs_per_format=docs_per_format,
                entries_min=entries_min,
                entries_max=entries_max,
                formats=list(formats),
            )
            out_dir = tmp_path_factory.mktemp("corpus")
            cache[key] = generate_corpus(spec, out_dir, workers=4)
        return cache[key]

    return build


@pytest.fixture
def render(tmp_path: Path):
    """Render a fresh document of n entries in one format."""
    def build(
        fmt: DocumentFormat,
        n: int = 30,
        template_id: str = "insurance_form",
        seed: int = 7,
    ) -> DocumentRecord:
        truth: PairSet = generate_identities(seed, n)
        return render_document(truth, fmt, template_id, seed, doc_id=f"{fmt.value}-test", out_dir=tmp_path)

    return build
