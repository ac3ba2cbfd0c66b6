"""Tests for ingest backends and time charging."""

import httpx
import pytest

from src.core.config import ClockMode, load_config
from src.core.errors import UnsupportedFormat
from src.ingest.models import DocumentFormat, Fidelity
from src.ocr.remote import RemoteOcrClient
from src.router.backends import SUPPORT_MATRIX, BackendRegistry, IngestBackend, supports


class TestSupportMatrix:
    """Tests for backend/format support."""

    def test_every_backend_supports_one_format(self):
        assert all(len(formats) == 1 for formats in SUPPORT_MATRIX.values())

    @pytest.mark.parametrize("backend, fmt", [
        (IngestBackend.NATIVE_MARKDOWN, DocumentFormat.MARKDOWN),
        (IngestBackend.NATIVE_PDF, DocumentFormat.PDF),
        (IngestBackend.TAG_WRAPPING_FIXTURE, DocumentFormat.PDF),
        (IngestBackend.OCR_PRESERVING, DocumentFormat.TRANSCRIPT),
        (IngestBackend.OCR_DESTROYING, DocumentFormat.TRANSCRIPT),
        (IngestBackend.REMOTE_OCR, DocumentFormat.TRANSCRIPT),
    ])
    def test_supported(self, backend, fmt):
        assert supports(backend, fmt)

    def test_unsupported(self):
        assert not supports(IngestBackend.NATIVE_DOCX, DocumentFormat.XLSX)
        assert not supports(IngestBackend.OCR_PRESERVING, DocumentFormat.PDF)


class TestIngest:
    """Tests for BackendRegistry.ingest."""

    @pytest.mark.asyncio
    @pytest.mark.parametrize("fmt, backend, seconds", [
        (DocumentFormat.MARKDOWN, IngestBackend.NATIVE_MARKDOWN, 0.0),
        (DocumentFormat.DOCX, IngestBackend.NATIVE_DOCX, 0.1),
        (DocumentFormat.XLSX, IngestBackend.NATIVE_XLSX, 0.0),
        (DocumentFormat.PDF, IngestBackend.NATIVE_PDF, 1.3),
        (DocumentFormat.PDF, IngestBackend.TAG_WRAPPING_FIXTURE, 1.5),
        (DocumentFormat.TRANSCRIPT, IngestBackend.OCR_PRESERVING, 0.3),
        (DocumentFormat.TRANSCRIPT, IngestBackend.OCR_DESTROYING, 1.2),
    ])
    async def test_virtual_charges(self, render, registry, fmt, backend, seconds):
        st = await registry.ingest(render(fmt, n=5), backend)
        assert st.extract_time == seconds

    @pytest.mark.asyncio
    async def test_fidelity_per_backend(self, render, registry):
        pdf = render(DocumentFormat.PDF, n=5)
        transcript = render(DocumentFormat.TRANSCRIPT, n=5)
        assert (await registry.ingest(pdf, IngestBackend.NATIVE_PDF)).fidelity is Fidelity.PRESERVED
        assert (await registry.ingest(pdf, IngestBackend.TAG_WRAPPING_FIXTURE)).fidelity is Fidelity.SYMBOLIC_ONLY
        assert (await registry.ingest(transcript, IngestBackend.OCR_PRESERVING)).fidelity is Fidelity.PRESERVED
        assert (await registry.ingest(transcript, IngestBackend.OCR_DESTROYING)).fidelity is Fidelity.LOST

    @pytest.mark.asyncio
    async def test_wall_clock_measures_native_but_not_ocr(self, render, registry_factory):
        registry = registry_factory(clock_mode=ClockMode.WALL)
        docx = await registry.ingest(render(DocumentFormat.DOCX, n=5), IngestBackend.NATIVE_DOCX)
        ocr = await registry.ingest(render(DocumentFormat.TRANSCRIPT, n=5), IngestBackend.OCR_PRESERVING)
        assert docx.extract_time != 0.1
        assert docx.extract_time >= 0
        assert ocr.extract_time == 0.3

    @pytest.mark.asyncio
    async def test_unsupported_format(self, render, registry):
        with pytest.raises(UnsupportedFormat):
            await registry.ingest(render(DocumentFormat.DOCX, n=2), IngestBackend.NATIVE_XLSX)

    @pytest.mark.asyncio
    async def test_remote_ocr_not_configured(self, render, registry):
        with pytest.raises(UnsupportedFormat, match="not configured"):
            await registry.ingest(render(DocumentFormat.TRANSCRIPT, n=2), IngestBackend.REMOTE_OCR)

    @pytest.mark.asyncio
    async def test_remote_ocr_lane(self, render, registry_factory):
        def handler(request: httpx.Request) -> httpx.Response:
            return httpx.Response(200, json={"lines": [{"text": "王芳"}, {"text": "11010519491231002X"}]})

        remote = RemoteOcrClient("http://ocr.test", client=httpx.AsyncClient(transport=httpx.MockTransport(handler)))
        registry = registry_factory(remote_ocr=remote)
        st = await registry.ingest(render(DocumentFormat.TRANSCRIPT, n=2), IngestBackend.REMOTE_OCR)
        await registry.close()
        assert registry.remote_ocr_configured
        assert st.fidelity is Fidelity.LOST
        assert st.extract_time == 0.3


class TestFromConfig:
    """Tests for building a registry from configuration."""

    def test_profiles_follow_config(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = load_config(overrides={"seed": 5, "ocr": {"shuffle_window": 1.0}})
        registry = BackendRegistry.from_config(config)
        preserving = registry.profiles[IngestBackend.OCR_PRESERVING]
        destroying = registry.profiles[IngestBackend.OCR_DESTROYING]
        assert preserving.noise_seed == destroying.noise_seed == 5
        assert preserving.char_noise_rate == 0.0015
        assert destroying.simulated_ocr_seconds == 1.2
        assert destroying.shuffle_window == 1.0
        assert not registry.remote_ocr_configured

    def test_remote_endpoint_enables_remote_lane(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = load_config(overrides={"ocr": {"remote_endpoint": "http://ocr.test"}})
        registry = BackendRegistry.from_config(config, client=httpx.AsyncClient())
        assert registry.remote_ocr_configured
