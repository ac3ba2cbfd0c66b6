"""Client for an external OCR service.

Wire format: POST raw image bytes; the service answers with
``{"lines": [{"text": "...", "bbox": [x0, y0, x1, y1]}]}`` where bbox is
optional and y grows downward.
"""

import time
from typing import Optional

import httpx
from pydantic import BaseModel, ValidationError, field_validator

from src.core.errors import MalformedResponse, OcrTimeout, RemoteOcrFailure
from src.core.logger import get_logger
from src.ingest.layout import PositionedRun, grid_from_lines, group_lines, linearize
from src.ingest.models import DocumentFormat, Fidelity, StructuredText

logger = get_logger(__name__)


class OcrLine(BaseModel):
    text: str
    bbox: Optional[list[float]] = None

    @field_validator("bbox")
    @classmethod
    def _four_coordinates(cls, bbox: Optional[list[float]]) -> Optional[list[float]]:
        if bbox is not None and len(bbox) != 4:
            raise ValueError("bbox needs four coordinates")
        return bbox


class OcrResponse(BaseModel):
    lines: list[OcrLine]


def structured_from_response(response: OcrResponse, source_format: DocumentFormat, elapsed: float) -> StructuredText:
    """Grid reconstruction when every line has a box, plain lines otherwise."""
    lines = [line for line in response.lines if line.text.strip()]
    if not lines:
        raise MalformedResponse("OCR response has no text")

    if all(line.bbox is not None for line in lines):
        runs = [PositionedRun(x=line.bbox[0], y=line.bbox[1], text=line.text.strip()) for line in lines]
        grouped = group_lines(runs)
        table = grid_from_lines(grouped)
        return StructuredText(
            plain_text=linearize(grouped),
            table=table,
            fidelity=Fidelity.PRESERVED if table is not None else Fidelity.SYMBOLIC_ONLY,
            source_format=source_format,
            extract_time=elapsed,
        )
    return StructuredText(
        plain_text="\n".join(line.text for line in lines),
        table=None,
        fidelity=Fidelity.LOST,
        source_format=source_format,
        extract_time=elapsed,
    )


class RemoteOcrClient:
    """POSTs page images to an OCR endpoint."""

    def __init__(self, endpoint: str, timeout: float = 30.0, client: Optional[httpx.AsyncClient] = None):
        self.endpoint = endpoint
        self.client = client or httpx.AsyncClient(timeout=timeout)
        logger.info(f"RemoteOcrClient initialized: endpoint={endpoint}")

    async def close(self):
        await self.client.aclose()

    async def remote_ocr(
        self, image_bytes: bytes, source_format: DocumentFormat = DocumentFormat.TRANSCRIPT
    ) -> StructuredText:
        """Recognize one page.

        Raises:
            OcrTimeout: The endpoint is unreachable or too slow.
            RemoteOcrFailure: Non-success status.
            MalformedResponse: Body is not the expected JSON document.
        """
        started = time.perf_counter()
        try:
            response = await self.client.post(
                self.endpoint,
                content=image_bytes,
                headers={"Content-Type": "application/octet-stream"},
            )
            response.raise_for_status()
        except (httpx.TimeoutException, httpx.ConnectError) as e:
            logger.error(f"OCR endpoint unreachable: {e}")
            raise OcrTimeout(f"OCR endpoint {self.endpoint} unreachable or timed out") from e
        except httpx.HTTPStatusError as e:
            logger.error(f"OCR HTTP status error: {e.response.status_code}")
            raise RemoteOcrFailure(f"OCR endpoint returned status {e.response.status_code}") from e
        except httpx.HTTPError as e:
            logger.error(f"OCR HTTP error: {type(e).__name__} - {e}")
            raise RemoteOcrFailure(f"{type(e).__name__}: {e}") from e

        try:
            parsed = OcrResponse.model_validate_json(response.content)
        except ValidationError as e:
            raise MalformedResponse(f"unexpected OCR response: {e.error_count()} errors") from e
        return structured_from_response(parsed, source_format, time.perf_counter() - started)
