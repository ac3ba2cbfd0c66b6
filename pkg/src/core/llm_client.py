"""LLM gateway: the single access point for completions.

Wraps a backend (the offline reference backend or a remote chat-completion
server), counts output tokens with the shared tokenizer approximation and
prices each response on the virtual clock.
"""

import asyncio
import time
from typing import Optional, Protocol

import httpx
from pydantic import BaseModel, Field, field_validator

from src.core.config import ClockMode, GatewaySettings
from src.core.errors import CompletionTimeout, GatewayError, OutputTruncated, RemoteFailure
from src.core.logger import get_logger, log_llm_request, log_llm_response
from src.core.reference_backend import BackendReply, ReferenceBackend
from src.core.tokens import CostModel, count_tokens

logger = get_logger(__name__)


class CompletionRequest(BaseModel):
    system_prompt: str = Field(min_length=1)
    user_prompt: str = Field(min_length=1)
    max_output_tokens: int = Field(ge=1)
    temperature: float = 0.0

    @field_validator("temperature")
    @classmethod
    def _pinned_temperature(cls, value: float) -> float:
        if value != 0.0:
            raise ValueError("temperature is fixed at 0")
        return value


class CompletionResponse(BaseModel):
    text: str
    output_token_count: int = Field(ge=0)
    virtual_latency: float = Field(ge=0.0)
    wall_latency: float = Field(ge=0.0)


class CompletionBackend(Protocol):
    name: str

    async def generate(self, system_prompt: str, user_prompt: str, max_output_tokens: int) -> BackendReply:
        ...

    async def close(self) -> None:
        ...


class RemoteBackend:
    """Client for an OpenAI-compatible chat-completion server."""

    name = "remote"

    def __init__(
        self,
        endpoint: str,
        model: str,
        timeout: float = 120.0,
        client: Optional[httpx.AsyncClient] = None,
    ):
        """Initialize the remote backend.

        Args:
            endpoint: Base URL of the server (``/v1/chat/completions`` is appended)
            model: Model name sent with every request
            timeout: Request timeout in seconds
            client: Pre-built client, mainly for tests with a mock transport
        """
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.client = client or httpx.AsyncClient(timeout=timeout)
        logger.info(f"RemoteBackend initialized: endpoint={self.endpoint}, model={model}")

    async def close(self):
        logger.info("Closing remote backend client")
        await self.client.aclose()

    async def generate(self, system_prompt: str, user_prompt: str, max_output_tokens: int) -> BackendReply:
        url = f"{self.endpoint}/v1/chat/completions"
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": system_prompt},
                {"role": "user", "content": user_prompt},
            ],
            "temperature": 0,
            "max_tokens": max_output_tokens,
        }
        logger.debug(f"Request URL: {url}")

        try:
            response = await self.client.post(url, json=payload)
            response.raise_for_status()
            data = response.json()
            choice = data["choices"][0]
            text = choice["message"]["content"]
            if not isinstance(text, str):
                raise TypeError("message content is not a string")
            return BackendReply(text=text, finish_reason=choice.get("finish_reason"))
        except httpx.TimeoutException as e:
            logger.error(f"Timeout error: {e}")
            raise CompletionTimeout(f"request to {self.endpoint} timed out") from e
        except httpx.ConnectError as e:
            logger.error(f"Connection error: {e}")
            raise RemoteFailure(f"cannot connect to {self.endpoint}") from e
        except httpx.HTTPStatusError as e:
            logger.error(f"HTTP status error: {e.response.status_code}")
            logger.debug(f"Response text: {e.response.text}")
            raise RemoteFailure(f"server returned status {e.response.status_code}") from e
        except httpx.HTTPError as e:
            logger.error(f"HTTP error: {type(e).__name__} - {e}")
            raise RemoteFailure(f"{type(e).__name__}: {e}") from e
        except (KeyError, IndexError, TypeError, ValueError) as e:
            logger.error(f"Parse error: {e}")
            raise RemoteFailure(f"unexpected response shape: {e}") from e


class LLMGateway:
    """Backend-agnostic completion interface with virtual-clock accounting."""

    def __init__(
        self,
        backend: CompletionBackend,
        cost_model: Optional[CostModel] = None,
        clock_mode: ClockMode = ClockMode.VIRTUAL,
        max_in_flight: int = 8,
    ):
        self.backend = backend
        self.cost_model = cost_model or CostModel()
        self.clock_mode = clock_mode
        self._slots = asyncio.Semaphore(max_in_flight)

    @property
    def backend_name(self) -> str:
        return getattr(self.backend, "name", type(self.backend).__name__)

    async def complete(self, request: CompletionRequest) -> CompletionResponse:
        """Run one completion.

        Raises:
            CompletionTimeout, RemoteFailure, OutputTruncated: every backend
            failure surfaces as one of these.
        """
        log_llm_request(
            logger,
            self.backend_name,
            request.system_prompt,
            request.user_prompt,
            max_output_tokens=request.max_output_tokens,
        )
        started = time.perf_counter()
        try:
            async with self._slots:
                reply = await self.backend.generate(
                    request.system_prompt, request.user_prompt, request.max_output_tokens
                )
        except GatewayError as e:
            log_llm_response(logger, e.message, success=False)
            raise
        except Exception as e:
            log_llm_response(logger, f"{type(e).__name__}: {e}", success=False)
            raise RemoteFailure(f"backend {self.backend_name} failed: {type(e).__name__}: {e}") from e
        wall = time.perf_counter() - started

        tokens = count_tokens(reply.text)
        if reply.finish_reason == "length" or tokens > request.max_output_tokens:
            log_llm_response(logger, f"output truncated at {tokens} tokens", success=False)
            raise OutputTruncated(
                f"output of {tokens} tokens exceeds limit {request.max_output_tokens}"
            )

        log_llm_response(logger, reply.text, success=True, tokens=tokens)
        return CompletionResponse(
            text=reply.text,
            output_token_count=tokens,
            virtual_latency=self.cost_model.latency(tokens),
            wall_latency=wall,
        )

    def charged_seconds(self, response: CompletionResponse) -> float:
        """LLM time charged to an outcome under the active clock."""
        if self.clock_mode is ClockMode.VIRTUAL:
            return response.virtual_latency
        return response.wall_latency

    async def close(self):
        await self.backend.close()


def build_gateway(
    settings: GatewaySettings,
    clock_mode: ClockMode = ClockMode.VIRTUAL,
    client: Optional[httpx.AsyncClient] = None,
) -> LLMGateway:
    """Create the gateway selected by configuration."""
    if settings.backend == "remote":
        backend: CompletionBackend = RemoteBackend(
            endpoint=settings.endpoint or "",
            model=settings.model,
            timeout=settings.timeout,
            client=client,
        )
    else:
        backend = ReferenceBackend()
    return LLMGateway(
        backend=backend,
        cost_model=settings.cost,
        clock_mode=clock_mode,
        max_in_flight=settings.max_in_flight,
    )
