"""Chat-completion transport for OpenRouter-compatible providers.

One POST to ``{base_url}/chat/completions`` with the configured model and
the prompt as a single user message; the reply is the first choice's
content. Transport and API failures both raise ``LlmError`` subclasses so
the pipeline's retry loop can treat them uniformly. The API key is read
from ``APCE_OPENROUTER_API_KEY`` unless supplied explicitly and never
appears in reprs or logs.
"""

from __future__ import annotations

from dataclasses import dataclass

import httpx

API_KEY_ENV = "APCE_OPENROUTER_API_KEY"
DEFAULT_BASE_URL = "https://openrouter.ai/api/v1"
DEFAULT_MODEL_ID = "deepseek/deepseek-r1:free"
DEFAULT_TIMEOUT_MS = 60_000


class LlmError(Exception):
    """Retryable completion failure (transport or API)."""


class LlmTransportError(LlmError):
    pass


class LlmApiError(LlmError):
    pass


class InvalidConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LlmConfig:
    api_key: str
    base_url: str = DEFAULT_BASE_URL
    model_id: str = DEFAULT_MODEL_ID
    timeout_ms: int = DEFAULT_TIMEOUT_MS

    def __post_init__(self):
        if not self.api_key:
            raise InvalidConfigError("api_key must be non-empty")
        if not self.base_url:
            raise InvalidConfigError("base_url must be non-empty")
        if not self.model_id:
            raise InvalidConfigError("model_id must be non-empty")
        if self.timeout_ms <= 0:
            raise InvalidConfigError("timeout_ms must be positive")

    def __repr__(self) -> str:  # keep the key out of logs and tracebacks
        return (
            f"LlmConfig(api_key='***', base_url={self.base_url!r}, "
            f"model_id={self.model_id!r}, timeout_ms={self.timeout_ms})"
        )


class LlmClient:
    """Thin synchronous client; stateless per call, safe for concurrent use."""

    def __init__(self, config: LlmConfig, transport: httpx.BaseTransport | None = None):
        self._transport = transport
        self._client: httpx.Client | None = None
        self._config = config
        self._rebuild()

    @property
    def config(self) -> LlmConfig:
        return self._config

    def _rebuild(self) -> None:
        if self._client is not None:
            self._client.close()
        self._client = httpx.Client(
            base_url=self._config.base_url.rstrip("/"),
            headers={"Authorization": f"Bearer {self._config.api_key}"},
            timeout=self._config.timeout_ms / 1000.0,
            transport=self._transport,
        )

    def swap_provider(self, config: LlmConfig) -> None:
        """Point subsequent ``complete`` calls at a new provider/model."""
        self._config = config
        self._rebuild()

    def close(self) -> None:
        if self._client is not None:
            self._client.close()

    def __enter__(self) -> "LlmClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def complete(self, prompt: str) -> str:
        """Run one chat completion and return the trimmed reply text."""
        body = {
            "model": self._config.model_id,
            "messages": [{"role": "user", "content": prompt}],
        }
        try:
            response = self._client.post("/chat/completions", json=body)
        except httpx.HTTPError as err:
            raise LlmTransportError(f"completion request failed: {err}") from err
        if response.status_code < 200 or response.status_code >= 300:
            raise LlmApiError(f"completion returned status {response.status_code}")
        try:
            payload = response.json()
        except ValueError as err:
            raise LlmApiError("malformed completion body: not JSON") from err
        try:
            choices = payload["choices"]
            if not choices:
                raise KeyError("empty choices")
            content = choices[0]["message"]["content"]
        except (KeyError, TypeError, IndexError) as err:
            raise LlmApiError(f"malformed completion body: {err}") from err
        if not isinstance(content, str):
            raise LlmApiError("completion content is not text")
        return content.strip()
