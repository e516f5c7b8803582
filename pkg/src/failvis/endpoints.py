"""Chat-completion endpoint clients.

Every model the toolkit talks to — the subtask decomposer, the stage-3
drafting assistant, evaluated models, the judge, and the live supervisor
model — is an external service speaking the common chat-completion HTTP
shape: ``POST {base_url}/chat/completions`` with a JSON body of messages
whose content parts are text or base64 PNG data URLs, answering with
``choices[0].message.content``.

``HttpChatEndpoint`` is the production client (httpx, bounded retries with
exponential backoff and jitter).  ``CallableEndpoint`` adapts any function
for tests and scripted scenarios.
"""

from __future__ import annotations

import base64
import json
import os
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence

import httpx

from .errors import EndpointError

DEFAULT_TEMPERATURE = 0.0
DEFAULT_MAX_NEW_TOKENS = 2048


@dataclass(frozen=True)
class ChatMessage:
    role: str
    text: str
    images: tuple[bytes, ...] = ()  # PNG-encoded attachments

    def __post_init__(self):
        if not isinstance(self.images, tuple):
            object.__setattr__(self, "images", tuple(self.images))


class ChatEndpoint(Protocol):
    def complete(self, messages: Sequence[ChatMessage]) -> str: ...


@dataclass(frozen=True)
class ModelEndpointConfig:
    """Connection and decoding settings for one endpoint.

    Decoding defaults are pinned (temperature 0, 2,048 new tokens max) and are
    recorded in every run log via :meth:`log_dict`.  Only the *name* of the
    API-key environment variable is ever stored or logged.
    """

    base_url: str
    model_name: str
    api_key_env_var: str | None = None
    temperature: float = DEFAULT_TEMPERATURE
    max_new_tokens: int = DEFAULT_MAX_NEW_TOKENS
    timeout_s: float = 60.0
    max_retries: int = 3
    backoff_base_s: float = 0.5
    max_in_flight: int = 4

    @classmethod
    def from_json_file(cls, path: str | Path) -> "ModelEndpointConfig":
        data = json.loads(Path(path).read_text())
        return cls(**data)

    def log_dict(self) -> dict:
        return {
            "base_url": self.base_url,
            "model_name": self.model_name,
            "api_key_env_var": self.api_key_env_var,
            "temperature": self.temperature,
            "max_new_tokens": self.max_new_tokens,
            "timeout_s": self.timeout_s,
            "max_retries": self.max_retries,
            "max_in_flight": self.max_in_flight,
        }


def _content_parts(message: ChatMessage) -> list[dict]:
    parts: list[dict] = []
    for png in message.images:
        parts.append(
            {
                "type": "image_url",
                "image_url": {
                    "url": "data:image/png;base64," + base64.b64encode(png).decode()
                },
            }
        )
    parts.append({"type": "text", "text": message.text})
    return parts


def build_request_payload(
    config: ModelEndpointConfig, messages: Sequence[ChatMessage]
) -> dict:
    return {
        "model": config.model_name,
        "temperature": config.temperature,
        "max_tokens": config.max_new_tokens,
        "messages": [
            {"role": m.role, "content": _content_parts(m)} for m in messages
        ],
    }


class HttpChatEndpoint:
    """Synchronous chat-completion client with retry/backoff."""

    _RETRIABLE_STATUS = {429, 500, 502, 503, 504}

    def __init__(self, config: ModelEndpointConfig, client: httpx.Client | None = None):
        self.config = config
        self._client = client or httpx.Client(timeout=config.timeout_s)
        self._rng = random.Random()

    def complete(self, messages: Sequence[ChatMessage]) -> str:
        payload = build_request_payload(self.config, messages)
        headers = {"Content-Type": "application/json"}
        if self.config.api_key_env_var:
            key = os.environ.get(self.config.api_key_env_var, "")
            if key:
                headers["Authorization"] = f"Bearer {key}"
        url = self.config.base_url.rstrip("/") + "/chat/completions"

        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            try:
                resp = self._client.post(url, json=payload, headers=headers)
            except httpx.HTTPError as exc:
                last_error = exc
            else:
                if resp.status_code == 200:
                    try:
                        return resp.json()["choices"][0]["message"]["content"]
                    except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
                        raise EndpointError(f"malformed completion response: {exc}") from exc
                if resp.status_code not in self._RETRIABLE_STATUS:
                    raise EndpointError(f"endpoint returned HTTP {resp.status_code}")
                last_error = EndpointError(f"endpoint returned HTTP {resp.status_code}")
            if attempt < self.config.max_retries:
                delay = self.config.backoff_base_s * (2**attempt)
                time.sleep(delay * (1.0 + 0.25 * self._rng.random()))
        raise EndpointError(f"endpoint unreachable after retries: {last_error}")


class CallableEndpoint:
    """Wrap a plain function as an endpoint (mocks, scripted scenarios)."""

    def __init__(self, fn: Callable[[Sequence[ChatMessage]], str]):
        self._fn = fn
        self.requests: list[tuple[ChatMessage, ...]] = []

    def complete(self, messages: Sequence[ChatMessage]) -> str:
        self.requests.append(tuple(messages))
        return self._fn(messages)


class ReplayEndpoint:
    """Feed back a recorded sequence of responses, in order."""

    def __init__(self, responses: Sequence[str]):
        self._responses = list(responses)
        self._cursor = 0

    def complete(self, messages: Sequence[ChatMessage]) -> str:
        if self._cursor >= len(self._responses):
            raise EndpointError("replay exhausted")
        text = self._responses[self._cursor]
        self._cursor += 1
        return text
