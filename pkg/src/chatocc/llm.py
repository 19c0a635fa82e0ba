"""Chat-completion backends and session lifecycle.

Three backends share one session interface: recorded-transcript replay
for deterministic offline runs, a scripted mock for tests, and a generic
HTTP chat-completion endpoint. A session's transcript strictly
alternates user/assistant messages and sessions are never shared
between experiments.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

__all__ = [
    "BackendError",
    "BackendConfigError",
    "TransportError",
    "DigestMismatchError",
    "FixtureExhaustedError",
    "SessionStateError",
    "ChatMessage",
    "ChatSession",
    "Backend",
    "ReplayTurn",
    "ReplayFixture",
    "ReplayBackend",
    "MockBackend",
    "HttpBackend",
    "RecordingBackend",
    "normalize_prompt",
    "prompt_digest",
    "open_session",
]


class BackendError(Exception):
    """Base class for backend failures; the class name is the error kind."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class BackendConfigError(BackendError):
    pass


class TransportError(BackendError):
    pass


class DigestMismatchError(BackendError):
    def __init__(self, turn_index: int, label: str, expected: str, actual: str):
        where = f"turn {turn_index}" + (f" ({label})" if label else "")
        super().__init__(
            f"{where}: prompt digest {actual[:12]} does not match recorded {expected[:12]}"
        )
        self.turn_index = turn_index
        self.label = label
        self.expected = expected
        self.actual = actual


class FixtureExhaustedError(BackendError):
    pass


class SessionStateError(BackendError):
    pass


def normalize_prompt(text: str) -> str:
    """Line-ending and trailing-space normalization applied before hashing."""
    unified = text.replace("\r\n", "\n").replace("\r", "\n")
    return "\n".join(line.rstrip(" \t") for line in unified.split("\n"))


def prompt_digest(text: str) -> str:
    return hashlib.sha256(normalize_prompt(text).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "user" | "assistant"
    text: str
    timestamp: float


class ChatSession:
    """One conversation with a backend; messages alternate starting with user."""

    def __init__(self, session_id: str, backend: "Backend"):
        self.session_id = session_id
        self.backend = backend
        self.transcript: list[ChatMessage] = []

    def send(self, prompt_text: str, label: str = "") -> str:
        if self.transcript and self.transcript[-1].role == "user":
            raise SessionStateError(
                f"session {self.session_id}: last message is still unanswered"
            )
        self.transcript.append(ChatMessage("user", prompt_text, time.time()))
        response = self.backend.complete(self, prompt_text, label)
        self.transcript.append(ChatMessage("assistant", response, time.time()))
        return response


class Backend:
    """Session factory plus a completion function; subclasses fill both in."""

    supports_parallel = False

    def __init__(self) -> None:
        self._session_count = 0

    def describe(self) -> str:
        return type(self).__name__

    def check_ready(self) -> None:
        """Raise BackendConfigError when the backend cannot serve sessions."""

    def open(self) -> ChatSession:
        self.check_ready()
        self._session_count += 1
        return ChatSession(f"s{self._session_count:03d}", self)

    def complete(self, session: ChatSession, prompt_text: str, label: str = "") -> str:
        raise NotImplementedError


def open_session(backend: Backend) -> ChatSession:
    """Open a fresh session with an empty transcript and a new id."""
    return backend.open()


@dataclass(frozen=True)
class ReplayTurn:
    digest: str
    response: str
    label: str = ""


@dataclass(frozen=True)
class ReplayFixture:
    """An ordered record of prompt digests and replies, consumed in order."""

    turns: tuple[ReplayTurn, ...]
    model: str = ""
    captured: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "model": self.model,
                "captured": self.captured,
                "turns": [
                    {"label": t.label, "digest": t.digest, "response": t.response}
                    for t in self.turns
                ],
            },
            indent=2,
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, text: str) -> "ReplayFixture":
        data = json.loads(text)
        turns = tuple(
            ReplayTurn(t["digest"], t["response"], t.get("label", ""))
            for t in data["turns"]
        )
        return cls(turns=turns, model=data.get("model", ""), captured=data.get("captured", ""))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ReplayFixture":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


class ReplayBackend(Backend):
    """Replays a fixture strictly in order, verifying each prompt digest.

    The fixture itself is immutable and shareable; the backend holds the
    cursor, so replays are inherently sequential.
    """

    def __init__(self, fixture: ReplayFixture):
        super().__init__()
        self.fixture = fixture
        self._cursor = 0

    def describe(self) -> str:
        model = self.fixture.model or "unknown"
        return f"replay(model={model})"

    def complete(self, session: ChatSession, prompt_text: str, label: str = "") -> str:
        if self._cursor >= len(self.fixture.turns):
            raise FixtureExhaustedError(
                f"fixture exhausted after {self._cursor} turns"
            )
        turn = self.fixture.turns[self._cursor]
        actual = prompt_digest(prompt_text)
        if actual != turn.digest:
            raise DigestMismatchError(self._cursor, turn.label, turn.digest, actual)
        self._cursor += 1
        return turn.response


class MockBackend(Backend):
    """Scripted responses: a constant, a consumable sequence, or a callable."""

    supports_parallel = True

    def __init__(self, script: str | Sequence[str] | Callable[[str], str]):
        super().__init__()
        self._script = script
        self._index = 0

    def describe(self) -> str:
        return "mock"

    def complete(self, session: ChatSession, prompt_text: str, label: str = "") -> str:
        if callable(self._script):
            return self._script(prompt_text)
        if isinstance(self._script, str):
            return self._script
        if self._index >= len(self._script):
            raise FixtureExhaustedError("mock script exhausted")
        response = self._script[self._index]
        self._index += 1
        return response


class _TokenBucket:
    def __init__(self, per_minute: float):
        self.capacity = per_minute
        self.tokens = per_minute
        self.rate = per_minute / 60.0
        self.updated = time.monotonic()

    def acquire(self) -> None:
        while True:
            now = time.monotonic()
            self.tokens = min(self.capacity, self.tokens + (now - self.updated) * self.rate)
            self.updated = now
            if self.tokens >= 1:
                self.tokens -= 1
                return
            time.sleep((1 - self.tokens) / self.rate)


class HttpBackend(Backend):
    """Generic chat-completion endpoint speaking the common wire shape.

    Requests carry the full session transcript, temperature 0 by
    default; transient failures are retried with exponential backoff up
    to ``max_retries`` times and every attempt is counted.
    """

    supports_parallel = True

    ENDPOINT_VAR = "CHATOCC_ENDPOINT"
    API_KEY_VAR = "CHATOCC_API_KEY"
    MODEL_VAR = "CHATOCC_MODEL"

    def __init__(
        self,
        endpoint: str,
        api_key: str = "",
        model: str = "",
        temperature: float = 0.0,
        timeout: float = 60.0,
        max_retries: int = 3,
        requests_per_minute: float | None = None,
        backoff_base: float = 0.5,
    ):
        super().__init__()
        self.endpoint = endpoint
        self.api_key = api_key
        self.model = model
        self.temperature = temperature
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.attempt_log: list[int] = []
        self._bucket = _TokenBucket(requests_per_minute) if requests_per_minute else None

    @classmethod
    def from_env(cls, **kwargs) -> "HttpBackend":
        endpoint = os.environ.get(cls.ENDPOINT_VAR, "")
        return cls(
            endpoint=endpoint,
            api_key=os.environ.get(cls.API_KEY_VAR, ""),
            model=os.environ.get(cls.MODEL_VAR, ""),
            **kwargs,
        )

    def describe(self) -> str:
        return f"http(model={self.model or 'default'})"

    def check_ready(self) -> None:
        if not self.endpoint:
            raise BackendConfigError(
                f"no endpoint configured (set {self.ENDPOINT_VAR})"
            )

    def complete(self, session: ChatSession, prompt_text: str, label: str = "") -> str:
        import httpx

        self.check_ready()
        messages = [
            {"role": m.role, "content": m.text} for m in session.transcript
        ]
        payload = {
            "model": self.model,
            "messages": messages,
            "temperature": self.temperature,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        attempts = 0
        last_error: Exception | None = None
        while attempts <= self.max_retries:
            if self._bucket is not None:
                self._bucket.acquire()
            attempts += 1
            try:
                response = httpx.post(
                    self.endpoint, json=payload, headers=headers, timeout=self.timeout
                )
            except httpx.HTTPError as exc:
                last_error = exc
            else:
                if response.status_code == 429 or response.status_code >= 500:
                    last_error = TransportError(
                        f"status {response.status_code} from endpoint"
                    )
                elif response.status_code != 200:
                    self.attempt_log.append(attempts)
                    raise TransportError(
                        f"status {response.status_code} from endpoint: {response.text[:200]}"
                    )
                else:
                    self.attempt_log.append(attempts)
                    try:
                        return response.json()["choices"][0]["message"]["content"]
                    except (KeyError, IndexError, TypeError, ValueError) as exc:
                        raise TransportError(f"malformed completion payload: {exc}") from exc
            if attempts <= self.max_retries:
                time.sleep(self.backoff_base * (2 ** (attempts - 1)))
        self.attempt_log.append(attempts)
        raise TransportError(f"gave up after {attempts} attempts: {last_error}")


class RecordingBackend(Backend):
    """Wraps another backend and captures every exchange as a replay fixture."""

    def __init__(self, inner: Backend):
        super().__init__()
        self.inner = inner
        self._turns: list[ReplayTurn] = []

    def describe(self) -> str:
        return f"recording({self.inner.describe()})"

    def check_ready(self) -> None:
        self.inner.check_ready()

    def complete(self, session: ChatSession, prompt_text: str, label: str = "") -> str:
        response = self.inner.complete(session, prompt_text, label)
        self._turns.append(ReplayTurn(prompt_digest(prompt_text), response, label))
        return response

    def fixture(self, model: str = "", captured: str = "") -> ReplayFixture:
        return ReplayFixture(tuple(self._turns), model=model, captured=captured)
