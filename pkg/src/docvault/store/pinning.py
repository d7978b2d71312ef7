"""HTTP pinning client for remote blob persistence.

Wire contract (one page):

    POST {base_url}/pins
    Authorization: Bearer <token>
    multipart/form-data with one part named ``file`` (filename = content id)

    200 response body: {"hash": "<content id as computed remotely>"}

The client asserts that the remote hash equals the local id; disagreement is
a remote-integrity error, transport failures retry 3 times with exponential
backoff (200/400/800 ms).  The transport is injectable: tests plug a stub,
offline deployments plug ``LoopbackTransport``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Protocol

from ..errors import RemoteIntegrityError, RetryableError
from .cas import content_id

RETRY_BACKOFF_MS = (200, 400, 800)


@dataclass(frozen=True)
class PinReceipt:
    content_id: str
    remote_hash: str
    attempts: int


class Transport(Protocol):
    def post(self, url: str, headers: dict, filename: str, blob: bytes) -> dict: ...


class HttpxTransport:
    """Default transport backed by httpx."""

    def post(self, url: str, headers: dict, filename: str, blob: bytes) -> dict:
        import httpx

        try:
            response = httpx.post(
                url, headers=headers, files={"file": (filename, blob)}, timeout=30.0
            )
        except httpx.HTTPError as exc:
            raise ConnectionError(str(exc)) from exc
        if response.status_code >= 500:
            raise ConnectionError(f"server error {response.status_code}")
        response.raise_for_status()
        return response.json()


class LoopbackTransport:
    """Offline stub: recomputes the hash locally and echoes it back."""

    def post(self, url: str, headers: dict, filename: str, blob: bytes) -> dict:
        return {"hash": content_id(blob)}


@dataclass
class PinningClient:
    base_url: str = ""
    token: str = ""
    transport: Transport = field(default_factory=LoopbackTransport)
    sleep: Callable[[float], None] = time.sleep

    def pin(self, cid: str, blob: bytes) -> PinReceipt:
        """Upload a blob the caller already stored locally."""
        url = f"{self.base_url.rstrip('/')}/pins"
        headers = {"Authorization": f"Bearer {self.token}"}
        last_error: Exception | None = None
        for attempt, backoff_ms in enumerate((*RETRY_BACKOFF_MS, None), start=1):
            try:
                body = self.transport.post(url, headers, cid, blob)
                remote_hash = str(body.get("hash", ""))
                if remote_hash != cid:
                    raise RemoteIntegrityError(
                        f"remote reported {remote_hash!r}, expected {cid!r}"
                    )
                return PinReceipt(content_id=cid, remote_hash=remote_hash, attempts=attempt)
            except RemoteIntegrityError:
                raise
            except (ConnectionError, TimeoutError, OSError) as exc:
                last_error = exc
                if backoff_ms is None:
                    break
                self.sleep(backoff_ms / 1000.0)
        raise RetryableError(f"pinning failed after retries: {last_error}")
