"""Pinning client: stub transports, retries with backoff, hash checks."""

import pytest

from docvault.errors import RemoteIntegrityError, RetryableError
from docvault.store import LoopbackTransport, PinningClient, content_id


class _EchoTransport:
    def __init__(self):
        self.requests = []

    def post(self, url, headers, filename, blob):
        self.requests.append((url, headers, filename))
        return {"hash": content_id(blob)}


class _WrongHashTransport:
    def post(self, url, headers, filename, blob):
        return {"hash": "sha256-" + "0" * 64}


class _FlakyTransport:
    def __init__(self, failures):
        self.failures = failures
        self.calls = 0

    def post(self, url, headers, filename, blob):
        self.calls += 1
        if self.calls <= self.failures:
            raise ConnectionError("boom")
        return {"hash": content_id(blob)}


class TestPin:
    def test_loopback_receipt(self):
        client = PinningClient(transport=LoopbackTransport())
        blob = b"pinned bytes"
        receipt = client.pin(content_id(blob), blob)
        assert receipt.remote_hash == content_id(blob)
        assert receipt.attempts == 1

    def test_bearer_auth_and_multipart_name(self):
        transport = _EchoTransport()
        client = PinningClient(base_url="https://pin.example", token="tok123", transport=transport)
        blob = b"x"
        client.pin(content_id(blob), blob)
        url, headers, filename = transport.requests[0]
        assert url == "https://pin.example/pins"
        assert headers["Authorization"] == "Bearer tok123"
        assert filename == content_id(blob)

    def test_hash_disagreement(self):
        client = PinningClient(transport=_WrongHashTransport())
        blob = b"y"
        with pytest.raises(RemoteIntegrityError):
            client.pin(content_id(blob), blob)

    def test_third_attempt_succeeds_with_backoff(self):
        sleeps = []
        client = PinningClient(
            transport=_FlakyTransport(failures=2), sleep=sleeps.append
        )
        blob = b"z"
        receipt = client.pin(content_id(blob), blob)
        assert receipt.attempts == 3
        assert sleeps == [0.2, 0.4]

    def test_exhausted_retries_raise_retryable(self):
        sleeps = []
        client = PinningClient(transport=_FlakyTransport(failures=99), sleep=sleeps.append)
        blob = b"w"
        with pytest.raises(RetryableError):
            client.pin(content_id(blob), blob)
        assert sleeps == [0.2, 0.4, 0.8]
