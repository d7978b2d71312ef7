"""Content-addressed store: idempotence, verification on read, tampering."""

import hashlib

import pytest

from docvault.errors import CorruptionError, InvalidInput, NotFound
from docvault.store import ContentStore, content_id, is_content_id


@pytest.fixture
def store(tmp_path):
    return ContentStore(tmp_path / "cas")


class TestContentId:
    def test_empty_blob_reference_value(self):
        # SHA-256 of the empty string is a published constant.
        assert content_id(b"") == (
            "sha256-e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        )
        assert content_id(b"") == "sha256-" + hashlib.sha256(b"").hexdigest()

    def test_format_check(self):
        assert is_content_id(content_id(b"x"))
        assert not is_content_id("sha256-XYZ")
        assert not is_content_id("md5-" + "0" * 32)


class TestPutGet:
    def test_round_trip(self, store):
        blob = b"some document bytes"
        cid = store.put(blob)
        assert store.get(cid) == blob

    def test_idempotent_put(self, store, tmp_path):
        blob = b"same bytes"
        a = store.put(blob)
        b = store.put(blob)
        assert a == b
        assert store.ids() == [a]

    def test_distinct_blobs_distinct_ids(self, store):
        assert store.put(b"one") != store.put(b"onf")

    def test_unknown_id(self, store):
        with pytest.raises(NotFound):
            store.get(content_id(b"never stored"))

    def test_bad_id_rejected(self, store):
        with pytest.raises(InvalidInput):
            store.get("not-an-id")

    def test_on_disk_tamper_detected(self, store):
        cid = store.put(b"original content")
        path = store.root / cid
        raw = bytearray(path.read_bytes())
        raw[0] ^= 0xFF
        path.write_bytes(bytes(raw))
        with pytest.raises(CorruptionError):
            store.get(cid)

    def test_empty_blob_round_trip(self, store):
        cid = store.put(b"")
        assert store.get(cid) == b""
