"""Keystore: scopes, versioning, rotation, revocation, audit completeness."""

import os

import pytest

from docvault.clock import ManualClock
from docvault.errors import NotFound, RevokedPath, Unauthorized
from docvault.store import KeyStore, Token
from docvault.store.keystore import master_key_from_env

WRITER = Token.make("writer", "read", "write")
READER = Token.make("reader", "read")
ADMIN = Token.make("root", "read", "write", "admin")
STRANGER = Token.make("stranger", "nothing")


@pytest.fixture
def keystore(tmp_path):
    return KeyStore(tmp_path / "ks.json", os.urandom(32), clock=ManualClock())


class TestPutGet:
    def test_round_trip(self, keystore):
        keystore.put("docs/1/master", b"secret-value", WRITER)
        assert keystore.get("docs/1/master", READER) == b"secret-value"

    def test_out_of_scope_get_is_denied_and_audited(self, keystore):
        keystore.put("docs/1/master", b"v", WRITER)
        before = len(keystore.audit_rows())
        with pytest.raises(Unauthorized):
            keystore.get("docs/1/master", STRANGER)
        rows = keystore.audit_rows()
        assert len(rows) == before + 1
        assert rows[-1]["ok"] is False
        assert rows[-1]["who"] == "stranger"

    def test_put_requires_write_scope(self, keystore):
        with pytest.raises(Unauthorized):
            keystore.put("p", b"v", READER)

    def test_missing_path(self, keystore):
        with pytest.raises(NotFound):
            keystore.get("nope", READER)


class TestVersioning:
    def test_rotate_makes_new_current_and_keeps_old_for_admin(self, keystore):
        keystore.put("p", b"v1", WRITER)
        version = keystore.rotate("p", b"v2", WRITER)
        assert version == 2
        assert keystore.get("p", READER) == b"v2"
        assert keystore.get("p", ADMIN, version=1) == b"v1"

    def test_retired_version_denied_without_admin(self, keystore):
        keystore.put("p", b"v1", WRITER)
        keystore.rotate("p", b"v2", WRITER)
        with pytest.raises(Unauthorized):
            keystore.get("p", READER, version=1)

    def test_revoke_disables_all_versions(self, keystore):
        keystore.put("p", b"v1", WRITER)
        keystore.rotate("p", b"v2", WRITER)
        keystore.revoke("p", ADMIN)
        with pytest.raises(RevokedPath):
            keystore.get("p", ADMIN)
        with pytest.raises(RevokedPath):
            keystore.put("p", b"v3", WRITER)

    def test_revoke_requires_admin(self, keystore):
        keystore.put("p", b"v1", WRITER)
        with pytest.raises(Unauthorized):
            keystore.revoke("p", WRITER)


class TestAtRest:
    def test_no_plaintext_in_storage_file(self, tmp_path):
        canary = b"CANARY-SECRET-0xDEADBEEF"
        ks = KeyStore(tmp_path / "ks.json", os.urandom(32), clock=ManualClock())
        ks.put("docs/1/master", canary, WRITER)
        raw = (tmp_path / "ks.json").read_bytes()
        assert canary not in raw
        # base64 of the canary must not appear either
        import base64

        assert base64.b64encode(canary) not in raw

    def test_reload_reads_back(self, tmp_path):
        master = os.urandom(32)
        ks = KeyStore(tmp_path / "ks.json", master, clock=ManualClock())
        ks.put("p", b"persisted", WRITER)
        reloaded = KeyStore(tmp_path / "ks.json", master, clock=ManualClock())
        assert reloaded.get("p", READER) == b"persisted"

    def test_wrong_master_key_cannot_open(self, tmp_path):
        ks = KeyStore(tmp_path / "ks.json", os.urandom(32), clock=ManualClock())
        ks.put("p", b"v", WRITER)
        other = KeyStore(tmp_path / "ks.json", os.urandom(32), clock=ManualClock())
        with pytest.raises(Unauthorized):
            other.get("p", READER)


class TestAudit:
    def test_every_call_appends_exactly_one_row(self, keystore):
        calls = 0
        keystore.put("a", b"1", WRITER)
        calls += 1
        keystore.get("a", READER)
        calls += 1
        keystore.rotate("a", b"2", WRITER)
        calls += 1
        try:
            keystore.get("a", STRANGER)
        except Unauthorized:
            pass
        calls += 1
        try:
            keystore.get("missing", READER)
        except NotFound:
            pass
        calls += 1
        keystore.revoke("a", ADMIN)
        calls += 1
        assert len(keystore.audit_rows()) == calls


class TestMasterKeyFromEnv:
    def test_hex_and_passphrase_forms(self, monkeypatch):
        monkeypatch.setenv("DOCVAULT_KEYSTORE_KEY", "ab" * 32)
        assert master_key_from_env() == bytes.fromhex("ab" * 32)
        monkeypatch.setenv("DOCVAULT_KEYSTORE_KEY", "a passphrase")
        key = master_key_from_env()
        assert len(key) == 32
