"""Encrypted keystore with scoped tokens, versioning, rotation and audit.

Secrets are encrypted at rest with AES-256-GCM under a master key supplied
by the environment (or directly); plaintext never touches the storage file.
Every call: including denied ones: appends a row to the JSON-lines audit
log, so audit rows count calls one-to-one.

Authorization model: a token carries a set of scopes.  Writing needs
``write``, reading the latest version needs a scope in the record's read
policy, reading an older (retired) version or revoking needs ``admin``.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from ..clock import SystemClock, isoformat_utc
from ..errors import InvalidInput, NotFound, RevokedPath, Unauthorized

SCOPE_READ = "read"
SCOPE_WRITE = "write"
SCOPE_ADMIN = "admin"

MASTER_KEY_ENV = "DOCVAULT_KEYSTORE_KEY"


def master_key_from_env(env_var: str = MASTER_KEY_ENV) -> bytes:
    """Master key from the environment: 64 hex chars, or any passphrase
    stretched through PBKDF2."""
    raw = os.environ.get(env_var)
    if not raw:
        raise InvalidInput(f"environment variable {env_var} is not set")
    if len(raw) == 64 and all(c in "0123456789abcdef" for c in raw.lower()):
        return bytes.fromhex(raw)
    return hashlib.pbkdf2_hmac("sha256", raw.encode(), b"docvault-keystore", 200_000)


@dataclass(frozen=True)
class Token:
    token_id: str
    scopes: frozenset[str]

    @classmethod
    def make(cls, token_id: str, *scopes: str) -> "Token":
        return cls(token_id, frozenset(scopes))


@dataclass
class _Version:
    number: int
    nonce: bytes
    ciphertext: bytes
    created_at: str
    retired: bool = False


@dataclass
class _Record:
    versions: list[_Version] = field(default_factory=list)
    policy: frozenset[str] = frozenset({SCOPE_READ})
    revoked: bool = False


class KeyStore:
    def __init__(
        self,
        path: str | Path,
        master_key: bytes,
        audit_path: str | Path | None = None,
        clock=None,
    ):
        if len(master_key) != 32:
            raise InvalidInput("master key must be 32 bytes")
        self._path = Path(path)
        self._audit_path = Path(audit_path) if audit_path else self._path.with_suffix(".audit.jsonl")
        self._aead = AESGCM(master_key)
        self._clock = clock or SystemClock()
        self._lock = threading.RLock()
        self._records: dict[str, _Record] = {}
        if self._path.exists():
            self._load()

    # -- storage format ------------------------------------------------

    def _load(self) -> None:
        data = json.loads(self._path.read_text())
        for path_key, rec in data.get("records", {}).items():
            record = _Record(
                policy=frozenset(rec["policy"]),
                revoked=rec["revoked"],
                versions=[
                    _Version(
                        number=v["n"],
                        nonce=base64.b64decode(v["nonce"]),
                        ciphertext=base64.b64decode(v["ct"]),
                        created_at=v["created_at"],
                        retired=v["retired"],
                    )
                    for v in rec["versions"]
                ],
            )
            self._records[path_key] = record

    def _save(self) -> None:
        data = {
            "records": {
                path_key: {
                    "policy": sorted(rec.policy),
                    "revoked": rec.revoked,
                    "versions": [
                        {
                            "n": v.number,
                            "nonce": base64.b64encode(v.nonce).decode(),
                            "ct": base64.b64encode(v.ciphertext).decode(),
                            "created_at": v.created_at,
                            "retired": v.retired,
                        }
                        for v in rec.versions
                    ],
                }
                for path_key, rec in self._records.items()
            }
        }
        tmp = self._path.with_suffix(".tmp")
        tmp.write_text(json.dumps(data, sort_keys=True))
        os.replace(tmp, self._path)

    def _audit(self, token: Token | None, op: str, path_key: str, ok: bool) -> None:
        row = {
            "who": token.token_id if token else "?",
            "op": op,
            "path": path_key,
            "when": isoformat_utc(self._clock.now()),
            "ok": ok,
        }
        with self._audit_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(row, sort_keys=True) + "\n")

    def _seal(self, path_key: str, number: int, value: bytes) -> _Version:
        nonce = os.urandom(12)
        aad = f"{path_key}#{number}".encode()
        return _Version(
            number=number,
            nonce=nonce,
            ciphertext=self._aead.encrypt(nonce, value, aad),
            created_at=isoformat_utc(self._clock.now()),
        )

    def _open(self, path_key: str, version: _Version) -> bytes:
        aad = f"{path_key}#{version.number}".encode()
        try:
            return self._aead.decrypt(version.nonce, version.ciphertext, aad)
        except InvalidTag as exc:
            raise Unauthorized("keystore master key cannot open this record") from exc

    def _require(self, token: Token, scope: str, op: str, path_key: str) -> None:
        if scope not in token.scopes:
            self._audit(token, op, path_key, ok=False)
            raise Unauthorized(f"token {token.token_id!r} lacks scope {scope!r}")

    # -- operations ------------------------------------------------------

    def put(
        self,
        path_key: str,
        value: bytes,
        token: Token,
        policy: frozenset[str] | set[str] | None = None,
    ) -> int:
        """Store a new version; returns its number (1 for a fresh path)."""
        with self._lock:
            self._require(token, SCOPE_WRITE, "put", path_key)
            record = self._records.setdefault(path_key, _Record())
            if record.revoked:
                self._audit(token, "put", path_key, ok=False)
                raise RevokedPath(path_key)
            if policy:
                record.policy = frozenset(policy)
            number = len(record.versions) + 1
            record.versions.append(self._seal(path_key, number, value))
            self._save()
            self._audit(token, "put", path_key, ok=True)
            return number

    def get(self, path_key: str, token: Token, version: int | None = None) -> bytes:
        """Latest authorized version, or a specific one (admin for retired)."""
        with self._lock:
            record = self._records.get(path_key)
            if record is None or not record.versions:
                self._audit(token, "get", path_key, ok=False)
                raise NotFound(f"no secret at {path_key!r}")
            if record.revoked:
                self._audit(token, "get", path_key, ok=False)
                raise RevokedPath(path_key)
            if version is None:
                if not (token.scopes & record.policy or SCOPE_ADMIN in token.scopes):
                    self._audit(token, "get", path_key, ok=False)
                    raise Unauthorized(
                        f"token {token.token_id!r} not in read policy for {path_key!r}"
                    )
                chosen = record.versions[-1]
            else:
                matches = [v for v in record.versions if v.number == version]
                if not matches:
                    self._audit(token, "get", path_key, ok=False)
                    raise NotFound(f"no version {version} at {path_key!r}")
                chosen = matches[0]
                if chosen.retired and SCOPE_ADMIN not in token.scopes:
                    self._audit(token, "get", path_key, ok=False)
                    raise Unauthorized("retired versions require the admin scope")
                if not chosen.retired and not (
                    token.scopes & record.policy or SCOPE_ADMIN in token.scopes
                ):
                    self._audit(token, "get", path_key, ok=False)
                    raise Unauthorized(
                        f"token {token.token_id!r} not in read policy for {path_key!r}"
                    )
            value = self._open(path_key, chosen)
            self._audit(token, "get", path_key, ok=True)
            return value

    def rotate(self, path_key: str, value: bytes, token: Token) -> int:
        """New version becomes current; the previous one is retired but
        stays readable (admin) for deobfuscation of old shares."""
        with self._lock:
            self._require(token, SCOPE_WRITE, "rotate", path_key)
            record = self._records.get(path_key)
            if record is None or not record.versions:
                self._audit(token, "rotate", path_key, ok=False)
                raise NotFound(f"no secret at {path_key!r}")
            if record.revoked:
                self._audit(token, "rotate", path_key, ok=False)
                raise RevokedPath(path_key)
            for v in record.versions:
                v.retired = True
            number = len(record.versions) + 1
            record.versions.append(self._seal(path_key, number, value))
            self._save()
            self._audit(token, "rotate", path_key, ok=True)
            return number

    def revoke(self, path_key: str, token: Token) -> None:
        """Disable every version of a path."""
        with self._lock:
            self._require(token, SCOPE_ADMIN, "revoke", path_key)
            record = self._records.get(path_key)
            if record is None:
                self._audit(token, "revoke", path_key, ok=False)
                raise NotFound(f"no secret at {path_key!r}")
            record.revoked = True
            self._save()
            self._audit(token, "revoke", path_key, ok=True)

    # -- introspection ----------------------------------------------------

    def audit_rows(self) -> list[dict]:
        if not self._audit_path.exists():
            return []
        return [
            json.loads(line)
            for line in self._audit_path.read_text().splitlines()
            if line.strip()
        ]

    @property
    def storage_path(self) -> Path:
        return self._path

    @property
    def audit_path(self) -> Path:
        return self._audit_path
