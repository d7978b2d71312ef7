"""Anchor entries, including encrypted private payloads.

A private entry carries its payload as ciphertext: a fresh 256-bit entry key
encrypts the payload (AES-GCM), and that key is wrapped separately for every
member of the authorized set via X25519 ECDH + HKDF + AES-GCM.  The public
view of a private entry exposes only the content hash; no payload bytes,
encrypted or not, leave the chain record.
"""

from __future__ import annotations

import base64
import os
import re
import uuid
from dataclasses import dataclass, field
from datetime import datetime

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric.x25519 import (
    X25519PrivateKey,
    X25519PublicKey,
)
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from ..clock import isoformat_utc, parse_utc
from ..errors import InvalidInput, Unauthorized

KIND_DOCUMENT = "document"
KIND_FACT = "fact"
KIND_NOTARY_SIGNATURE = "notary-signature"
ENTRY_KINDS = (KIND_DOCUMENT, KIND_FACT, KIND_NOTARY_SIGNATURE)

_HASH_RX = re.compile(r"^[0-9a-f]{64}$")


def _b64(raw: bytes) -> str:
    return base64.b64encode(raw).decode("ascii")


def _unb64(text: str) -> bytes:
    return base64.b64decode(text.encode("ascii"))


@dataclass(frozen=True)
class Member:
    """One participant allowed to read private payloads."""

    key_id: str
    public_key: X25519PublicKey

    @classmethod
    def generate(cls, key_id: str) -> tuple["Member", X25519PrivateKey]:
        private = X25519PrivateKey.generate()
        return cls(key_id, private.public_key()), private


def _wrap_key(entry_key: bytes, member: Member) -> dict:
    ephemeral = X25519PrivateKey.generate()
    shared = ephemeral.exchange(member.public_key)
    wrapping_key = HKDF(
        algorithm=hashes.SHA256(), length=32, salt=None, info=b"entry-key-wrap"
    ).derive(shared)
    nonce = os.urandom(12)
    wrapped = AESGCM(wrapping_key).encrypt(nonce, entry_key, None)
    eph_pub = ephemeral.public_key().public_bytes(
        serialization.Encoding.Raw, serialization.PublicFormat.Raw
    )
    return {"ephemeral": _b64(eph_pub), "nonce": _b64(nonce), "wrapped": _b64(wrapped)}


def encrypt_private_payload(payload: bytes, members: list[Member]) -> dict:
    """Returns the ciphertext structure stored inside a private entry."""
    if not members:
        raise InvalidInput("a private entry needs at least one member")
    entry_key = os.urandom(32)
    nonce = os.urandom(12)
    ciphertext = AESGCM(entry_key).encrypt(nonce, payload, None)
    return {
        "nonce": _b64(nonce),
        "ciphertext": _b64(ciphertext),
        "wraps": {m.key_id: _wrap_key(entry_key, m) for m in members},
    }


def decrypt_private_payload(
    blob: dict, key_id: str, private_key: X25519PrivateKey
) -> bytes:
    """Unwrap with a member key; any non-member key fails."""
    wrap = blob.get("wraps", {}).get(key_id)
    if wrap is None:
        raise Unauthorized(f"key id {key_id!r} is not in the member set")
    ephemeral = X25519PublicKey.from_public_bytes(_unb64(wrap["ephemeral"]))
    shared = private_key.exchange(ephemeral)
    wrapping_key = HKDF(
        algorithm=hashes.SHA256(), length=32, salt=None, info=b"entry-key-wrap"
    ).derive(shared)
    try:
        entry_key = AESGCM(wrapping_key).decrypt(
            _unb64(wrap["nonce"]), _unb64(wrap["wrapped"]), None
        )
        return AESGCM(entry_key).decrypt(
            _unb64(blob["nonce"]), _unb64(blob["ciphertext"]), None
        )
    except InvalidTag as exc:
        raise Unauthorized("private payload does not decrypt under this key") from exc


@dataclass(frozen=True)
class AnchorEntry:
    entry_id: str
    kind: str
    content_hash: str
    visibility: str
    submitter: str
    submitted_at: datetime
    private_payload: dict | None = field(default=None)

    def __post_init__(self):
        if self.kind not in ENTRY_KINDS:
            raise InvalidInput(f"unknown entry kind {self.kind!r}")
        if not _HASH_RX.match(self.content_hash):
            raise InvalidInput("content_hash must be 64 lowercase hex characters")
        if self.visibility not in ("public", "private"):
            raise InvalidInput(f"unknown visibility {self.visibility!r}")
        if (self.private_payload is not None) != (self.visibility == "private"):
            raise InvalidInput("private payload present iff visibility is private")

    def to_record(self) -> dict:
        """Chain-persisted form (includes ciphertext for private entries)."""
        record = {
            "entry_id": self.entry_id,
            "kind": self.kind,
            "content_hash": self.content_hash,
            "visibility": self.visibility,
            "submitter": self.submitter,
            "submitted_at": isoformat_utc(self.submitted_at),
        }
        if self.private_payload is not None:
            record["private_payload"] = self.private_payload
        return record

    def to_public(self) -> dict:
        """Public view: hash only, never any payload bytes."""
        return {
            "entry_id": self.entry_id,
            "kind": self.kind,
            "content_hash": self.content_hash,
            "visibility": self.visibility,
            "submitter": self.submitter,
            "submitted_at": isoformat_utc(self.submitted_at),
        }

    @classmethod
    def from_record(cls, record: dict) -> "AnchorEntry":
        return cls(
            entry_id=record["entry_id"],
            kind=record["kind"],
            content_hash=record["content_hash"],
            visibility=record["visibility"],
            submitter=record["submitter"],
            submitted_at=parse_utc(record["submitted_at"]),
            private_payload=record.get("private_payload"),
        )


def new_entry(
    kind: str,
    content_hash: str,
    submitter: str,
    submitted_at: datetime,
    *,
    private_payload: bytes | None = None,
    members: list[Member] | None = None,
) -> AnchorEntry:
    """Build a draft entry; encrypts the payload when one is supplied."""
    blob = None
    visibility = "public"
    if private_payload is not None:
        blob = encrypt_private_payload(private_payload, members or [])
        visibility = "private"
    return AnchorEntry(
        entry_id=str(uuid.uuid4()),
        kind=kind,
        content_hash=content_hash,
        visibility=visibility,
        submitter=submitter,
        submitted_at=submitted_at,
        private_payload=blob,
    )
