"""Signed fact records: canonical hashing, Ed25519 signatures, export format.

The fact hash covers exactly (subject, predicate, issued_at, expires_at,
source_document) serialized as key-sorted JSON, UTF-8, no insignificant
whitespace: and nothing else, so no raw field value can leak through it and
independent implementations agree byte-for-byte.  The detached signature is
Ed25519 over the 32-byte hash.
"""

from __future__ import annotations

import base64
import hashlib
import json
import uuid
from dataclasses import dataclass
from datetime import datetime
from typing import Any

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from ..clock import isoformat_utc, parse_utc


def canonical_json(payload: Any) -> bytes:
    return json.dumps(
        payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def fact_hash(
    subject: str,
    predicate: str,
    issued_at: datetime,
    expires_at: datetime | None,
    source_document: str,
) -> bytes:
    payload = {
        "subject": subject,
        "predicate": predicate,
        "issued_at": isoformat_utc(issued_at),
        "expires_at": isoformat_utc(expires_at) if expires_at else None,
        "source_document": source_document,
    }
    return hashlib.sha256(canonical_json(payload)).digest()


@dataclass(frozen=True)
class Fact:
    id: str
    subject: str
    predicate: str
    fact_hash: bytes
    issued_at: datetime
    expires_at: datetime | None
    signature: bytes
    source_document: str

    @property
    def hash_hex(self) -> str:
        return self.fact_hash.hex()

    def to_dict(self) -> dict:
        """Export format: hash as hex, signature as base64."""
        return {
            "subject": self.subject,
            "predicate": self.predicate,
            "issued_at": isoformat_utc(self.issued_at),
            "expires_at": isoformat_utc(self.expires_at) if self.expires_at else None,
            "fact_hash": self.fact_hash.hex(),
            "signature": base64.b64encode(self.signature).decode("ascii"),
            "source_document": self.source_document,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Fact":
        return cls(
            id=d.get("id", str(uuid.uuid4())),
            subject=d["subject"],
            predicate=d["predicate"],
            fact_hash=bytes.fromhex(d["fact_hash"]),
            issued_at=parse_utc(d["issued_at"]),
            expires_at=parse_utc(d["expires_at"]) if d.get("expires_at") else None,
            signature=base64.b64decode(d["signature"]),
            source_document=d["source_document"],
        )


def sign_hash(key: Ed25519PrivateKey, digest: bytes) -> bytes:
    return key.sign(digest)


def signature_valid(public_key: Ed25519PublicKey, fact: Fact) -> bool:
    expected = fact_hash(
        fact.subject, fact.predicate, fact.issued_at, fact.expires_at, fact.source_document
    )
    if expected != fact.fact_hash:
        return False
    try:
        public_key.verify(fact.signature, fact.fact_hash)
        return True
    except InvalidSignature:
        return False
