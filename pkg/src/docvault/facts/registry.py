"""Fact issuance, verification and the append-only revocation registry.

Issuance requires a notary approval token, signs the canonical hash and
submits it to the anchor ledger; the caller is responsible for discarding
the raw extracted values afterwards (the registry never sees them).
Revocations append to a JSON-lines file, at most one entry per fact hash.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path

from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from ..clock import isoformat_utc, parse_utc
from ..errors import AlreadyRevoked, ApprovalRequired, NotFound, RetryableError
from .model import Fact, fact_hash, sign_hash, signature_valid
from .rules import FactDraft


class FactStatus(str, Enum):
    VALID = "valid"
    EXPIRED = "expired"
    REVOKED = "revoked"
    BAD_SIGNATURE = "bad-signature"


@dataclass(frozen=True)
class RevocationEntry:
    fact_hash: str
    revoked_at: datetime
    reason: str

    def to_dict(self) -> dict:
        return {
            "fact_hash": self.fact_hash,
            "revoked_at": isoformat_utc(self.revoked_at),
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RevocationEntry":
        return cls(d["fact_hash"], parse_utc(d["revoked_at"]), d["reason"])


class FactRegistry:
    """Issued facts plus the append-only revocation log."""

    def __init__(self, revocation_path: str | Path | None = None):
        self._facts: dict[str, Fact] = {}
        self._revocations: dict[str, RevocationEntry] = {}
        self._lock = threading.Lock()
        self._revocation_path = Path(revocation_path) if revocation_path else None
        if self._revocation_path and self._revocation_path.exists():
            for line in self._revocation_path.read_text().splitlines():
                if line.strip():
                    entry = RevocationEntry.from_dict(json.loads(line))
                    self._revocations[entry.fact_hash] = entry

    # -- issuance -----------------------------------------------------

    def issue(
        self,
        draft: FactDraft,
        signer: Ed25519PrivateKey,
        ledger_client,
        *,
        approval: object | None,
        now: datetime,
    ) -> Fact:
        """Sign a draft and anchor its hash; raises without an approval."""
        if approval is None:
            raise ApprovalRequired(
                f"draft {draft.predicate!r} has no notary approval"
            )
        digest = fact_hash(
            draft.subject, draft.predicate, now, draft.expires_at, draft.source_document
        )
        signature = sign_hash(signer, digest)
        fact = Fact(
            id=str(uuid.uuid4()),
            subject=draft.subject,
            predicate=draft.predicate,
            fact_hash=digest,
            issued_at=now,
            expires_at=draft.expires_at,
            signature=signature,
            source_document=draft.source_document,
        )
        if ledger_client is not None:
            try:
                ledger_client.submit_fact_hash(digest.hex())
            except Exception as exc:
                raise RetryableError(f"anchoring failed: {exc}") from exc
        with self._lock:
            self._facts[fact.hash_hex] = fact
        return fact

    # -- verification -------------------------------------------------

    def verify_fact(
        self,
        fact: Fact,
        issuer_public_key: Ed25519PublicKey,
        now: datetime,
    ) -> FactStatus:
        """bad-signature dominates, then revoked, then expired, else valid."""
        if not signature_valid(issuer_public_key, fact):
            return FactStatus.BAD_SIGNATURE
        if fact.hash_hex in self._revocations:
            return FactStatus.REVOKED
        if fact.expires_at is not None and now > fact.expires_at:
            return FactStatus.EXPIRED
        return FactStatus.VALID

    # -- revocation ---------------------------------------------------

    def revoke(self, fact_hash_hex: str, reason: str, now: datetime) -> RevocationEntry:
        with self._lock:
            if fact_hash_hex not in self._facts:
                raise NotFound(f"unknown fact hash {fact_hash_hex}")
            if fact_hash_hex in self._revocations:
                raise AlreadyRevoked(fact_hash_hex)
            entry = RevocationEntry(fact_hash_hex, now, reason)
            self._revocations[fact_hash_hex] = entry
            if self._revocation_path:
                with self._revocation_path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(entry.to_dict(), sort_keys=True) + "\n")
            return entry

    # -- queries ------------------------------------------------------

    def get(self, fact_hash_hex: str) -> Fact:
        try:
            return self._facts[fact_hash_hex]
        except KeyError:
            raise NotFound(f"unknown fact hash {fact_hash_hex}") from None

    def for_subject(self, subject: str) -> list[Fact]:
        return [f for f in self._facts.values() if f.subject == subject]

    def revocations(self) -> list[RevocationEntry]:
        return sorted(self._revocations.values(), key=lambda e: e.revoked_at)

    def is_revoked(self, fact_hash_hex: str) -> bool:
        return fact_hash_hex in self._revocations
