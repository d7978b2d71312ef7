"""Notary review workflow: approve/reject extractions, sign, anchor.

An approved review carries a detached Ed25519 signature over the document
hash concatenated with the canonical metadata (notary id, corrections,
decision time); the SHA-256 of that signature is anchored so third parties
can cross-verify the interaction without seeing any content.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime
from enum import Enum

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from ..clock import isoformat_utc
from ..errors import NotFound, StateViolation
from ..facts.model import canonical_json
from .entries import KIND_NOTARY_SIGNATURE, new_entry
from .ledger import Ledger


class ReviewStatus(str, Enum):
    AWAITING = "awaiting"
    STARTED = "started"
    APPROVED = "approved"
    REJECTED = "rejected"


@dataclass(frozen=True)
class NotarizationRecord:
    document_id: str
    document_hash: str
    notary_id: str
    status: ReviewStatus
    corrections: dict[str, str] = field(default_factory=dict)
    signature: bytes = b""
    reason: str = ""
    decided_at: datetime | None = None

    def metadata(self) -> dict:
        return {
            "document_id": self.document_id,
            "notary_id": self.notary_id,
            "corrections": dict(sorted(self.corrections.items())),
            "decided_at": isoformat_utc(self.decided_at) if self.decided_at else None,
        }


def signing_message(document_hash: str, metadata: dict) -> bytes:
    return document_hash.encode("ascii") + canonical_json(metadata)


def signature_valid(record: NotarizationRecord, public_key: Ed25519PublicKey) -> bool:
    if record.status is not ReviewStatus.APPROVED or not record.signature:
        return False
    try:
        public_key.verify(
            record.signature, signing_message(record.document_hash, record.metadata())
        )
        return True
    except InvalidSignature:
        return False


@dataclass(frozen=True)
class Decision:
    approve: bool
    corrections: dict[str, str] = field(default_factory=dict)
    reason: str = ""


class NotaryService:
    """Review queue keyed by document id."""

    def __init__(self, ledger: Ledger, clock):
        self._ledger = ledger
        self._clock = clock
        self._records: dict[str, NotarizationRecord] = {}
        self._extractions: dict[str, dict] = {}
        self._lock = threading.Lock()

    def open_review(self, document_id: str, document_hash: str, extraction: dict) -> NotarizationRecord:
        with self._lock:
            record = NotarizationRecord(
                document_id=document_id,
                document_hash=document_hash,
                notary_id="",
                status=ReviewStatus.AWAITING,
            )
            self._records[document_id] = record
            self._extractions[document_id] = extraction
            return record

    def start(self, document_id: str, notary_id: str) -> NotarizationRecord:
        with self._lock:
            record = self._get(document_id)
            if record.status is not ReviewStatus.AWAITING:
                raise StateViolation(
                    f"review for {document_id} is {record.status.value}, not awaiting"
                )
            record = replace(record, status=ReviewStatus.STARTED, notary_id=notary_id)
            self._records[document_id] = record
            return record

    def notarize(
        self,
        document_id: str,
        notary_key: Ed25519PrivateKey,
        decision: Decision,
        notary_id: str = "",
    ) -> NotarizationRecord:
        """Decide a review that is awaiting or started."""
        with self._lock:
            record = self._get(document_id)
            if record.status not in (ReviewStatus.AWAITING, ReviewStatus.STARTED):
                raise StateViolation(
                    f"review for {document_id} already {record.status.value}"
                )
            now = self._clock.now()
            record = replace(
                record,
                notary_id=notary_id or record.notary_id,
                corrections=dict(decision.corrections),
                reason=decision.reason,
                decided_at=now,
            )
            if not decision.approve:
                record = replace(record, status=ReviewStatus.REJECTED)
                self._records[document_id] = record
                return record
            signature = notary_key.sign(
                signing_message(record.document_hash, record.metadata())
            )
            record = replace(record, status=ReviewStatus.APPROVED, signature=signature)
            self._records[document_id] = record
        entry = new_entry(
            KIND_NOTARY_SIGNATURE,
            hashlib.sha256(signature).hexdigest(),
            submitter=record.notary_id or "notary",
            submitted_at=self._clock.now(),
        )
        self._ledger.submit(entry)
        return record

    def corrected_fields(self, document_id: str, extracted: dict[str, str]) -> dict[str, str]:
        """Extractor output with notary corrections applied on top."""
        record = self._get(document_id)
        merged = dict(extracted)
        merged.update(record.corrections)
        return merged

    def record_for(self, document_id: str) -> NotarizationRecord:
        return self._get(document_id)

    def queue(self) -> list[NotarizationRecord]:
        with self._lock:
            return [
                r
                for r in self._records.values()
                if r.status in (ReviewStatus.AWAITING, ReviewStatus.STARTED)
            ]

    def extraction_for(self, document_id: str) -> dict:
        with self._lock:
            return self._extractions.get(document_id, {})

    def _get(self, document_id: str) -> NotarizationRecord:
        record = self._records.get(document_id)
        if record is None:
            raise NotFound(f"no review for document {document_id}")
        return record
