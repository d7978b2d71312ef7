"""Notary workflow plus a hash-chained, tamper-evident anchor ledger."""

from .entries import (
    AnchorEntry,
    KIND_DOCUMENT,
    KIND_FACT,
    KIND_NOTARY_SIGNATURE,
    Member,
    decrypt_private_payload,
    encrypt_private_payload,
    new_entry,
)
from .harness import HarnessReport, run_load
from .ledger import (
    AnchorBlock,
    ChainParseError,
    InclusionProof,
    Ledger,
    Receipt,
    VerifyResult,
    compute_block_hash,
    deserialize_chain,
    entry_digest,
    seal,
    serialize_block,
    verify_chain,
    verify_chain_bytes,
    verify_inclusion,
)
from .notary import (
    Decision,
    NotarizationRecord,
    NotaryService,
    ReviewStatus,
    signature_valid,
    signing_message,
)

__all__ = [
    "AnchorBlock",
    "AnchorEntry",
    "ChainParseError",
    "Decision",
    "HarnessReport",
    "InclusionProof",
    "KIND_DOCUMENT",
    "KIND_FACT",
    "KIND_NOTARY_SIGNATURE",
    "Ledger",
    "Member",
    "NotarizationRecord",
    "NotaryService",
    "Receipt",
    "ReviewStatus",
    "VerifyResult",
    "compute_block_hash",
    "decrypt_private_payload",
    "deserialize_chain",
    "encrypt_private_payload",
    "entry_digest",
    "new_entry",
    "run_load",
    "seal",
    "serialize_block",
    "signature_valid",
    "signing_message",
    "verify_chain",
    "verify_chain_bytes",
    "verify_inclusion",
]
