"""Hash-chained anchor ledger: submit, seal, verify, prove.

Block hash construction (normative):

    entry_digest = SHA-256(canonical JSON of the entry record)
    block_hash   = SHA-256( u64be(index) || prev_hash (32 bytes)
                            || i64be(epoch_millis) || entry_digest* )

Genesis has index 0 and a 32-zero-byte prev_hash.  The chain file is a
sequence of length-delimited binary records, one per block:

    u64be index | 32B prev_hash | i64be epoch_millis | u32be entry_count
    | entry_count * (u32be length | canonical JSON bytes) | 32B block_hash

The trailing stored block hash lets verification attribute a corrupted byte
to the exact block that contains it (the linkage check alone could only
implicate the successor).
"""

from __future__ import annotations

import hashlib
import json
import struct
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from ..clock import SystemClock
from ..errors import InvalidInput, NotFound
from ..facts.model import canonical_json
from .entries import AnchorEntry

GENESIS_PREV = bytes(32)
DEFAULT_BATCH_CAP = 256
SEAL_INTERVAL_SECONDS = 0.5
_MAX_REASONABLE = 1_000_000


def entry_digest(entry_record: dict) -> bytes:
    return hashlib.sha256(canonical_json(entry_record)).digest()


def _epoch_millis(ts: datetime) -> int:
    return int(ts.timestamp() * 1000)


def compute_block_hash(index: int, prev_hash: bytes, ts_millis: int, digests: Sequence[bytes]) -> bytes:
    h = hashlib.sha256()
    h.update(struct.pack(">Q", index))
    h.update(prev_hash)
    h.update(struct.pack(">q", ts_millis))
    for d in digests:
        h.update(d)
    return h.digest()


@dataclass(frozen=True)
class AnchorBlock:
    index: int
    prev_hash: bytes
    timestamp_millis: int
    entries: tuple[AnchorEntry, ...]
    block_hash: bytes

    @property
    def timestamp(self) -> datetime:
        return datetime.fromtimestamp(self.timestamp_millis / 1000, tz=timezone.utc)

    def entry_digests(self) -> list[bytes]:
        return [entry_digest(e.to_record()) for e in self.entries]

    def recompute_hash(self) -> bytes:
        return compute_block_hash(
            self.index, self.prev_hash, self.timestamp_millis, self.entry_digests()
        )


def seal(
    pending: Sequence[AnchorEntry],
    chain_head: AnchorBlock | None,
    timestamp: datetime,
    batch_cap: int = DEFAULT_BATCH_CAP,
) -> AnchorBlock:
    """Deterministically seal up to ``batch_cap`` entries into the next block."""
    taken = tuple(pending[:batch_cap])
    index = 0 if chain_head is None else chain_head.index + 1
    prev = GENESIS_PREV if chain_head is None else chain_head.block_hash
    millis = _epoch_millis(timestamp)
    digests = [entry_digest(e.to_record()) for e in taken]
    return AnchorBlock(
        index=index,
        prev_hash=prev,
        timestamp_millis=millis,
        entries=taken,
        block_hash=compute_block_hash(index, prev, millis, digests),
    )


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    first_bad_block: int | None = None
    reason: str = ""


def verify_chain(chain: Sequence[AnchorBlock]) -> VerifyResult:
    """Recompute every hash and linkage; report the earliest violation."""
    prev: AnchorBlock | None = None
    for position, block in enumerate(chain):
        if block.index != position:
            return VerifyResult(False, position, "index does not match position")
        expected_prev = GENESIS_PREV if position == 0 else prev.block_hash
        if block.prev_hash != expected_prev:
            return VerifyResult(False, position, "previous-hash linkage broken")
        if block.recompute_hash() != block.block_hash:
            return VerifyResult(False, position, "stored hash does not match contents")
        prev = block
    return VerifyResult(True)


@dataclass(frozen=True)
class InclusionProof:
    """Self-contained proof: block header fields plus all entry digests."""

    block_index: int
    entry_position: int
    prev_hash: bytes
    timestamp_millis: int
    entry_digests: tuple[bytes, ...]
    block_hash: bytes

    def to_dict(self) -> dict:
        return {
            "block_index": self.block_index,
            "entry_position": self.entry_position,
            "prev_hash": self.prev_hash.hex(),
            "timestamp_millis": self.timestamp_millis,
            "entry_digests": [d.hex() for d in self.entry_digests],
            "block_hash": self.block_hash.hex(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InclusionProof":
        return cls(
            block_index=int(d["block_index"]),
            entry_position=int(d["entry_position"]),
            prev_hash=bytes.fromhex(d["prev_hash"]),
            timestamp_millis=int(d["timestamp_millis"]),
            entry_digests=tuple(bytes.fromhex(x) for x in d["entry_digests"]),
            block_hash=bytes.fromhex(d["block_hash"]),
        )


def verify_inclusion(proof: InclusionProof, entry_record: dict) -> bool:
    """Third-party check: the entry hashes into the proof's block hash."""
    if not 0 <= proof.entry_position < len(proof.entry_digests):
        return False
    if entry_digest(entry_record) != proof.entry_digests[proof.entry_position]:
        return False
    recomputed = compute_block_hash(
        proof.block_index, proof.prev_hash, proof.timestamp_millis, proof.entry_digests
    )
    return recomputed == proof.block_hash


@dataclass(frozen=True)
class Receipt:
    entry_id: str
    pending_block_index: int


class ChainParseError(Exception):
    def __init__(self, block_index: int, message: str):
        self.block_index = block_index
        super().__init__(f"block {block_index}: {message}")


def serialize_block(block: AnchorBlock) -> bytes:
    out = bytearray()
    out += struct.pack(">Q", block.index)
    out += block.prev_hash
    out += struct.pack(">q", block.timestamp_millis)
    out += struct.pack(">I", len(block.entries))
    for e in block.entries:
        raw = canonical_json(e.to_record())
        out += struct.pack(">I", len(raw))
        out += raw
    out += block.block_hash
    return bytes(out)


def _parse_one(raw: bytes, offset: int, position: int) -> tuple[AnchorBlock, int]:
    total = len(raw)
    try:
        if offset + 52 > total:
            raise ValueError("truncated header")
        index, = struct.unpack_from(">Q", raw, offset)
        offset += 8
        prev_hash = raw[offset : offset + 32]
        offset += 32
        millis, = struct.unpack_from(">q", raw, offset)
        offset += 8
        count, = struct.unpack_from(">I", raw, offset)
        offset += 4
        if count > _MAX_REASONABLE:
            raise ValueError("implausible entry count")
        entries = []
        for _ in range(count):
            if offset + 4 > total:
                raise ValueError("truncated entry length")
            length, = struct.unpack_from(">I", raw, offset)
            offset += 4
            if length > total - offset:
                raise ValueError("entry length exceeds file")
            blob = raw[offset : offset + length]
            offset += length
            entries.append(AnchorEntry.from_record(json.loads(blob)))
        if offset + 32 > total:
            raise ValueError("truncated block hash")
        block_hash = raw[offset : offset + 32]
        offset += 32
    except (ValueError, KeyError, TypeError, UnicodeDecodeError, InvalidInput) as exc:
        raise ChainParseError(position, str(exc)) from exc
    block = AnchorBlock(
        index=index,
        prev_hash=prev_hash,
        timestamp_millis=millis,
        entries=tuple(entries),
        block_hash=block_hash,
    )
    return block, offset


def deserialize_chain(raw: bytes) -> list[AnchorBlock]:
    """Parse a chain file; corrupted framing raises ``ChainParseError`` with
    the index of the block being parsed."""
    blocks: list[AnchorBlock] = []
    offset = 0
    while offset < len(raw):
        block, offset = _parse_one(raw, offset, len(blocks))
        blocks.append(block)
    return blocks


def verify_chain_bytes(raw: bytes) -> VerifyResult:
    """Parse and verify block by block so a corrupt byte is always
    attributed to the block that contains it: a framing error in block k
    must not masquerade as a parse failure of block k+1."""
    offset = 0
    position = 0
    prev: AnchorBlock | None = None
    while offset < len(raw):
        try:
            block, offset = _parse_one(raw, offset, position)
        except ChainParseError as exc:
            return VerifyResult(False, exc.block_index, f"unparseable: {exc}")
        if block.index != position:
            return VerifyResult(False, position, "index does not match position")
        expected_prev = GENESIS_PREV if position == 0 else prev.block_hash
        if block.prev_hash != expected_prev:
            return VerifyResult(False, position, "previous-hash linkage broken")
        if block.recompute_hash() != block.block_hash:
            return VerifyResult(False, position, "stored hash does not match contents")
        prev = block
        position += 1
    return VerifyResult(True)


class Ledger:
    """Single-sealer ledger emulation with optional file persistence.

    ``submit`` is safe from any thread; sealing happens on one writer.  A
    fresh ledger seals an empty genesis block immediately so submitted
    entries land in block 1 onwards.
    """

    def __init__(
        self,
        path: str | Path | None = None,
        clock=None,
        batch_cap: int = DEFAULT_BATCH_CAP,
    ):
        self.clock = clock or SystemClock()
        self.batch_cap = batch_cap
        self._path = Path(path) if path else None
        self._lock = threading.Lock()
        self._pending: list[AnchorEntry] = []
        self._blocks: list[AnchorBlock] = []
        self._by_hash: dict[str, tuple[int, int]] = {}
        if self._path and self._path.exists() and self._path.stat().st_size:
            self._blocks = deserialize_chain(self._path.read_bytes())
            for b in self._blocks:
                for pos, e in enumerate(b.entries):
                    self._by_hash.setdefault(e.content_hash, (b.index, pos))
        if not self._blocks:
            self._seal_locked()  # genesis

    # -- write side -----------------------------------------------------

    def submit(self, entry: AnchorEntry) -> Receipt:
        """Queue an entry for the next block."""
        if not isinstance(entry, AnchorEntry):
            raise InvalidInput("submit expects an AnchorEntry")
        with self._lock:
            self._pending.append(entry)
            return Receipt(entry_id=entry.entry_id, pending_block_index=len(self._blocks))

    def submit_fact_hash(self, hex_digest: str, submitter: str = "fact-collector") -> Receipt:
        from .entries import KIND_FACT, new_entry

        entry = new_entry(KIND_FACT, hex_digest, submitter, self.clock.now())
        return self.submit(entry)

    def seal_pending(self) -> AnchorBlock:
        """Seal one block from the queue (empty blocks are allowed)."""
        with self._lock:
            return self._seal_locked()

    def _seal_locked(self) -> AnchorBlock:
        head = self._blocks[-1] if self._blocks else None
        block = seal(self._pending, head, self.clock.now(), self.batch_cap)
        del self._pending[: len(block.entries)]
        self._blocks.append(block)
        for pos, e in enumerate(block.entries):
            self._by_hash.setdefault(e.content_hash, (block.index, pos))
        if self._path:
            with self._path.open("ab") as fh:
                fh.write(serialize_block(block))
        return block

    def seal_all(self) -> list[AnchorBlock]:
        """Drain the whole queue, sealing as many blocks as the cap requires."""
        sealed = []
        while True:
            with self._lock:
                if not self._pending:
                    break
                sealed.append(self._seal_locked())
        return sealed

    # -- read side ------------------------------------------------------

    @property
    def blocks(self) -> list[AnchorBlock]:
        with self._lock:
            return list(self._blocks)

    @property
    def head(self) -> AnchorBlock:
        with self._lock:
            return self._blocks[-1]

    def pending_count(self) -> int:
        with self._lock:
            return len(self._pending)

    def verify(self) -> VerifyResult:
        return verify_chain(self.blocks)

    def find(self, content_hash: str) -> tuple[AnchorBlock, int] | None:
        with self._lock:
            hit = self._by_hash.get(content_hash)
            if hit is None:
                return None
            index, pos = hit
            return self._blocks[index], pos

    def prove_inclusion(self, content_hash: str) -> InclusionProof:
        hit = self.find(content_hash)
        if hit is None:
            raise NotFound(f"hash {content_hash} is not anchored")
        block, pos = hit
        return InclusionProof(
            block_index=block.index,
            entry_position=pos,
            prev_hash=block.prev_hash,
            timestamp_millis=block.timestamp_millis,
            entry_digests=tuple(block.entry_digests()),
            block_hash=block.block_hash,
        )

    def entry_at(self, block_index: int, position: int) -> AnchorEntry:
        with self._lock:
            return self._blocks[block_index].entries[position]
