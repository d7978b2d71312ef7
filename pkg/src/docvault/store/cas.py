"""Content-addressed blob store: identity equals content.

Ids are ``sha256-`` + lowercase hex of the blob's SHA-256.  Puts are
idempotent (a racing duplicate put resolves to the same object) and reads
re-hash the bytes so on-disk tampering surfaces as a corruption error.
"""

from __future__ import annotations

import hashlib
import os
from pathlib import Path

from ..errors import CorruptionError, InvalidInput, IoError, NotFound

PREFIX = "sha256-"


def content_id(blob: bytes) -> str:
    return PREFIX + hashlib.sha256(blob).hexdigest()


def is_content_id(text: str) -> bool:
    if not text.startswith(PREFIX):
        return False
    digest = text[len(PREFIX) :]
    return len(digest) == 64 and all(c in "0123456789abcdef" for c in digest)


class ContentStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, cid: str) -> Path:
        if not is_content_id(cid):
            raise InvalidInput(f"not a content id: {cid!r}")
        return self.root / cid

    def put(self, blob: bytes) -> str:
        """Store bytes, return their id; re-putting identical bytes is free."""
        cid = content_id(blob)
        path = self._path(cid)
        if path.exists():
            return cid
        tmp = path.with_suffix(".tmp." + os.urandom(4).hex())
        try:
            tmp.write_bytes(blob)
            os.replace(tmp, path)
        except OSError as exc:
            tmp.unlink(missing_ok=True)
            raise IoError(f"cannot store blob: {exc}") from exc
        return cid

    def get(self, cid: str) -> bytes:
        """Fetch and verify; digest mismatch means the file was tampered."""
        path = self._path(cid)
        if not path.exists():
            raise NotFound(f"no object {cid}")
        blob = path.read_bytes()
        if content_id(blob) != cid:
            raise CorruptionError(f"stored bytes no longer hash to {cid}")
        return blob

    def exists(self, cid: str) -> bool:
        return self._path(cid).exists()

    def ids(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir() if is_content_id(p.name))
