"""Relational metadata store on embedded SQLite.

Schema lives in versioned migration files applied in order at startup.  The
store is engine-agnostic by construction: plain SQL, no ORM.  All access
funnels through one lock-guarded connection, which also makes the share
counter's compare-and-increment atomic under any interleaving.
"""

from __future__ import annotations

import hashlib
import json
import os
import sqlite3
import threading
import uuid
from importlib import resources
from pathlib import Path

from ..clock import SystemClock, isoformat_utc
from ..errors import InvalidInput, NotFound, Unauthorized


def _hash_password(password: str, salt: bytes) -> str:
    return hashlib.scrypt(password.encode(), salt=salt, n=2**14, r=8, p=1).hex()


def _hash_token(secret: str) -> str:
    return hashlib.sha256(secret.encode()).hexdigest()


class MetadataStore:
    def __init__(self, path: str | Path, clock=None):
        self._clock = clock or SystemClock()
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(str(path), check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA foreign_keys = ON")
        self._migrate()

    def _migrate(self) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "CREATE TABLE IF NOT EXISTS schema_version (version INTEGER NOT NULL)"
            )
            row = self._conn.execute("SELECT MAX(version) AS v FROM schema_version").fetchone()
            current = row["v"] or 0
            migration_dir = resources.files("docvault.store").joinpath("migrations")
            scripts = sorted(
                (f.name, f) for f in migration_dir.iterdir() if f.name.endswith(".sql")
            )
            for name, ref in scripts:
                version = int(name.split("_")[0])
                if version > current:
                    self._conn.executescript(ref.read_text(encoding="utf-8"))
                    self._conn.execute(
                        "INSERT INTO schema_version (version) VALUES (?)", (version,)
                    )

    def _now(self) -> str:
        return isoformat_utc(self._clock.now())

    def close(self) -> None:
        self._conn.close()

    # -- users and tokens -------------------------------------------------

    def create_user(self, username: str, password: str, role: str = "owner") -> str:
        user_id = str(uuid.uuid4())
        salt = os.urandom(16)
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO users (id, username, password_hash, password_salt, role, created_at)"
                " VALUES (?, ?, ?, ?, ?, ?)",
                (user_id, username, _hash_password(password, salt), salt.hex(), role, self._now()),
            )
        return user_id

    def verify_login(self, username: str, password: str) -> str:
        with self._lock:
            row = self._conn.execute(
                "SELECT id, password_hash, password_salt FROM users WHERE username = ?",
                (username,),
            ).fetchone()
        if row is None:
            raise Unauthorized("unknown user or wrong password")
        if _hash_password(password, bytes.fromhex(row["password_salt"])) != row["password_hash"]:
            raise Unauthorized("unknown user or wrong password")
        return row["id"]

    def issue_token(self, user_id: str, scopes: set[str]) -> str:
        secret = uuid.uuid4().hex + uuid.uuid4().hex
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO tokens (token_hash, user_id, scopes, created_at) VALUES (?, ?, ?, ?)",
                (_hash_token(secret), user_id, json.dumps(sorted(scopes)), self._now()),
            )
        return secret

    def resolve_token(self, secret: str) -> tuple[str, set[str]]:
        with self._lock:
            row = self._conn.execute(
                "SELECT user_id, scopes FROM tokens WHERE token_hash = ?",
                (_hash_token(secret),),
            ).fetchone()
        if row is None:
            raise Unauthorized("unknown token")
        return row["user_id"], set(json.loads(row["scopes"]))

    def user_role(self, user_id: str) -> str:
        with self._lock:
            row = self._conn.execute("SELECT role FROM users WHERE id = ?", (user_id,)).fetchone()
        if row is None:
            raise NotFound("unknown user")
        return row["role"]

    # -- documents ---------------------------------------------------------

    def create_document(self, owner_id: str, description: str, state: str) -> str:
        document_id = str(uuid.uuid4())
        now = self._now()
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO documents (id, owner_id, description, state, created_at, updated_at)"
                " VALUES (?, ?, ?, ?, ?, ?)",
                (document_id, owner_id, description, state, now, now),
            )
        return document_id

    def document(self, document_id: str) -> dict:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM documents WHERE id = ?", (document_id,)
            ).fetchone()
        if row is None:
            raise NotFound(f"unknown document {document_id}")
        return dict(row)

    def documents_for(self, owner_id: str) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM documents WHERE owner_id = ? ORDER BY created_at", (owner_id,)
            ).fetchall()
        return [dict(r) for r in rows]

    def document_by_content_id(self, content_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM documents WHERE content_id = ?", (content_id,)
            ).fetchone()
        return dict(row) if row else None

    def notary_public_key(self, user_id: str) -> str | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT public_key FROM notaries WHERE user_id = ?", (user_id,)
            ).fetchone()
        return row["public_key"] if row else None

    def set_document_state(self, document_id: str, from_state: str, to_state: str) -> None:
        """Optimistic transition: fails if the row is not in ``from_state``."""
        with self._lock, self._conn:
            cursor = self._conn.execute(
                "UPDATE documents SET state = ?, updated_at = ? WHERE id = ? AND state = ?",
                (to_state, self._now(), document_id, from_state),
            )
            if cursor.rowcount != 1:
                raise InvalidInput(
                    f"document {document_id} is not in state {from_state}"
                )
            self._conn.execute(
                "INSERT INTO state_transitions (document_id, from_state, to_state, at)"
                " VALUES (?, ?, ?, ?)",
                (document_id, from_state, to_state, self._now()),
            )

    def update_document(self, document_id: str, **columns) -> None:
        allowed = {"document_type", "content_id", "original_hash", "anchor_block", "notary_sig_hash"}
        bad = set(columns) - allowed
        if bad:
            raise InvalidInput(f"cannot update columns {bad}")
        sets = ", ".join(f"{c} = ?" for c in columns)
        with self._lock, self._conn:
            self._conn.execute(
                f"UPDATE documents SET {sets}, updated_at = ? WHERE id = ?",
                (*columns.values(), self._now(), document_id),
            )

    def transitions(self, document_id: str) -> list[tuple[str, str]]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT from_state, to_state FROM state_transitions WHERE document_id = ? ORDER BY id",
                (document_id,),
            ).fetchall()
        return [(r["from_state"], r["to_state"]) for r in rows]

    # -- pages, fields, zones ----------------------------------------------

    def save_extraction(self, document_id: str, result) -> None:
        """Persist pages and fields; sensitive values are stored as NULL."""
        with self._lock, self._conn:
            for index, page in enumerate(result.pages):
                self._conn.execute(
                    "INSERT OR REPLACE INTO pages (id, document_id, page_index) VALUES (?, ?, ?)",
                    (page.id, document_id, index),
                )
                for f in page.fields:
                    r = f.coordinates
                    self._conn.execute(
                        "INSERT INTO fields (page_id, name, text, sensitive, confidence,"
                        " start_x, start_y, end_x, end_y) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
                        (
                            page.id,
                            f.name,
                            None if f.sensitive else f.text,
                            int(f.sensitive),
                            f.confidence_score,
                            r.start_x,
                            r.start_y,
                            r.end_x,
                            r.end_y,
                        ),
                    )

    def fields_for(self, document_id: str) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT f.* FROM fields f JOIN pages p ON f.page_id = p.id"
                " WHERE p.document_id = ? ORDER BY f.id",
                (document_id,),
            ).fetchall()
        return [dict(r) for r in rows]

    def save_zones(self, document_id: str, zones: list[dict]) -> None:
        with self._lock, self._conn:
            for z in zones:
                self._conn.execute(
                    "INSERT OR REPLACE INTO zones (document_id, zone_id, name,"
                    " start_x, start_y, end_x, end_y, pruned) VALUES (?, ?, ?, ?, ?, ?, ?, 0)",
                    (
                        document_id,
                        z["zone_id"],
                        z["name"],
                        z["start_x"],
                        z["start_y"],
                        z["end_x"],
                        z["end_y"],
                    ),
                )

    def zones_for(self, document_id: str) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM zones WHERE document_id = ? ORDER BY zone_id", (document_id,)
            ).fetchall()
        return [dict(r) for r in rows]

    def mark_zones_pruned(self, document_id: str, zone_ids: set[int]) -> None:
        with self._lock, self._conn:
            for zone_id in zone_ids:
                self._conn.execute(
                    "UPDATE zones SET pruned = 1 WHERE document_id = ? AND zone_id = ?",
                    (document_id, zone_id),
                )

    # -- notaries ------------------------------------------------------------

    def register_notary(self, user_id: str, public_key_hex: str) -> str:
        notary_id = str(uuid.uuid4())
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO notaries (id, user_id, public_key) VALUES (?, ?, ?)",
                (notary_id, user_id, public_key_hex),
            )
        return notary_id

    def assign_notary(self, document_id: str, notary_id: str) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT OR IGNORE INTO document_notaries (document_id, notary_id, assigned_at)"
                " VALUES (?, ?, ?)",
                (document_id, notary_id, self._now()),
            )

    # -- shares -------------------------------------------------------------

    def create_share(
        self,
        document_id: str,
        zone_ids: list[int],
        mode: str,
        until_ts: str | None,
        max_accesses: int | None,
    ) -> str:
        share_uuid = str(uuid.uuid4())
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO shares (uuid, document_id, zone_ids, mode, until_ts,"
                " max_accesses, created_at) VALUES (?, ?, ?, ?, ?, ?, ?)",
                (
                    share_uuid,
                    document_id,
                    json.dumps(sorted(zone_ids)),
                    mode,
                    until_ts,
                    max_accesses,
                    self._now(),
                ),
            )
        return share_uuid

    def share(self, share_uuid: str) -> dict:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM shares WHERE uuid = ?", (share_uuid,)
            ).fetchone()
        if row is None:
            raise NotFound(f"unknown share {share_uuid}")
        d = dict(row)
        d["zone_ids"] = json.loads(d["zone_ids"])
        return d

    def shares_for(self, document_id: str) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM shares WHERE document_id = ? ORDER BY created_at",
                (document_id,),
            ).fetchall()
        out = []
        for r in rows:
            d = dict(r)
            d["zone_ids"] = json.loads(d["zone_ids"])
            out.append(d)
        return out

    def try_consume_access(self, share_uuid: str) -> bool:
        """Atomic compare-and-increment against max_accesses."""
        with self._lock, self._conn:
            cursor = self._conn.execute(
                "UPDATE shares SET accesses_used = accesses_used + 1"
                " WHERE uuid = ? AND active = 1"
                " AND (max_accesses IS NULL OR accesses_used < max_accesses)",
                (share_uuid,),
            )
            return cursor.rowcount == 1

    def deactivate_share(self, share_uuid: str) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "UPDATE shares SET active = 0 WHERE uuid = ?", (share_uuid,)
            )

    # -- templates and audit --------------------------------------------------

    def save_template(self, template_id: str, name: str, manifest: dict) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO templates (id, name, manifest, created_at) VALUES (?, ?, ?, ?)",
                (template_id, name, json.dumps(manifest), self._now()),
            )

    def audit(self, actor: str, action: str, subject: str) -> None:
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO audit_events (actor, action, subject, created_at) VALUES (?, ?, ?, ?)",
                (actor, action, subject, self._now()),
            )
