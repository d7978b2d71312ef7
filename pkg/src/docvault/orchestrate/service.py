"""The document lifecycle service: wiring for every subsystem.

One workflow executor runs per document (no intra-document parallelism);
cross-document jobs go through a bounded pool.  Steps are idempotent and
retried with exponential backoff up to a cap, after which the document
fails.  Raw upload bytes and extracted sensitive values live only in the
in-memory job record and are purged at terminal states; what survives a
completed run is the obfuscated blob (CAS), the master key (keystore,
encrypted), hashes and public facts (ledger), and redacted metadata (SQL).
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime

from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.asymmetric.x25519 import X25519PrivateKey

from ..anchor import (
    Decision,
    KIND_DOCUMENT,
    Ledger,
    Member,
    NotaryService,
    ReviewStatus,
    new_entry,
)
from ..anchor.notary import signature_valid as notary_signature_valid
from ..clock import SystemClock, isoformat_utc, parse_utc
from ..errors import (
    DocVaultError,
    InvalidInput,
    NotFound,
    StateViolation,
    Unauthorized,
)
from ..extract import GlyphOcr, TemplateRegistry, extract
from ..extract.model import FieldSpec
from ..facts import FactRegistry, derive_facts
from ..facts.model import canonical_json
from ..imaging import RasterImage, Rect
from ..obfuscate import (
    LayerSpec,
    MasterKey,
    NullFaceDetector,
    ZoneSpec,
    derive_root,
    obfuscate,
    deobfuscate,
    prune,
)
from ..store import ContentStore, KeyStore, MetadataStore, PinningClient, Token
from ..store.keystore import master_key_from_env
from ..store.pinning import HttpxTransport, LoopbackTransport
from .config import AppConfig
from .states import DocumentState, check_transition, is_terminal

logger = logging.getLogger(__name__)

_S = DocumentState


@dataclass
class WorkflowJob:
    """Transient per-document work record; holds the only copy of raw bytes."""

    document_id: str
    owner_id: str
    attempts: int = 0
    step_attempts: dict = field(default_factory=dict)
    last_error: str = ""
    next_retry_at: datetime | None = None
    # transient payload, purged at terminal states
    image: RasterImage | None = None
    upload_bytes: bytes | None = None
    extraction: object = None

    def purge_payload(self):
        self.image = None
        self.upload_bytes = None
        self.extraction = None


@dataclass(frozen=True)
class ShareView:
    uuid: str
    image_png_b64: str
    revealed_zones: list[dict]
    field_names: list[str]
    facts: list[dict]
    content_id: str
    anchor_proof: dict
    document_type: str

    def to_dict(self) -> dict:
        return dict(vars(self))


class DocumentService:
    def __init__(
        self,
        config: AppConfig,
        *,
        clock=None,
        ocr=None,
        face_detector=None,
        pinning: PinningClient | None = None,
        template_registry: TemplateRegistry | None = None,
    ):
        self.config = config
        self.clock = clock or SystemClock()
        data = config.data_path
        data.mkdir(parents=True, exist_ok=True)
        if config.log_file:
            handler = logging.FileHandler(config.log_file)
            handler.setFormatter(logging.Formatter("%(asctime)s %(name)s %(message)s"))
            logging.getLogger("docvault").addHandler(handler)
            logging.getLogger("docvault").setLevel(logging.INFO)

        self.db = MetadataStore(data / "metadata.sqlite3", clock=self.clock)
        self.cas = ContentStore(data / "cas")
        self.keystore = KeyStore(
            data / "keystore.json",
            self._master_key(),
            audit_path=data / "keystore.audit.jsonl",
            clock=self.clock,
        )
        self.ledger = Ledger(
            data / "chain.bin", clock=self.clock, batch_cap=config.ledger_batch_cap
        )
        self.notary = NotaryService(self.ledger, self.clock)
        self.facts = FactRegistry(data / "revocations.jsonl")
        self.registry = template_registry or TemplateRegistry()
        self.ocr = ocr or GlyphOcr()
        self.face_detector = face_detector or NullFaceDetector()
        self.pinning = pinning or PinningClient(
            base_url=config.pinning_url,
            token=config.pinning_token,
            transport=LoopbackTransport() if config.pinning_offline else HttpxTransport(),
        )

        self._service_token = Token.make("service", "read", "write", "admin")
        self._signer = self._load_or_create_signer()
        self._chain_member, self._chain_member_key = self._load_or_create_member()
        self._jobs: dict[str, WorkflowJob] = {}
        self._idempotency: dict[str, str] = {}
        self._lock = threading.RLock()
        self._pool = ThreadPoolExecutor(max_workers=4, thread_name_prefix="workflow")

    # -- bootstrap ----------------------------------------------------------

    def _master_key(self) -> bytes:
        if self.config.keystore_key:
            raw = self.config.keystore_key
            if len(raw) == 64 and all(c in "0123456789abcdef" for c in raw.lower()):
                return bytes.fromhex(raw)
            return hashlib.pbkdf2_hmac("sha256", raw.encode(), b"docvault-keystore", 200_000)
        try:
            return master_key_from_env()
        except InvalidInput:
            import os

            return os.urandom(32)

    def _load_or_create_signer(self) -> Ed25519PrivateKey:
        path = "service/fact-signer"
        try:
            raw = self.keystore.get(path, self._service_token)
            return Ed25519PrivateKey.from_private_bytes(raw)
        except NotFound:
            key = Ed25519PrivateKey.generate()
            raw = key.private_bytes(
                serialization.Encoding.Raw,
                serialization.PrivateFormat.Raw,
                serialization.NoEncryption(),
            )
            self.keystore.put(path, raw, self._service_token, policy={"admin"})
            return key

    def _load_or_create_member(self) -> tuple[Member, X25519PrivateKey]:
        path = "service/chain-member"
        try:
            raw = self.keystore.get(path, self._service_token)
            key = X25519PrivateKey.from_private_bytes(raw)
        except NotFound:
            key = X25519PrivateKey.generate()
            raw = key.private_bytes(
                serialization.Encoding.Raw,
                serialization.PrivateFormat.Raw,
                serialization.NoEncryption(),
            )
            self.keystore.put(path, raw, self._service_token, policy={"admin"})
        return Member("service", key.public_key()), key

    @property
    def fact_public_key(self) -> Ed25519PublicKey:
        return self._signer.public_key()

    def close(self):
        self._pool.shutdown(wait=True)
        self.db.close()

    # -- users ---------------------------------------------------------------

    def register_user(self, username: str, password: str, role: str = "owner") -> str:
        if not username or not password:
            raise InvalidInput("username and password are required")
        user_id = self.db.create_user(username, password, role=role)
        import os

        salt = os.urandom(16)
        root = derive_root(password, salt, self.config.pbkdf2_iterations)
        self.keystore.put(
            f"users/{user_id}/root",
            salt + root,
            self._service_token,
            policy={"admin"},
        )
        if role == "notary":
            key = Ed25519PrivateKey.generate()
            raw = key.private_bytes(
                serialization.Encoding.Raw,
                serialization.PrivateFormat.Raw,
                serialization.NoEncryption(),
            )
            self.keystore.put(
                f"notaries/{user_id}/key", raw, self._service_token, policy={"admin"}
            )
            public_hex = key.public_key().public_bytes(
                serialization.Encoding.Raw, serialization.PublicFormat.Raw
            ).hex()
            self.db.register_notary(user_id, public_hex)
        logger.info("registered user %s role=%s", user_id, role)
        return user_id

    def login(self, username: str, password: str) -> str:
        user_id = self.db.verify_login(username, password)
        role = self.db.user_role(user_id)
        scopes = {"owner"} if role == "owner" else {role}
        return self.db.issue_token(user_id, scopes)

    def _auth(self, token: str, *required_scopes: str) -> str:
        user_id, scopes = self.db.resolve_token(token)
        if required_scopes and not scopes & set(required_scopes):
            raise Unauthorized(f"token lacks scopes {required_scopes}")
        return user_id

    # -- templates -------------------------------------------------------------

    def register_template(self, name: str, pages, manifest: dict | None = None):
        template = self.registry.register_template(name, pages, detector=self.face_detector)
        self.db.save_template(template.id, name, manifest or {"name": name})
        return template

    def register_template_from_manifest(self, manifest_path) -> str:
        """Load a JSON field-spec manifest plus its PNG pages from disk."""
        from pathlib import Path

        manifest_file = Path(manifest_path)
        manifest = json.loads(manifest_file.read_text())
        pages = []
        for page in manifest["pages"]:
            png = (manifest_file.parent / page["image"]).read_bytes()
            image = RasterImage.from_png(png)
            specs = [
                FieldSpec(
                    name=f["name"],
                    rect=Rect.from_dict(f["rect"]),
                    sensitive=bool(f["sensitive"]),
                    category=f["category"],
                )
                for f in page["fields"]
            ]
            pages.append((image, specs))
        template = self.register_template(manifest["name"], pages, manifest)
        return template.id

    # -- document lifecycle ------------------------------------------------------

    def create_document(
        self,
        token: str,
        upload_bytes: bytes,
        description: str,
        idempotency_token: str | None = None,
    ) -> dict:
        owner_id = self._auth(token, "owner", "admin")
        with self._lock:
            if idempotency_token and idempotency_token in self._idempotency:
                document_id = self._idempotency[idempotency_token]
                return self.document_view(document_id)
        image = RasterImage.from_png(upload_bytes)  # rejects garbage pre-persistence
        document_id = self.db.create_document(owner_id, description, _S.CREATED.value)
        job = WorkflowJob(
            document_id=document_id,
            owner_id=owner_id,
            image=image,
            upload_bytes=upload_bytes,
        )
        with self._lock:
            self._jobs[document_id] = job
            if idempotency_token:
                self._idempotency[idempotency_token] = document_id
        self.db.update_document(
            document_id, original_hash=hashlib.sha256(upload_bytes).hexdigest()
        )
        self._transition(document_id, _S.CREATED, _S.RECOGNITION_STARTED)
        logger.info("document %s created by %s", document_id, owner_id)
        view = self.document_view(document_id)
        self._kick(document_id)
        return view

    def _kick(self, document_id: str) -> None:
        if self.config.synchronous_workflow:
            self.run_workflow(document_id)
        else:
            self._pool.submit(self.run_workflow, document_id)

    def _transition(self, document_id: str, from_state: _S, to_state: _S) -> None:
        check_transition(from_state, to_state)
        self.db.set_document_state(document_id, from_state.value, to_state.value)
        logger.info("document %s: %s -> %s", document_id, from_state.value, to_state.value)

    def state_of(self, document_id: str) -> _S:
        return _S(self.db.document(document_id)["state"])

    def job_for(self, document_id: str) -> WorkflowJob:
        with self._lock:
            job = self._jobs.get(document_id)
        if job is None:
            raise NotFound(f"no active job for document {document_id}")
        return job

    # one step per call; returns the state after the step
    def advance(self, document_id: str) -> _S:
        state = self.state_of(document_id)
        if is_terminal(state):
            raise StateViolation(f"document {document_id} is terminal ({state.value})")
        job = self.job_for(document_id)
        step = {
            _S.RECOGNITION_STARTED: self._step_recognize,
            _S.FACTS_COLLECTED: self._step_request_notarization,
            _S.OBFUSCATION_STARTED: self._step_obfuscate_and_store,
            _S.TO_BE_UPLOADED: self._step_anchor,
        }.get(state)
        if step is None:
            return state  # awaiting notary action
        name = step.__name__
        job.attempts = job.step_attempts.get(name, 0) + 1
        job.step_attempts[name] = job.attempts
        try:
            step(job)
        except Exception as exc:
            job.last_error = f"{name}: {exc}"
            logger.warning("document %s step %s failed (attempt %d)", document_id, name, job.attempts)
            if job.attempts >= self.config.max_step_retries:
                self._fail(document_id, job)
            else:
                backoff = self.config.retry_backoff_ms * 2 ** (job.attempts - 1) / 1000.0
                job.next_retry_at = self.clock.now()
                self.clock.sleep(backoff)
            return self.state_of(document_id)
        new_state = self.state_of(document_id)
        if is_terminal(new_state):
            job.purge_payload()
        return new_state

    def run_workflow(self, document_id: str) -> _S:
        """Advance until terminal or blocked on the notary."""
        while True:
            state = self.state_of(document_id)
            if is_terminal(state) or state in (
                _S.NOTARIZATION_AWAITING,
                _S.NOTARIZATION_STARTED,
            ):
                return state
            advanced = self.advance(document_id)
            if advanced == state and state in (
                _S.NOTARIZATION_AWAITING,
                _S.NOTARIZATION_STARTED,
            ):
                return advanced

    def _fail(self, document_id: str, job: WorkflowJob) -> None:
        state = self.state_of(document_id)
        if not is_terminal(state):
            self._transition(document_id, state, _S.FAILED)
        job.purge_payload()

    # -- steps -------------------------------------------------------------------

    def _step_recognize(self, job: WorkflowJob) -> None:
        result = extract(job.image, self.registry, self.ocr)
        job.extraction = result
        self.db.save_extraction(job.document_id, result)
        self.db.update_document(job.document_id, document_type=result.document_type)
        # draft facts from the raw extraction; issuance later re-derives from
        # the notary-corrected values
        drafts = derive_facts(
            result.field_map(),
            now=self.clock.now(),
            subject=job.owner_id,
            source_document=job.document_id,
        )
        logger.info(
            "document %s recognized as %s with %d fields, %d fact drafts",
            job.document_id,
            result.document_type,
            sum(len(p.fields) for p in result.pages),
            len(drafts),
        )
        self._transition(job.document_id, _S.RECOGNITION_STARTED, _S.FACTS_COLLECTED)

    def _step_request_notarization(self, job: WorkflowJob) -> None:
        doc = self.db.document(job.document_id)
        if self.notary.extraction_for(job.document_id) == {}:
            self.notary.open_review(
                job.document_id,
                doc["original_hash"],
                {
                    "document_type": job.extraction.document_type,
                    "fields": job.extraction.field_map(),
                },
            )
        self._transition(job.document_id, _S.FACTS_COLLECTED, _S.NOTARIZATION_AWAITING)

    def _zones_from_extraction(self, job: WorkflowJob) -> list[tuple[str, Rect]]:
        named: list[tuple[str, Rect]] = []
        for f in job.extraction.sensitive_fields():
            named.append((f.name, f.coordinates))
        for i, rect in enumerate(self.face_detector.detect(job.image), start=1):
            named.append((f"face-{i}", rect))
        return named

    def _step_obfuscate_and_store(self, job: WorkflowJob) -> None:
        blob = self.keystore.get(f"users/{job.owner_id}/root", self._service_token)
        salt, root = blob[:16], blob[16:]
        layers = tuple(
            LayerSpec(algorithm_id=a, key_material=b"auto")
            for a in self.config.default_layer_ids
        )
        zones = []
        zone_rows = []
        for zone_id, (name, rect) in enumerate(self._zones_from_extraction(job), start=1):
            zones.append(ZoneSpec(id=zone_id, rect=rect, layers=layers))
            zone_rows.append(
                {
                    "zone_id": zone_id,
                    "name": name,
                    "start_x": rect.start_x,
                    "start_y": rect.start_y,
                    "end_x": rect.end_x,
                    "end_y": rect.end_y,
                }
            )
        obfuscated, master = obfuscate(job.image, zones, root, job.document_id, salt)
        self.keystore.put(
            f"documents/{job.document_id}/master",
            master.to_json().encode(),
            self._service_token,
            policy={"admin"},
        )
        png = obfuscated.to_png()
        cid = self.cas.put(png)
        self.pinning.pin(cid, png)
        self.db.save_zones(job.document_id, zone_rows)
        self.db.update_document(job.document_id, content_id=cid)
        # the original exists nowhere else after this point
        job.image = None
        job.upload_bytes = None
        logger.info("document %s obfuscated into %s (%d zones)", job.document_id, cid, len(zones))
        self._transition(job.document_id, _S.OBFUSCATION_STARTED, _S.TO_BE_UPLOADED)

    def _step_anchor(self, job: WorkflowJob) -> None:
        doc = self.db.document(job.document_id)
        cid = doc["content_id"]
        blob_hash = cid.split("-", 1)[1]
        now = self.clock.now()
        self.ledger.submit(
            new_entry(KIND_DOCUMENT, blob_hash, submitter=job.owner_id, submitted_at=now)
        )
        self.ledger.submit(
            new_entry(
                KIND_DOCUMENT, doc["original_hash"], submitter=job.owner_id, submitted_at=now
            )
        )
        details = canonical_json(
            {
                "document_id": job.document_id,
                "document_type": doc["document_type"],
                "content_id": cid,
                "zones": [z["name"] for z in self.db.zones_for(job.document_id)],
            }
        )
        self.ledger.submit(
            new_entry(
                KIND_DOCUMENT,
                hashlib.sha256(details).hexdigest(),
                submitter=job.owner_id,
                submitted_at=now,
                private_payload=details,
                members=[self._chain_member],
            )
        )
        record = self.notary.record_for(job.document_id)
        corrected = self.notary.corrected_fields(
            job.document_id, job.extraction.field_map()
        )
        drafts = derive_facts(
            corrected, now=now, subject=job.owner_id, source_document=job.document_id
        )
        for draft in drafts:
            self.facts.issue(draft, self._signer, self.ledger, approval=record, now=now)
        block = self.ledger.seal_pending()
        sig_hash = hashlib.sha256(record.signature).hexdigest() if record.signature else None
        self.db.update_document(
            job.document_id, anchor_block=block.index, notary_sig_hash=sig_hash
        )
        logger.info(
            "document %s anchored in block %d with %d facts",
            job.document_id,
            block.index,
            len(drafts),
        )
        self._transition(job.document_id, _S.TO_BE_UPLOADED, _S.COMPLETED)

    # -- notary actions -------------------------------------------------------------

    def notary_queue(self, token: str) -> list[dict]:
        self._auth(token, "notary", "admin")
        out = []
        for record in self.notary.queue():
            out.append(
                {
                    "document_id": record.document_id,
                    "document_hash": record.document_hash,
                    "status": record.status.value,
                    "extraction": self.notary.extraction_for(record.document_id),
                }
            )
        return out

    def notary_decide(
        self,
        token: str,
        document_id: str,
        approve: bool,
        corrections: dict | None = None,
        reason: str = "",
    ) -> dict:
        notary_user = self._auth(token, "notary", "admin")
        state = self.state_of(document_id)
        if state not in (_S.NOTARIZATION_AWAITING, _S.NOTARIZATION_STARTED):
            raise StateViolation(f"document {document_id} is {state.value}")
        if state is _S.NOTARIZATION_AWAITING:
            self.notary.start(document_id, notary_user)
            self._transition(document_id, _S.NOTARIZATION_AWAITING, _S.NOTARIZATION_STARTED)
        raw = self.keystore.get(f"notaries/{notary_user}/key", self._service_token)
        key = Ed25519PrivateKey.from_private_bytes(raw)
        record = self.notary.notarize(
            document_id,
            key,
            Decision(approve=approve, corrections=corrections or {}, reason=reason),
            notary_id=notary_user,
        )
        self.db.assign_notary(document_id, notary_user)
        self.db.audit(notary_user, "notary-decision", document_id)
        if record.status is ReviewStatus.APPROVED:
            self._transition(document_id, _S.NOTARIZATION_STARTED, _S.OBFUSCATION_STARTED)
            self._kick(document_id)
        else:
            job = self.job_for(document_id)
            self._transition(document_id, _S.NOTARIZATION_STARTED, _S.FAILED)
            job.purge_payload()
        return {"document_id": document_id, "status": record.status.value}

    # -- views ------------------------------------------------------------------------

    def document_view(self, document_id: str) -> dict:
        doc = self.db.document(document_id)
        zones = self.db.zones_for(document_id)
        view = {
            "id": doc["id"],
            "description": doc["description"],
            "state": doc["state"],
            "document_type": doc["document_type"],
            "content_id": doc["content_id"],
            "original_hash": doc["original_hash"],
            "anchor_block": doc["anchor_block"],
            "notary_signature_hash": doc["notary_sig_hash"],
            "thumbnail": doc["content_id"],
            "zones": [
                {
                    "zone_id": z["zone_id"],
                    "name": z["name"],
                    "pruned": bool(z["pruned"]),
                    "coordinates": {
                        "start_x": z["start_x"],
                        "start_y": z["start_y"],
                        "end_x": z["end_x"],
                        "end_y": z["end_y"],
                    },
                }
                for z in zones
            ],
        }
        return view

    def list_documents(self, token: str) -> list[dict]:
        owner_id = self._auth(token, "owner", "admin")
        return [self.document_view(d["id"]) for d in self.db.documents_for(owner_id)]

    def _owned_document(self, token: str, document_id: str) -> dict:
        owner_id = self._auth(token, "owner", "admin")
        doc = self.db.document(document_id)
        if doc["owner_id"] != owner_id:
            raise Unauthorized("not the document owner")
        return doc

    def get_document(self, token: str, document_id: str) -> dict:
        self._owned_document(token, document_id)
        return self.document_view(document_id)

    # -- master key management ---------------------------------------------------------

    def _master_for(self, document_id: str) -> MasterKey:
        raw = self.keystore.get(f"documents/{document_id}/master", self._service_token)
        return MasterKey.from_json(raw.decode())

    def prune_zones(self, token: str, document_id: str, zone_ids: set[int]) -> dict:
        self._owned_document(token, document_id)
        master = self._master_for(document_id)
        pruned = prune(master, zone_ids)
        self.keystore.rotate(
            f"documents/{document_id}/master", pruned.to_json().encode(), self._service_token
        )
        self.db.mark_zones_pruned(document_id, set(zone_ids))
        logger.info("document %s pruned zones %s", document_id, sorted(zone_ids))
        return {"document_id": document_id, "remaining_zones": sorted(pruned.zone_ids())}

    # -- shares -----------------------------------------------------------------------

    def create_share(self, token: str, document_id: str, zone_ids: list[int], mode: dict) -> dict:
        doc = self._owned_document(token, document_id)
        if doc["state"] != _S.COMPLETED.value:
            raise StateViolation("only completed documents can be shared")
        master = self._master_for(document_id)
        wanted = set(zone_ids)
        missing = wanted - master.zone_ids()
        if missing:
            raise InvalidInput(f"zones not sharable (pruned or unknown): {sorted(missing)}")
        mode_name, until_ts, max_accesses = self._parse_mode(mode)
        share_uuid = self.db.create_share(
            document_id, sorted(wanted), mode_name, until_ts, max_accesses
        )
        url = f"/share/{share_uuid}"
        logger.info("share %s created for document %s", share_uuid, document_id)
        return {
            "uuid": share_uuid,
            "url": url,
            "qr_payload": url,
            "zones": sorted(wanted),
            "mode": mode,
        }

    @staticmethod
    def _parse_mode(mode: dict) -> tuple[str, str | None, int | None]:
        if not isinstance(mode, dict) or len(mode) != 1:
            raise InvalidInput("mode must be exactly one of until/max_accesses/indefinite")
        if "until" in mode:
            return "until", isoformat_utc(parse_utc(mode["until"])), None
        if "max_accesses" in mode:
            n = int(mode["max_accesses"])
            if n < 1:
                raise InvalidInput("max_accesses must be >= 1")
            return "max_accesses", None, n
        if mode.get("indefinite") is True:
            return "indefinite", None, None
        raise InvalidInput("unknown share mode")

    def resolve_share(self, share_uuid: str, now: datetime | None = None):
        """Returns a ShareView, or the strings 'expired' / 'not-found'."""
        now = now or self.clock.now()
        try:
            share = self.db.share(share_uuid)
        except NotFound:
            return "not-found"
        if not share["active"]:
            return "expired"
        if share["mode"] == "until" and now > parse_utc(share["until_ts"]):
            # latch: an expired link never resolves again, even if a clock
            # later reads earlier than the expiry
            self.db.deactivate_share(share_uuid)
            return "expired"
        if share["mode"] == "max_accesses":
            if not self.db.try_consume_access(share_uuid):
                return "expired"
        doc = self.db.document(share["document_id"])
        blob = self.cas.get(doc["content_id"])
        image = RasterImage.from_png(blob)
        master = self._master_for(share["document_id"])
        revealable = [r for r in master.records if r.zone_id in set(share["zone_ids"])]
        revealed = deobfuscate(image, revealable)
        zones_meta = {z["zone_id"]: z for z in self.db.zones_for(share["document_id"])}
        facts = []
        for fact in self.facts.for_subject(doc["owner_id"]):
            if fact.source_document != share["document_id"]:
                continue
            status = self.facts.verify_fact(fact, self.fact_public_key, now)
            facts.append({**fact.to_dict(), "status": status.value})
        try:
            proof = self.ledger.prove_inclusion(doc["content_id"].split("-", 1)[1]).to_dict()
        except NotFound:
            proof = {}
        return ShareView(
            uuid=share_uuid,
            image_png_b64=base64.b64encode(revealed.to_png()).decode("ascii"),
            revealed_zones=[
                {
                    "zone_id": r.zone_id,
                    "name": zones_meta.get(r.zone_id, {}).get("name", str(r.zone_id)),
                }
                for r in revealable
            ],
            field_names=[f["name"] for f in self.db.fields_for(share["document_id"])],
            facts=facts,
            content_id=doc["content_id"],
            anchor_proof=proof,
            document_type=doc["document_type"],
        )

    def list_shares(self, token: str, document_id: str) -> list[dict]:
        self._owned_document(token, document_id)
        return self.db.shares_for(document_id)

    def revoke_share(self, token: str, share_uuid: str) -> dict:
        owner_id = self._auth(token, "owner", "admin")
        share = self.db.share(share_uuid)  # NotFound propagates
        doc = self.db.document(share["document_id"])
        if doc["owner_id"] != owner_id:
            raise Unauthorized("not the share owner")
        self.db.deactivate_share(share_uuid)
        logger.info("share %s revoked", share_uuid)
        return {"uuid": share_uuid, "active": False}

    # -- public verification --------------------------------------------------------------

    def verify_public(self, ref: str) -> dict:
        """``ref`` is a content id or a share uuid."""
        document = None
        if ref.startswith("sha256-"):
            document = self.db.document_by_content_id(ref)
        else:
            try:
                share = self.db.share(ref)
                document = self.db.document(share["document_id"])
            except NotFound:
                document = None
        if document is None or not document.get("content_id"):
            return {"found": False}
        cid = document["content_id"]
        try:
            blob = self.cas.get(cid)
            hash_match = True
        except DocVaultError:
            hash_match = False
        digest = cid.split("-", 1)[1]
        hit = self.ledger.find(digest)
        anchored = hit is not None
        block_index = hit[0].index if hit else None
        try:
            record = self.notary.record_for(document["id"])
            public_hex = self.db.notary_public_key(record.notary_id)
            notary_ok = bool(public_hex) and notary_signature_valid(
                record, Ed25519PublicKey.from_public_bytes(bytes.fromhex(public_hex))
            )
        except NotFound:
            notary_ok = False
        now = self.clock.now()
        facts = []
        for fact in self.facts.for_subject(document["owner_id"]):
            if fact.source_document != document["id"]:
                continue
            status = self.facts.verify_fact(fact, self.fact_public_key, now)
            facts.append({"predicate": fact.predicate, "fact_hash": fact.hash_hex, "status": status.value})
        return {
            "found": True,
            "content_id": cid,
            "hash_match": hash_match,
            "anchored": anchored,
            "anchor_block": block_index,
            "notary_signature_valid": notary_ok,
            "facts": facts,
        }

    # -- facts API ----------------------------------------------------------------------

    def facts_for_subject(self, token: str, subject: str) -> list[dict]:
        user_id = self._auth(token, "owner", "notary", "admin")
        _, scopes = self.db.resolve_token(token)
        if user_id != subject and not scopes & {"notary", "admin"}:
            raise Unauthorized("facts are readable by their subject or a notary")
        now = self.clock.now()
        out = []
        for fact in self.facts.for_subject(subject):
            status = self.facts.verify_fact(fact, self.fact_public_key, now)
            out.append({**fact.to_dict(), "status": status.value})
        return out

    def revoke_fact(self, token: str, fact_hash_hex: str, reason: str) -> dict:
        self._auth(token, "notary", "admin")
        entry = self.facts.revoke(fact_hash_hex, reason, self.clock.now())
        return entry.to_dict()
