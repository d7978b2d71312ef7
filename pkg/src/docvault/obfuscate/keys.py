"""Key derivation and the owner-held master key container.

A user passphrase is stretched once into a 32-byte root (PBKDF2-HMAC-SHA256).
Every zone layer then gets its own 16-byte key from an HMAC over the document
id, the zone geometry, the layer position and the layer's key material, so a
key leaks nothing about any other zone and cannot be replayed on a different
document or rectangle.

The byte layouts below are normative; an independent implementation that
follows them produces bit-identical keys:

    root            = PBKDF2-HMAC-SHA256(passphrase, salt, iterations, 32)
    layer_key       = HMAC-SHA256(root, msg)[:16]
    msg             = utf8(document_id) || 0x00 || i64be(zone_id)
                      || u32be(start_x) || u32be(start_y)
                      || u32be(end_x)   || u32be(end_y)
                      || u32be(layer_index) || key_material
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import struct
import zlib
from dataclasses import dataclass, field, replace

from ..errors import InvalidInput, InvalidZone, NotFound
from ..imaging import Rect

DEFAULT_PBKDF2_ITERATIONS = 100_000
ROOT_KEY_LEN = 32
LAYER_KEY_LEN = 16
MAX_LAYERS = 8

ALG_CBC = 1
ALG_PERMUTE = 2
ALG_XOR = 3
ALGORITHM_IDS = (ALG_CBC, ALG_PERMUTE, ALG_XOR)


@dataclass(frozen=True)
class LayerSpec:
    """One reversible transformation requested for a zone."""

    algorithm_id: int
    key_material: bytes

    def __post_init__(self):
        if self.algorithm_id not in ALGORITHM_IDS:
            raise InvalidInput(f"unknown algorithm_id {self.algorithm_id}")
        if not self.key_material:
            raise InvalidInput("layer key material must be non-empty")


@dataclass(frozen=True)
class ZoneSpec:
    """A rectangle plus the ordered layer list applied to it."""

    id: int
    rect: Rect
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        if not self.layers:
            raise InvalidZone(f"zone {self.id} has an empty layer list")
        if len(self.layers) > MAX_LAYERS:
            raise InvalidZone(f"zone {self.id} exceeds {MAX_LAYERS} layers")
        object.__setattr__(self, "layers", tuple(self.layers))


@dataclass(frozen=True)
class ZoneKeyRecord:
    """Everything needed to restore one zone: geometry, layer keys, digest.

    ``layer_keys`` pairs each algorithm id with its derived 16-byte key, in
    application order.  ``integrity_digest`` is the SHA-256 of the zone's
    original bytes; restoration is verify-then-commit against it.
    """

    zone_id: int
    rect: Rect
    layer_keys: tuple[tuple[int, bytes], ...]
    integrity_digest: bytes

    def __post_init__(self):
        if len(self.integrity_digest) != 32:
            raise InvalidInput("integrity digest must be 32 bytes")
        object.__setattr__(self, "layer_keys", tuple(self.layer_keys))

    @property
    def obfuscation_key(self) -> str:
        """Self-contained share token: base64(zlib(record json)).

        Holding the token is sufficient to restore the zone; coordinates do
        not need to travel separately.
        """
        return encode_record_token(self)

    def to_dict(self) -> dict:
        return {
            "zone_id": self.zone_id,
            "coordinates": self.rect.to_dict(),
            "layers": [
                {"algorithm_id": alg, "key": key.hex()} for alg, key in self.layer_keys
            ],
            "digest": self.integrity_digest.hex(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ZoneKeyRecord":
        return cls(
            zone_id=int(d["zone_id"]),
            rect=Rect.from_dict(d["coordinates"]),
            layer_keys=tuple(
                (int(l["algorithm_id"]), bytes.fromhex(l["key"])) for l in d["layers"]
            ),
            integrity_digest=bytes.fromhex(d["digest"]),
        )


def encode_record_token(record: ZoneKeyRecord) -> str:
    raw = json.dumps(record.to_dict(), sort_keys=True, separators=(",", ":")).encode()
    return base64.b64encode(zlib.compress(raw)).decode("ascii")


def decode_record_token(token: str) -> ZoneKeyRecord:
    try:
        raw = zlib.decompress(base64.b64decode(token.encode("ascii")))
        return ZoneKeyRecord.from_dict(json.loads(raw))
    except (ValueError, KeyError, zlib.error) as exc:
        raise InvalidInput(f"malformed obfuscation key token: {exc}") from exc


@dataclass(frozen=True)
class MasterKey:
    """Owner-held container of all zone key records for one document."""

    document_id: str
    salt: bytes
    records: tuple[ZoneKeyRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        ids = [r.zone_id for r in self.records]
        if len(ids) != len(set(ids)):
            raise InvalidInput("duplicate zone ids in master key")

    def zone_ids(self) -> set[int]:
        return {r.zone_id for r in self.records}

    def record_for(self, zone_id: int) -> ZoneKeyRecord:
        for r in self.records:
            if r.zone_id == zone_id:
                return r
        raise NotFound(f"zone {zone_id} not present in master key")

    def subset(self, zone_ids) -> tuple[ZoneKeyRecord, ...]:
        wanted = set(zone_ids)
        missing = wanted - self.zone_ids()
        if missing:
            raise NotFound(f"zones not present in master key: {sorted(missing)}")
        return tuple(r for r in self.records if r.zone_id in wanted)

    def to_dict(self) -> dict:
        return {
            "document_id": self.document_id,
            "salt": self.salt.hex(),
            "zones": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MasterKey":
        return cls(
            document_id=d["document_id"],
            salt=bytes.fromhex(d["salt"]),
            records=tuple(ZoneKeyRecord.from_dict(z) for z in d["zones"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "MasterKey":
        return cls.from_dict(json.loads(text))


def derive_root(
    passphrase: str, salt: bytes, iterations: int = DEFAULT_PBKDF2_ITERATIONS
) -> bytes:
    """Stretch a passphrase into the 32-byte root key (PBKDF2-HMAC-SHA256)."""
    if not passphrase:
        raise InvalidInput("passphrase must be non-empty")
    if len(salt) != 16:
        raise InvalidInput("salt must be exactly 16 bytes")
    if iterations < 1:
        raise InvalidInput("iterations must be >= 1")
    return hashlib.pbkdf2_hmac(
        "sha256", passphrase.encode("utf-8"), salt, iterations, dklen=ROOT_KEY_LEN
    )


def derive_zone_key(
    root: bytes, document_id: str, zone: ZoneSpec, layer_index: int
) -> bytes:
    """Derive the 16-byte key for one layer of one zone."""
    if len(root) != ROOT_KEY_LEN:
        raise InvalidInput("root key must be 32 bytes")
    if not 0 <= layer_index < len(zone.layers):
        raise InvalidInput(
            f"layer index {layer_index} out of range for zone {zone.id}"
        )
    r = zone.rect
    msg = (
        document_id.encode("utf-8")
        + b"\x00"
        + struct.pack(">q", zone.id)
        + struct.pack(">IIII", r.start_x, r.start_y, r.end_x, r.end_y)
        + struct.pack(">I", layer_index)
        + zone.layers[layer_index].key_material
    )
    return hmac.new(root, msg, hashlib.sha256).digest()[:LAYER_KEY_LEN]


def prune(master: MasterKey, zone_ids) -> MasterKey:
    """Return a master key without the given zones; the input is unchanged.

    Once a record is pruned the zone can never be restored: permanent
    redaction is expressed as obfuscate-then-prune.
    """
    wanted = set(zone_ids)
    unknown = wanted - master.zone_ids()
    if unknown:
        raise NotFound(f"cannot prune unknown zones: {sorted(unknown)}")
    return replace(
        master, records=tuple(r for r in master.records if r.zone_id not in wanted)
    )
