"""Apply and reverse multi-layer obfuscation on image zones.

Obfuscation walks each zone, applies its layers in listed order and collects
one ``ZoneKeyRecord`` per zone into a ``MasterKey``.  Deobfuscation accepts
any subset of records, inverts layers in reverse order and only commits a
zone whose restored bytes hash to the recorded digest, so a wrong or
corrupted key can never silently write garbage pixels.

Both operations are pure: they return new images and never touch shared
state, so they are safe to call concurrently.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Sequence

from ..errors import IntegrityFailure, InvalidZone
from ..imaging import RasterImage
from .keys import MasterKey, ZoneKeyRecord, ZoneSpec, derive_zone_key
from .layers import apply_layer, invert_layer


def _check_zones(image: RasterImage, zones: Sequence[ZoneSpec]) -> None:
    seen_ids = set()
    for zone in zones:
        if zone.id in seen_ids:
            raise InvalidZone(f"duplicate zone id {zone.id}")
        seen_ids.add(zone.id)
        image.check_rect(zone.rect)
    zs = list(zones)
    for i in range(len(zs)):
        for j in range(i + 1, len(zs)):
            if zs[i].rect.overlaps(zs[j].rect):
                raise InvalidZone(
                    f"zones {zs[i].id} and {zs[j].id} overlap; "
                    "overlapping zones are rejected"
                )


def obfuscate(
    image: RasterImage,
    zones: Sequence[ZoneSpec],
    root: bytes,
    document_id: str,
    salt: bytes = b"",
) -> tuple[RasterImage, MasterKey]:
    """Transform every zone in place and return (new image, master key).

    Pixels outside the zone rectangles are byte-identical to the input.  The
    master key records the SHA-256 of each zone's *original* bytes so later
    restoration can be verified.
    """
    _check_zones(image, zones)
    patches = []
    records = []
    for zone in zones:
        original = image.zone_bytes(zone.rect)
        digest = hashlib.sha256(original).digest()
        layer_keys = []
        data = original
        for index, layer in enumerate(zone.layers):
            key = derive_zone_key(root, document_id, zone, index)
            layer_keys.append((layer.algorithm_id, key))
            data = apply_layer(layer.algorithm_id, data, key, zone.id)
        patches.append((zone.rect, data))
        records.append(
            ZoneKeyRecord(
                zone_id=zone.id,
                rect=zone.rect,
                layer_keys=tuple(layer_keys),
                integrity_digest=digest,
            )
        )
    out = image.with_zones(patches) if patches else image
    return out, MasterKey(document_id=document_id, salt=salt, records=tuple(records))


def deobfuscate(image: RasterImage, records: Iterable[ZoneKeyRecord]) -> RasterImage:
    """Restore the zones covered by ``records``; leave every other byte alone.

    Verify-then-commit: all supplied zones are restored into a staging list
    and checked against their digests before any pixel is written.  A digest
    mismatch raises ``IntegrityFailure`` naming the zone and nothing is
    committed.
    """
    staged = []
    seen = set()
    for record in records:
        if record.zone_id in seen:
            raise InvalidZone(f"duplicate record for zone {record.zone_id}")
        seen.add(record.zone_id)
        image.check_rect(record.rect)
        data = image.zone_bytes(record.rect)
        for algorithm_id, key in reversed(record.layer_keys):
            data = invert_layer(algorithm_id, data, key, record.zone_id)
        if hashlib.sha256(data).digest() != record.integrity_digest:
            raise IntegrityFailure(record.zone_id)
        staged.append((record.rect, data))
    if not staged:
        return image
    return image.with_zones(staged)
