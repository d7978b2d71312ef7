"""Key derivation against independent references, plus master-key pruning."""

import hashlib
import hmac
import struct

import pytest

from docvault.errors import InvalidInput, NotFound
from docvault.imaging import Rect
from docvault.obfuscate import (
    LayerSpec,
    MasterKey,
    ZoneKeyRecord,
    ZoneSpec,
    decode_record_token,
    derive_root,
    derive_zone_key,
    prune,
)


def _zone(zone_id=1, rect=(4, 4, 20, 12), algs=(3,), key=b"K"):
    return ZoneSpec(
        id=zone_id,
        rect=Rect(*rect),
        layers=tuple(LayerSpec(algorithm_id=a, key_material=key) for a in algs),
    )


class TestDeriveRoot:
    def test_matches_reference_pbkdf2(self):
        # Independent oracle: hashlib.pbkdf2_hmac called directly here.
        expected = hashlib.pbkdf2_hmac("sha256", b"password", bytes(16), 1, dklen=32)
        assert derive_root("password", bytes(16), iterations=1) == expected

    def test_deterministic(self):
        salt = bytes(range(16))
        assert derive_root("password", salt, 10) == derive_root("password", salt, 10)

    def test_salt_changes_key(self):
        a = derive_root("password", bytes(16), 10)
        b = derive_root("password", b"\x01" + bytes(15), 10)
        assert a != b
        # cross-check both against the reference
        assert a == hashlib.pbkdf2_hmac("sha256", b"password", bytes(16), 10, dklen=32)
        assert b == hashlib.pbkdf2_hmac(
            "sha256", b"password", b"\x01" + bytes(15), 10, dklen=32
        )

    def test_empty_passphrase_rejected(self):
        with pytest.raises(InvalidInput):
            derive_root("", bytes(16), 10)

    def test_bad_salt_and_iterations_rejected(self):
        with pytest.raises(InvalidInput):
            derive_root("p", bytes(8), 10)
        with pytest.raises(InvalidInput):
            derive_root("p", bytes(16), 0)


class TestDeriveZoneKey:
    ROOT = bytes(range(32))

    def _reference(self, document_id, zone, layer_index):
        # Independent HMAC oracle over the documented message layout.
        r = zone.rect
        msg = (
            document_id.encode()
            + b"\x00"
            + struct.pack(">q", zone.id)
            + struct.pack(">IIII", r.start_x, r.start_y, r.end_x, r.end_y)
            + struct.pack(">I", layer_index)
            + zone.layers[layer_index].key_material
        )
        return hmac.new(self.ROOT, msg, hashlib.sha256).digest()[:16]

    def test_matches_reference_hmac(self):
        zone = _zone()
        assert derive_zone_key(self.ROOT, "doc-1", zone, 0) == self._reference(
            "doc-1", zone, 0
        )

    def test_deterministic(self):
        zone = _zone()
        assert derive_zone_key(self.ROOT, "d", zone, 0) == derive_zone_key(
            self.ROOT, "d", zone, 0
        )

    def test_rect_changes_key(self):
        a = _zone(rect=(4, 4, 20, 12))
        b = _zone(rect=(4, 4, 20, 13))
        ka = derive_zone_key(self.ROOT, "d", a, 0)
        kb = derive_zone_key(self.ROOT, "d", b, 0)
        assert ka != kb
        assert ka == self._reference("d", a, 0)
        assert kb == self._reference("d", b, 0)

    def test_layer_index_changes_key(self):
        zone = _zone(algs=(3, 3))
        k0 = derive_zone_key(self.ROOT, "d", zone, 0)
        k1 = derive_zone_key(self.ROOT, "d", zone, 1)
        assert k0 != k1
        assert k1 == self._reference("d", zone, 1)

    @pytest.mark.parametrize(
        "mutation",
        ["document_id", "zone_id", "rect", "layer_index"],
    )
    def test_single_field_perturbations_change_key(self, mutation):
        base = _zone(zone_id=7, rect=(0, 0, 8, 8), algs=(1, 2))
        k = derive_zone_key(self.ROOT, "doc", base, 0)
        if mutation == "document_id":
            other = derive_zone_key(self.ROOT, "doc2", base, 0)
        elif mutation == "zone_id":
            other = derive_zone_key(self.ROOT, "doc", _zone(zone_id=8, rect=(0, 0, 8, 8), algs=(1, 2)), 0)
        elif mutation == "rect":
            other = derive_zone_key(self.ROOT, "doc", _zone(zone_id=7, rect=(0, 0, 8, 9), algs=(1, 2)), 0)
        else:
            other = derive_zone_key(self.ROOT, "doc", base, 1)
        assert k != other

    def test_out_of_range_layer_index(self):
        with pytest.raises(InvalidInput):
            derive_zone_key(self.ROOT, "d", _zone(), 5)


def _record(zone_id, rect=(0, 0, 4, 4)):
    return ZoneKeyRecord(
        zone_id=zone_id,
        rect=Rect(*rect),
        layer_keys=((3, bytes(16)),),
        integrity_digest=hashlib.sha256(str(zone_id).encode()).digest(),
    )


class TestMasterKey:
    def _master(self):
        return MasterKey(
            document_id="doc",
            salt=bytes(16),
            records=(
                _record(1, (0, 0, 4, 4)),
                _record(2, (4, 0, 8, 4)),
                _record(3, (0, 4, 4, 8)),
            ),
        )

    def test_prune_removes_exactly_the_requested_records(self):
        pruned = prune(self._master(), {2})
        assert pruned.zone_ids() == {1, 3}

    def test_prune_empty_set_is_identity(self):
        m = self._master()
        assert prune(m, set()) == m

    def test_prune_is_pure(self):
        m = self._master()
        prune(m, {1, 3})
        assert m.zone_ids() == {1, 2, 3}

    def test_prune_unknown_zone(self):
        with pytest.raises(NotFound):
            prune(self._master(), {9})

    def test_duplicate_zone_ids_rejected(self):
        with pytest.raises(InvalidInput):
            MasterKey("doc", b"", records=(_record(1), _record(1)))

    def test_json_round_trip(self):
        m = self._master()
        assert MasterKey.from_json(m.to_json()) == m

    def test_token_round_trip(self):
        rec = _record(5, (2, 2, 10, 10))
        assert decode_record_token(rec.obfuscation_key) == rec

    def test_token_is_base64_text(self):
        tok = _record(5).obfuscation_key
        assert isinstance(tok, str)
        assert tok.isascii()
