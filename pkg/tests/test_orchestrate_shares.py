"""Share links: selective disclosure, three expiry modes, revocation."""

import base64
import threading
from concurrent.futures import ThreadPoolExecutor
from datetime import timedelta

import pytest

from docvault.clock import isoformat_utc
from docvault.errors import InvalidInput, NotFound, StateViolation, Unauthorized
from docvault.imaging import RasterImage
from workflow_fixtures import approve, make_service, onboard, upload_instance


@pytest.fixture
def completed(tmp_path):
    service, clock, layout, = make_service(tmp_path)[0:3]
    owner = onboard(service, "ana", "owner")
    notary = onboard(service, "mirela", "notary")
    doc_id, values, original = upload_instance(service, owner, layout)
    approve(service, notary, doc_id)
    yield service, clock, layout, owner, doc_id, values, original
    service.close()


def _zone_map(service, doc_id):
    return {z["name"]: z["zone_id"] for z in service.db.zones_for(doc_id)}


class TestCreateShare:
    def test_share_reveals_exactly_selected_zones(self, completed):
        service, clock, layout, owner, doc_id, values, original = completed
        zones = _zone_map(service, doc_id)
        share = service.create_share(
            owner, doc_id, [zones["cnp"]], {"indefinite": True}
        )
        view = service.resolve_share(share["uuid"])
        revealed = RasterImage.from_png(base64.b64decode(view.image_png_b64))
        cnp_rect = next(f.rect for f in layout.field_specs if f.name == "cnp")
        bd_rect = next(f.rect for f in layout.field_specs if f.name == "birthdate")
        assert revealed.zone_bytes(cnp_rect) == original.zone_bytes(cnp_rect)
        assert revealed.zone_bytes(bd_rect) != original.zone_bytes(bd_rect)
        assert [z["name"] for z in view.revealed_zones] == ["cnp"]

    def test_share_requires_completed_document(self, tmp_path):
        service, clock, layout = make_service(tmp_path)[0:3]
        owner = onboard(service, "b", "owner")
        doc_id, _, _ = upload_instance(service, owner, layout)  # awaiting notary
        with pytest.raises(StateViolation):
            service.create_share(owner, doc_id, [1], {"indefinite": True})
        service.close()

    def test_unknown_or_pruned_zone_rejected(self, completed):
        service, clock, layout, owner, doc_id, values, _ = completed
        with pytest.raises(InvalidInput):
            service.create_share(owner, doc_id, [99], {"indefinite": True})
        zones = _zone_map(service, doc_id)
        service.prune_zones(owner, doc_id, {zones["birthdate"]})
        with pytest.raises(InvalidInput):
            service.create_share(owner, doc_id, [zones["birthdate"]], {"indefinite": True})

    def test_non_owner_cannot_share(self, completed):
        service, clock, layout, owner, doc_id, *_ = completed
        other = onboard(service, "carol", "owner")
        with pytest.raises(Unauthorized):
            service.create_share(other, doc_id, [1], {"indefinite": True})

    def test_qr_payload_is_the_url(self, completed):
        service, clock, layout, owner, doc_id, *_ = completed
        share = service.create_share(owner, doc_id, [1], {"indefinite": True})
        assert share["qr_payload"] == share["url"] == f"/share/{share['uuid']}"


class TestExpiryModes:
    def test_time_mode_expires_at_the_boundary(self, completed):
        service, clock, layout, owner, doc_id, *_ = completed
        until = clock.now() + timedelta(seconds=60)
        share = service.create_share(owner, doc_id, [1], {"until": isoformat_utc(until)})
        clock.advance(30)
        assert service.resolve_share(share["uuid"]) != "expired"
        clock.advance(31)
        assert service.resolve_share(share["uuid"]) == "expired"
        # and it never resolves again, even if a later clock reads earlier
        clock.advance(-45)
        assert service.resolve_share(share["uuid"]) == "expired"

    def test_time_expiry_does_not_consume_counter(self, completed):
        service, clock, layout, owner, doc_id, *_ = completed
        until = clock.now() + timedelta(seconds=10)
        share = service.create_share(owner, doc_id, [1], {"until": isoformat_utc(until)})
        clock.advance(60)
        service.resolve_share(share["uuid"])
        assert service.db.share(share["uuid"])["accesses_used"] == 0

    def test_access_count_mode(self, completed):
        service, clock, layout, owner, doc_id, *_ = completed
        share = service.create_share(owner, doc_id, [1], {"max_accesses": 1})
        assert service.resolve_share(share["uuid"]) != "expired"
        assert service.resolve_share(share["uuid"]) == "expired"

    def test_concurrent_resolves_never_exceed_cap(self, completed):
        service, clock, layout, owner, doc_id, *_ = completed
        share = service.create_share(owner, doc_id, [1], {"max_accesses": 5})
        results = []
        lock = threading.Lock()

        def resolve():
            view = service.resolve_share(share["uuid"])
            with lock:
                results.append(view != "expired")

        with ThreadPoolExecutor(max_workers=20) as pool:
            for _ in range(20):
                pool.submit(resolve)
        assert sum(results) == 5

    def test_unknown_uuid(self, completed):
        service, *_ = completed
        assert service.resolve_share("no-such-uuid") == "not-found"


class TestRevocation:
    def test_revoke_then_resolve(self, completed):
        service, clock, layout, owner, doc_id, *_ = completed
        share = service.create_share(owner, doc_id, [1], {"indefinite": True})
        service.revoke_share(owner, share["uuid"])
        assert service.resolve_share(share["uuid"]) == "expired"

    def test_revoke_is_idempotent(self, completed):
        service, clock, layout, owner, doc_id, *_ = completed
        share = service.create_share(owner, doc_id, [1], {"indefinite": True})
        assert service.revoke_share(owner, share["uuid"])["active"] is False
        assert service.revoke_share(owner, share["uuid"])["active"] is False

    def test_revoke_unknown(self, completed):
        service, clock, layout, owner, *_ = completed
        with pytest.raises(NotFound):
            service.revoke_share(owner, "missing-uuid")

    def test_non_owner_cannot_revoke(self, completed):
        service, clock, layout, owner, doc_id, *_ = completed
        share = service.create_share(owner, doc_id, [1], {"indefinite": True})
        other = onboard(service, "dave", "owner")
        with pytest.raises(Unauthorized):
            service.revoke_share(other, share["uuid"])


class TestViewBundle:
    def test_view_supports_independent_verification(self, completed):
        service, clock, layout, owner, doc_id, *_ = completed
        share = service.create_share(owner, doc_id, [1], {"indefinite": True})
        view = service.resolve_share(share["uuid"])
        # content id re-hashes from the stored blob
        blob = service.cas.get(view.content_id)
        from docvault.store import content_id

        assert content_id(blob) == view.content_id
        # inclusion proof verifies against the anchored entry
        from docvault.anchor import InclusionProof, verify_inclusion

        proof = InclusionProof.from_dict(view.anchor_proof)
        entry = service.ledger.entry_at(proof.block_index, proof.entry_position)
        assert verify_inclusion(proof, entry.to_record())
        assert view.facts and all(f["status"] == "valid" for f in view.facts)
        assert view.field_names  # names only
