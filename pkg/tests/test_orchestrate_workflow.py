"""Lifecycle state machine, retries, idempotency and the privacy contract."""

import pytest

from docvault.errors import InvalidInput, StateViolation
from docvault.orchestrate import DocumentState, HAPPY_PATH, check_transition
from workflow_fixtures import approve, make_service, onboard, tiny_layout, upload_instance

S = DocumentState


@pytest.fixture
def stack(tmp_path):
    service, clock, layout = make_service(tmp_path)
    owner = onboard(service, "ana", "owner")
    notary = onboard(service, "mirela", "notary")
    yield service, clock, layout, owner, notary
    service.close()


class TestStateMachine:
    def test_edges_reject_illegal_transitions(self):
        with pytest.raises(StateViolation):
            check_transition(S.CREATED, S.COMPLETED)
        with pytest.raises(StateViolation):
            check_transition(S.COMPLETED, S.CREATED)
        check_transition(S.CREATED, S.RECOGNITION_STARTED)

    def test_happy_path_state_sequence(self, stack):
        service, clock, layout, owner, notary = stack
        doc_id, _, _ = upload_instance(service, owner, layout)
        assert service.state_of(doc_id) is S.NOTARIZATION_AWAITING
        approve(service, notary, doc_id)
        assert service.state_of(doc_id) is S.COMPLETED
        observed = [t[1] for t in service.db.transitions(doc_id)]
        assert observed == [s.value for s in HAPPY_PATH]

    def test_rejection_fails_document(self, stack):
        service, clock, layout, owner, notary = stack
        doc_id, _, _ = upload_instance(service, owner, layout)
        service.notary_decide(notary, doc_id, approve=False, reason="fake document")
        assert service.state_of(doc_id) is S.FAILED

    def test_terminal_states_absorb(self, stack):
        service, clock, layout, owner, notary = stack
        doc_id, _, _ = upload_instance(service, owner, layout)
        approve(service, notary, doc_id)
        with pytest.raises(StateViolation):
            service.advance(doc_id)


class TestCreateDocument:
    def test_upload_response_shows_recognition_started(self, stack):
        service, clock, layout, owner, _ = stack
        import numpy as np

        image, _ = layout.render_instance(np.random.default_rng(1), noise_sigma=0)
        view = service.create_document(owner, image.to_png(), "x")
        assert view["state"] == S.RECOGNITION_STARTED.value

    def test_corrupt_png_rejected_before_any_row(self, stack):
        service, clock, layout, owner, _ = stack
        with pytest.raises(InvalidInput):
            service.create_document(owner, b"not a png at all", "x")
        assert service.db.documents_for(service.db.verify_login("ana", "pw-secret")) == []

    def test_idempotency_token_dedupes(self, stack):
        service, clock, layout, owner, _ = stack
        import numpy as np

        image, _ = layout.render_instance(np.random.default_rng(2), noise_sigma=0)
        a = service.create_document(owner, image.to_png(), "x", idempotency_token="tok-1")
        b = service.create_document(owner, image.to_png(), "x", idempotency_token="tok-1")
        assert a["id"] == b["id"]


class TestRetries:
    def test_two_transient_failures_then_success(self, stack):
        service, clock, layout, owner, notary = stack
        doc_id, _, _ = upload_instance(service, owner, layout)
        original = service._step_obfuscate_and_store
        failures = {"left": 2}

        def flaky(job):
            if failures["left"] > 0:
                failures["left"] -= 1
                raise ConnectionError("transient obfuscator outage")
            return original(job)

        flaky.__name__ = "_step_obfuscate_and_store"
        service._step_obfuscate_and_store = flaky
        approve(service, notary, doc_id)
        assert service.state_of(doc_id) is S.COMPLETED
        job = service.job_for(doc_id)
        assert job.step_attempts["_step_obfuscate_and_store"] == 3

    def test_permanent_failure_reaches_failed_with_cause(self, stack):
        service, clock, layout, owner, notary = stack
        doc_id, _, _ = upload_instance(service, owner, layout)

        def broken(job):
            raise ConnectionError("hard down")

        broken.__name__ = "_step_obfuscate_and_store"
        service._step_obfuscate_and_store = broken
        approve(service, notary, doc_id)
        assert service.state_of(doc_id) is S.FAILED
        job = service.job_for(doc_id)
        assert job.step_attempts["_step_obfuscate_and_store"] == service.config.max_step_retries
        assert "hard down" in job.last_error


class TestPrivacyContract:
    def test_original_bytes_and_raw_values_purged_after_completion(self, stack, tmp_path):
        service, clock, layout, owner, notary = stack
        doc_id, values, image = upload_instance(service, owner, layout)
        approve(service, notary, doc_id)
        job = service.job_for(doc_id)
        assert job.image is None and job.upload_bytes is None and job.extraction is None
        # sensitive values are absent from the metadata database file
        raw = (tmp_path / "data" / "metadata.sqlite3").read_bytes()
        assert values["cnp"].encode() not in raw
        assert values["birthdate"].encode() not in raw
        # non-sensitive series value is allowed to persist
        fields = {f["name"]: f for f in service.db.fields_for(doc_id)}
        assert fields["series"]["text"] == values["series"]
        assert fields["cnp"]["text"] is None

    def test_obfuscated_blob_differs_in_sensitive_zones(self, stack):
        service, clock, layout, owner, notary = stack
        doc_id, values, image = upload_instance(service, owner, layout)
        approve(service, notary, doc_id)
        from docvault.imaging import RasterImage

        doc = service.db.document(doc_id)
        blob = service.cas.get(doc["content_id"])
        stored = RasterImage.from_png(blob)
        cnp_rect = next(
            f.rect for f in tiny_layout().field_specs if f.name == "cnp"
        )
        assert stored.zone_bytes(cnp_rect) != image.zone_bytes(cnp_rect)


class TestFactsIntegration:
    def test_facts_issued_and_anchored(self, stack):
        service, clock, layout, owner, notary = stack
        doc_id, values, _ = upload_instance(service, owner, layout)
        approve(service, notary, doc_id)
        owner_id = service.db.verify_login("ana", "pw-secret")
        facts = service.facts.for_subject(owner_id)
        predicates = {f.predicate for f in facts}
        assert "over_18" in predicates  # birthdate 23.05.1997
        for fact in facts:
            assert service.ledger.find(fact.hash_hex) is not None

    def test_notary_correction_overrides_fact_input(self, stack):
        service, clock, layout, owner, notary = stack
        # birthdate that would NOT yield over_18 (a minor), corrected by the
        # notary to an adult birthdate: the issued facts follow the correction
        minor_layout = tiny_layout(birthdate_value="23.05.2020")
        doc_id, _, _ = upload_instance(service, owner, minor_layout, seed=9)
        approve(service, notary, doc_id, corrections={"birthdate": "23.05.1990"})
        owner_id = service.db.verify_login("ana", "pw-secret")
        predicates = {f.predicate for f in service.facts.for_subject(owner_id)}
        assert "over_18" in predicates

    def test_verify_public_report(self, stack):
        service, clock, layout, owner, notary = stack
        doc_id, _, _ = upload_instance(service, owner, layout)
        approve(service, notary, doc_id)
        doc = service.db.document(doc_id)
        report = service.verify_public(doc["content_id"])
        assert report["found"] and report["hash_match"] and report["anchored"]
        assert report["notary_signature_valid"] is True
        assert all(f["status"] == "valid" for f in report["facts"])

    def test_verify_detects_swapped_blob(self, stack):
        service, clock, layout, owner, notary = stack
        doc_id, _, _ = upload_instance(service, owner, layout)
        approve(service, notary, doc_id)
        doc = service.db.document(doc_id)
        path = service.cas.root / doc["content_id"]
        raw = bytearray(path.read_bytes())
        raw[100] ^= 0xFF
        path.write_bytes(bytes(raw))
        report = service.verify_public(doc["content_id"])
        assert report["hash_match"] is False
        assert report["anchored"] is True
