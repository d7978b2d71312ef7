"""Acceptance suite: one test per shipping criterion, each printing a
PASS/FAIL line.  Tolerances are pinned here, not deferred.

Wall-clock figures from upstream hardware (anchor latency seconds, TPS)
are recorded as context only and never asserted.
"""

import base64
import hashlib
import json
import struct
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import date, datetime, timedelta, timezone

import jsonschema
import numpy as np
import pytest

from docvault.anchor import (
    Ledger,
    new_entry,
    run_load,
    serialize_block,
    verify_chain_bytes,
    verify_inclusion,
)
from docvault.anchor.entries import KIND_DOCUMENT, KIND_FACT
from docvault.clock import ManualClock, isoformat_utc
from docvault.errors import IntegrityFailure
from docvault.extract import (
    GlyphOcr,
    TemplateRegistry,
    build_layouts,
    cer,
    extract,
    field_accuracy,
    rase,
    ssim,
)
from docvault.facts import checksum_digit, decode_cnp, is_over_18, validate_cnp
from docvault.imaging import RasterImage, Rect
from docvault.obfuscate import (
    ALG_CBC,
    ALG_PERMUTE,
    ALG_XOR,
    LayerSpec,
    ZoneKeyRecord,
    ZoneSpec,
    deobfuscate,
    derive_root,
    obfuscate,
)
from docvault.schemas import load_schema

from conftest import random_image
from test_facts_rules import oracle_over_18
from test_metrics import reference_rase, reference_ssim
from workflow_fixtures import approve, make_service, onboard, tiny_layout

ROOT = derive_root("acceptance-passphrase", bytes(range(16)), iterations=1)


def _report(name: str, ok: bool):
    print(f"ACCEPTANCE {'PASS' if ok else 'FAIL'}: {name}")
    assert ok, name


# ---------------------------------------------------------------------------
# randomized obfuscation cases
# ---------------------------------------------------------------------------


def _random_case(rng):
    """One randomized case: image <= 512x512, <= 10 zones, <= 3 layers."""
    width = int(rng.integers(16, 513))
    height = int(rng.integers(16, 513))
    image = random_image(rng, width, height)
    cols = int(rng.integers(1, 4))
    rows = int(rng.integers(1, 4))
    cells = [
        (c * width // cols, r * height // rows, (c + 1) * width // cols, (r + 1) * height // rows)
        for c in range(cols)
        for r in range(rows)
    ]
    rng.shuffle(cells)
    n_zones = int(rng.integers(0, min(10, len(cells)) + 1))
    zones = []
    for zone_id, (x0, y0, x1, y1) in enumerate(cells[:n_zones], start=1):
        if x1 - x0 < 4 or y1 - y0 < 4:
            continue
        dx = int(rng.integers(0, (x1 - x0) // 4 + 1))
        dy = int(rng.integers(0, (y1 - y0) // 4 + 1))
        rect = Rect(x0 + dx, y0 + dy, x1 - dx, y1 - dy)
        n_layers = int(rng.integers(1, 4))
        layers = tuple(
            LayerSpec(int(rng.choice((ALG_CBC, ALG_PERMUTE, ALG_XOR))), b"acceptance-key")
            for _ in range(n_layers)
        )
        zones.append(ZoneSpec(id=zone_id, rect=rect, layers=layers))
    return image, zones


N_CASES = 1000


class TestObfuscationAcceptance:
    def test_round_trip_1000_cases_under_60s(self):
        rng = np.random.default_rng(0xD0C)
        elapsed = 0.0
        failures = 0
        for case in range(N_CASES):
            image, zones = _random_case(rng)
            t0 = time.perf_counter()
            out, master = obfuscate(image, zones, ROOT, f"case-{case}")
            restored = deobfuscate(out, master.records)
            elapsed += time.perf_counter() - t0
            if restored.data != image.data:
                failures += 1
        print(f"  round-trip wall time: {elapsed:.1f}s over {N_CASES} cases")
        _report(
            f"obfuscation round trip ({N_CASES} cases byte-identical, {elapsed:.1f}s < 60s)",
            failures == 0 and elapsed < 60.0,
        )

    def test_partial_disclosure_and_wrong_keys(self):
        rng = np.random.default_rng(0xD0C)  # same stream as criterion 1
        subset_failures = 0
        integrity_misses = 0
        trials = 0
        for case in range(N_CASES):
            image, zones = _random_case(rng)
            if len(zones) < 2:
                continue
            out, master = obfuscate(image, zones, ROOT, f"case-{case}")
            keep = max(1, len(zones) // 2)
            revealed_ids = {z.id for z in zones[:keep]}
            partial = deobfuscate(out, master.subset(revealed_ids))
            for zone in zones:
                got = partial.zone_bytes(zone.rect)
                want = (
                    image.zone_bytes(zone.rect)
                    if zone.id in revealed_ids
                    else out.zone_bytes(zone.rect)
                )
                if got != want:
                    subset_failures += 1
            big = next((z for z in zones if z.rect.area * 3 >= 16), None)
            if big is None:
                continue
            trials += 1
            record = master.record_for(big.id)
            alg, key = record.layer_keys[0]
            bad = ZoneKeyRecord(
                zone_id=record.zone_id,
                rect=record.rect,
                layer_keys=((alg, bytes([key[0] ^ 0x80]) + key[1:]),)
                + record.layer_keys[1:],
                integrity_digest=record.integrity_digest,
            )
            try:
                deobfuscate(out, [bad])
                integrity_misses += 1
            except IntegrityFailure as exc:
                if exc.zone_id != big.id:
                    integrity_misses += 1
        _report(
            f"partial disclosure (subset exact, {trials} wrong-key trials all raised)",
            subset_failures == 0 and integrity_misses == 0 and trials > 300,
        )


# ---------------------------------------------------------------------------
# wire format
# ---------------------------------------------------------------------------

LISTING_EXTRACTOR_RESULT = {
    "document_type": "id_card",
    "pages": [
        {
            "id": "c690c529-771f-4129-b4e5-a775a076b888",
            "fields": [
                {
                    "name": "cnp",
                    "text": "197XXXXXXXXXX",
                    "sensitive": True,
                    "confidence_score": 0.94,
                    "coordinates": {"start_x": 1427, "start_y": 792, "end_x": 2254, "end_y": 924},
                },
                {
                    "name": "series",
                    "text": "MZ",
                    "sensitive": False,
                    "confidence_score": 1,
                    "coordinates": {"start_x": 2254, "start_y": 681, "end_x": 2456, "end_y": 834},
                },
            ],
        }
    ],
}

LISTING_OBFUSCATOR_REQUEST = {
    "zones": [
        {
            "id": 1,
            "coordinates": {"start_x": 1427, "start_y": 792, "end_x": 2254, "end_y": 924},
            "layers": [{"algorithm_id": 1, "key": "MY_SECRET_KEY"}],
        }
    ]
}

LISTING_OBFUSCATOR_RESPONSE = {
    "document_id": "c690c529-771f-4129-b4e5-a775a076b888",
    "zones": [
        {
            "id": 1,
            "coordinates": {"start_x": 1427, "start_y": 792, "end_x": 2254, "end_y": 924},
            "obfuscationKey": "eJxrYJnKz8gABj1i2amVekAcX8CMr2BrMlTNBun1E7R6OFOzs8vSsnMSXoAlzdk6g==",
        }
    ],
}


class TestWireFormatAcceptance:
    def test_wire_format_conformance(self):
        from docvault.obfuscate import build_response, parse_request

        jsonschema.validate(LISTING_EXTRACTOR_RESULT, load_schema("extractor_result"))
        jsonschema.validate(LISTING_OBFUSCATOR_REQUEST, load_schema("obfuscator_request"))
        jsonschema.validate(LISTING_OBFUSCATOR_RESPONSE, load_schema("obfuscator_response"))

        # field-name exactness: renaming any listed field must fail validation
        import copy

        renamed = copy.deepcopy(LISTING_EXTRACTOR_RESULT)
        renamed["pages"][0]["fields"][0]["confidence"] = renamed["pages"][0]["fields"][0].pop(
            "confidence_score"
        )
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(renamed, load_schema("extractor_result"))

        # live pipeline bodies validate against the same schemas
        rng = np.random.default_rng(77)
        layout = build_layouts()[0]
        registry = TemplateRegistry()
        registry.register_template(layout.name, [(layout.template_image(), layout.field_specs)])
        doc, _ = layout.render_instance(rng)
        result = extract(doc, registry, GlyphOcr())
        jsonschema.validate(result.to_dict(), load_schema("extractor_result"))

        image = random_image(rng, 64, 48)
        zones = parse_request(
            {
                "zones": [
                    {
                        "id": 1,
                        "coordinates": {"start_x": 2, "start_y": 2, "end_x": 40, "end_y": 30},
                        "layers": [{"algorithm_id": 1, "key": "MY_SECRET_KEY"}],
                    }
                ]
            }
        )
        _, master = obfuscate(image, zones, ROOT, "wire-doc")
        jsonschema.validate(build_response(master), load_schema("obfuscator_response"))
        _report("wire-format conformance (schemas transcribed from listings)", True)


# ---------------------------------------------------------------------------
# extraction corpus
# ---------------------------------------------------------------------------


class TestExtractionCorpusAcceptance:
    def test_corpus_accuracy_and_degradation(self):
        rng = np.random.default_rng(2026)
        layouts = build_layouts()
        registry = TemplateRegistry()
        for layout in layouts:
            registry.register_template(
                layout.name, [(layout.template_image(), layout.field_specs)]
            )
        engine = GlyphOcr()
        docs = []
        for i in range(20):
            layout = layouts[i % len(layouts)]
            image, truth = layout.render_instance(rng)
            docs.append((layout.name, image, truth))

        native_reports = []
        for name, image, truth in docs:
            result = extract(image, registry, engine)
            assert result.document_type == name
            native_reports.append(field_accuracy(result, truth))
        native = float(np.mean([r.accuracy for r in native_reports]))

        by_width = {}
        for width in (1800, 800, 200):
            scores = []
            for name, image, truth in docs:
                result = extract(image.scaled_to_width(width), registry, engine)
                scores.append(field_accuracy(result, truth).accuracy)
            by_width[width] = float(np.mean(scores))
        print(f"  accuracy: native={native:.4f} " + " ".join(f"{w}={a:.4f}" for w, a in by_width.items()))
        monotone = native >= by_width[1800] >= by_width[800] >= by_width[200]
        _report(
            "extraction corpus (20 docs x 3 templates: native accuracy 100%, degradation monotone)",
            native == 1.0 and monotone,
        )


# ---------------------------------------------------------------------------
# fact oracle
# ---------------------------------------------------------------------------


class TestFactOracleAcceptance:
    def test_over_18_boundary_oracle_1996_2008(self):
        import calendar

        mismatches = 0
        checked = 0
        for birth_year in range(1996, 2009):
            births = [date(birth_year, 5, 23), date(birth_year, 2, 28), date(birth_year, 3, 1), date(birth_year, 12, 31)]
            if calendar.isleap(birth_year):
                births.append(date(birth_year, 2, 29))
            for birth in births:
                from docvault.facts import adulthood_date

                boundary = adulthood_date(birth)
                for offset in range(-3, 4):
                    now = boundary + timedelta(days=offset)
                    ours = is_over_18(
                        birth, datetime(now.year, now.month, now.day, 12, tzinfo=timezone.utc)
                    )
                    if ours != oracle_over_18(birth, now):
                        mismatches += 1
                    checked += 1
        _report(
            f"fact oracle: over_18 agrees with day-stepping oracle on {checked} boundary dates",
            mismatches == 0 and checked >= 13 * 4 * 7,
        )

    def test_cnp_checksum_oracle_1000_codes(self):
        rng = np.random.default_rng(4242)
        weights = (2, 7, 9, 1, 4, 6, 3, 5, 8, 2, 7, 9)
        mismatches = 0
        for _ in range(1000):
            first12 = "".join(str(d) for d in rng.integers(0, 10, size=12))
            total = sum(int(d) * w for d, w in zip(first12, weights))
            oracle = 1 if total % 11 == 10 else total % 11
            if checksum_digit(first12) != oracle:
                mismatches += 1
            # full-code validation agrees with the oracle digit
            code = first12 + str(oracle)
            if validate_cnp(code):
                decoded = decode_cnp(code)
                assert decoded.year >= 1800
            wrong = first12 + str((oracle + 1) % 10)
            if validate_cnp(wrong):
                mismatches += 1
        _report("fact oracle: CNP checksum agrees with weight-vector oracle on 1000 codes", mismatches == 0)


# ---------------------------------------------------------------------------
# ledger tamper detection
# ---------------------------------------------------------------------------


class TestLedgerTamperAcceptance:
    def _five_block_chain(self):
        clock = ManualClock()
        ledger = Ledger(clock=clock)
        counter = 0
        for _ in range(4):
            for _ in range(2):
                ledger.submit(
                    new_entry(
                        KIND_FACT if counter % 2 else KIND_DOCUMENT,
                        hashlib.sha256(str(counter).encode()).hexdigest(),
                        "acceptance",
                        clock.now(),
                    )
                )
                counter += 1
            clock.advance(1)
            ledger.seal_pending()
        return ledger

    def test_exhaustive_single_byte_mutation(self):
        ledger = self._five_block_chain()
        blocks = ledger.blocks
        assert len(blocks) == 5
        blobs = [serialize_block(b) for b in blocks]
        raw = b"".join(blobs)
        assert verify_chain_bytes(raw).ok

        # block index owning each byte offset
        boundaries = []
        offset = 0
        for i, blob in enumerate(blobs):
            boundaries.append((offset, offset + len(blob), i))
            offset += len(blob)

        def owner(pos):
            for start, end, i in boundaries:
                if start <= pos < end:
                    return i
            raise AssertionError(pos)

        wrong = 0
        mutable = bytearray(raw)
        for pos in range(len(raw)):
            original = mutable[pos]
            mutable[pos] = original ^ 0xFF
            result = verify_chain_bytes(bytes(mutable))
            if result.ok or result.first_bad_block != owner(pos):
                wrong += 1
            mutable[pos] = original
        print(f"  mutations checked: {len(raw)}")
        _report(
            f"ledger tamper detection (exhaustive {len(raw)} single-byte mutations attributed correctly)",
            wrong == 0,
        )

    def test_inclusion_proofs(self):
        ledger = self._five_block_chain()
        import dataclasses

        all_ok = True
        for block in ledger.blocks:
            for position, entry in enumerate(block.entries):
                proof = ledger.prove_inclusion(entry.content_hash)
                if not verify_inclusion(proof, entry.to_record()):
                    all_ok = False
                tampered = dataclasses.replace(proof, timestamp_millis=proof.timestamp_millis + 1)
                if verify_inclusion(tampered, entry.to_record()):
                    all_ok = False
                reprev = dataclasses.replace(proof, prev_hash=bytes(32))
                if proof.prev_hash != bytes(32) and verify_inclusion(reprev, entry.to_record()):
                    all_ok = False
        _report("ledger inclusion proofs (verify for anchored, fail for tampered headers)", all_ok)


# ---------------------------------------------------------------------------
# share semantics
# ---------------------------------------------------------------------------


class TestShareSemanticsAcceptance:
    def test_max_access_cap_100_repetitions(self, tmp_path):
        service, clock, layout = make_service(tmp_path)
        owner = onboard(service, "ana", "owner")
        notary = onboard(service, "mirela", "notary")
        import numpy as np_mod

        image, _ = layout.render_instance(np_mod.random.default_rng(3), noise_sigma=2.0)
        view = service.create_document(owner, image.to_png(), "share acceptance")
        doc_id = view["id"]
        approve(service, notary, doc_id)

        violations = 0
        with ThreadPoolExecutor(max_workers=20) as pool:
            for rep in range(100):
                share = service.create_share(owner, doc_id, [1], {"max_accesses": 5})
                outcomes = list(
                    pool.map(lambda _: service.resolve_share(share["uuid"]) != "expired", range(20))
                )
                if sum(outcomes) != 5:
                    violations += 1
        service.close()
        _report(
            "share semantics (max_accesses=5 under 20 resolvers x100: exactly 5 successes)",
            violations == 0,
        )

    def test_time_mode_with_injected_clock(self, tmp_path):
        service, clock, layout = make_service(tmp_path)
        owner = onboard(service, "ana", "owner")
        notary = onboard(service, "mirela", "notary")
        import numpy as np_mod

        image, _ = layout.render_instance(np_mod.random.default_rng(4), noise_sigma=2.0)
        doc_id = service.create_document(owner, image.to_png(), "t")["id"]
        approve(service, notary, doc_id)
        until = clock.now() + timedelta(seconds=60)
        share = service.create_share(owner, doc_id, [1], {"until": isoformat_utc(until)})
        ok_before = service.resolve_share(share["uuid"]) != "expired"
        clock.advance(60.001)  # T + epsilon
        expired_at_boundary = service.resolve_share(share["uuid"]) == "expired"
        clock.advance(3600)
        stays_expired = service.resolve_share(share["uuid"]) == "expired"
        service.close()
        _report(
            "share semantics (time mode expires at T+epsilon and never resolves after)",
            ok_before and expired_at_boundary and stays_expired,
        )


# ---------------------------------------------------------------------------
# privacy sweep
# ---------------------------------------------------------------------------


class TestPrivacySweepAcceptance:
    def test_canary_sweep_after_happy_path(self, tmp_path):
        from docvault.extract import make_cnp

        cnp_canary = make_cnp(np.random.default_rng(123))
        birthdate_canary = "14.03.1991"
        watermark = bytes.fromhex("deadbeefcafef00d1122334455667788")

        log_file = tmp_path / "service.log"
        layout = tiny_layout(cnp_value=cnp_canary, birthdate_value=birthdate_canary)
        service, clock, _ = make_service(tmp_path, layout=layout, log_file=str(log_file))
        owner = onboard(service, "ana", "owner")
        notary = onboard(service, "mirela", "notary")

        image, values = layout.render_instance(np.random.default_rng(5), noise_sigma=2.0)
        arr = image.to_array().copy()
        cnp_rect = next(f.rect for f in layout.field_specs if f.name == "cnp")
        # watermark pixels land inside the to-be-obfuscated zone
        px = np.frombuffer(watermark + b"\x00" * 2, dtype=np.uint8).reshape(6, 3)
        arr[cnp_rect.start_y + 2, cnp_rect.start_x + 2 : cnp_rect.start_x + 8] = px
        marked = RasterImage.from_array(arr)

        doc_id = service.create_document(owner, marked.to_png(), "canary doc")["id"]
        approve(service, notary, doc_id)
        assert service.state_of(doc_id).value == "COMPLETED"

        share = service.create_share(owner, doc_id, [2], {"indefinite": True})
        service.resolve_share(share["uuid"])

        master_raw = service.keystore.get(
            f"documents/{doc_id}/master", service._service_token
        )
        master = json.loads(master_raw)
        key_canaries = [bytes.fromhex(l["key"]) for z in master["zones"] for l in z["layers"]]

        canaries: list[bytes] = [
            cnp_canary.encode(),
            birthdate_canary.encode(),
            watermark,
            *key_canaries,
        ]
        # alternate encodings that would betray the same secrets
        canaries += [base64.b64encode(c) for c in canaries[:]]
        canaries += [c.hex().encode() for c in [watermark, *key_canaries]]

        data_dir = tmp_path / "data"
        scanned = []
        hits = []
        for path in sorted(data_dir.rglob("*")):
            if not path.is_file():
                continue
            raw = path.read_bytes()
            scanned.append(path.name)
            for canary in canaries:
                if canary in raw:
                    hits.append((path.name, canary[:16]))
            if path.suffix == ".png" or path.parent.name == "cas":
                pixels = RasterImage.from_png(raw).data
                for canary in (watermark,):
                    if canary in pixels:
                        hits.append((path.name, b"watermark-pixels"))
        if log_file.exists():
            raw = log_file.read_bytes()
            for canary in canaries:
                if canary in raw:
                    hits.append(("service.log", canary[:16]))
        service.close()
        print(f"  scanned files: {scanned}")
        _report(
            f"privacy sweep (0 canaries across {len(scanned)}+log files)",
            not hits and len(scanned) >= 5,
        )


# ---------------------------------------------------------------------------
# anchor harness
# ---------------------------------------------------------------------------


class TestAnchorHarnessAcceptance:
    def test_1000_submissions_at_parallelism_64(self, tmp_path):
        csv_path = tmp_path / "anchor_latency.csv"
        ledger = Ledger()
        report = run_load(ledger, n_requests=1000, parallelism=64, csv_path=csv_path)
        lines = csv_path.read_text().splitlines()
        ok = (
            report.inclusions == 1000
            and report.duplicates == 0
            and ledger.verify().ok
            and lines[0] == "request_id,submit_ms,include_ms"
            and len(lines) == 1001
            and report.p50_ms <= report.p99_ms
        )
        # context only, never asserted: upstream hardware reported ~2 s
        # average anchor latency and 500-800 TPS
        print(
            f"  harness: p50={report.p50_ms:.2f}ms p99={report.p99_ms:.2f}ms"
            f" throughput={report.throughput_per_second:.0f}/s"
        )
        _report("anchor harness (1000 @ parallelism 64, exactly-once, CSV emitted)", ok)


# ---------------------------------------------------------------------------
# metric oracles
# ---------------------------------------------------------------------------


class TestMetricOracleAcceptance:
    def test_ssim_rase_against_references_on_50_pairs(self):
        rng = np.random.default_rng(31337)
        worst_ssim = 0.0
        worst_rase = 0.0
        for i in range(50):
            w = int(rng.integers(8, 24))
            h = int(rng.integers(8, 24))
            a = random_image(rng, w, h)
            if i % 5 == 0:
                b = a
            else:
                b = random_image(rng, w, h)
            worst_ssim = max(worst_ssim, abs(ssim(a, b) - reference_ssim(a, b)))
            worst_rase = max(worst_rase, abs(rase(a, b) - reference_rase(a, b)))
        print(f"  worst deviations: ssim={worst_ssim:.2e} rase={worst_rase:.2e}")
        _report(
            "metric oracles (SSIM and RASE within 1e-6 of references on 50 pairs)",
            worst_ssim <= 1e-6 and worst_rase <= 1e-6,
        )

    def test_cer_textbook_value(self):
        _report("metric oracles (CER kitten/sitting = 3/7)", cer("kitten", "sitting") == 3 / 7)
