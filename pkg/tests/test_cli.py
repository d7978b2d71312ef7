"""CLI client driven against an in-process API via the test transport."""

import json

import numpy as np
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from docvault.orchestrate.api import create_app
from docvault.orchestrate.cli import main
from workflow_fixtures import make_service


@pytest.fixture
def stack(tmp_path):
    service, clock, layout = make_service(tmp_path)
    app = create_app(service)
    factory = lambda server: TestClient(app, base_url="http://testserver")
    runner = CliRunner()

    def invoke(*args, token=None):
        obj = {"client_factory": factory}
        argv = list(args)
        if token:
            argv = ["--token", token] + argv
        result = runner.invoke(main, argv, obj=obj, catch_exceptions=False)
        return result

    yield invoke, service, clock, layout, tmp_path
    service.close()


def _json(result):
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


class TestCliFlow:
    def test_register_login_upload_status_share_verify(self, stack):
        invoke, service, clock, layout, tmp_path = stack
        _json(invoke("register", "ana", "pw"))
        owner_token = _json(invoke("login", "ana", "pw"))["token"]
        _json(invoke("register", "mirela", "pw", "--role", "notary"))
        notary_token = _json(invoke("login", "mirela", "pw"))["token"]

        image, _ = layout.render_instance(np.random.default_rng(11), noise_sigma=2.0)
        png = tmp_path / "doc.png"
        png.write_bytes(image.to_png())
        doc = _json(invoke("upload", str(png), "--description", "cli doc", token=owner_token))
        doc_id = doc["id"]

        queue = _json(invoke("notary", "queue", token=notary_token))
        assert queue[0]["document_id"] == doc_id
        _json(invoke("notary", "decide", doc_id, "--approve", token=notary_token))

        status = _json(invoke("status", doc_id, token=owner_token))
        assert status["state"] == "COMPLETED"
        zone_id = status["zones"][0]["zone_id"]

        share = _json(
            invoke("share", doc_id, "--zones", str(zone_id), "--max-accesses", "3", token=owner_token)
        )
        view = _json(invoke("view-share", share["uuid"]))
        assert view["content_id"] == status["content_id"]

        verify = _json(invoke("verify", status["content_id"]))
        assert verify["hash_match"] is True

        revoked = _json(invoke("revoke", share["uuid"], token=owner_token))
        assert revoked["active"] is False

    def test_share_requires_exactly_one_mode(self, stack):
        invoke, *_ = stack
        result = invoke("share", "some-doc", "--zones", "1")
        assert result.exit_code == 2

    def test_error_paths_exit_nonzero(self, stack):
        invoke, *_ = stack
        result = invoke("status", "unknown-doc", token="bogus")
        assert result.exit_code == 1


class TestLocalCommands:
    def test_corpus_generate(self, stack, tmp_path):
        invoke, *_ = stack
        out = tmp_path / "corpus"
        result = _json(invoke("corpus", "generate", "--out", str(out), "--count", "3", "--seed", "1"))
        assert result["documents"] == 3
        truth = json.loads((out / "ground_truth.json").read_text())
        assert len(truth) == 3
        assert (out / "templates" / "id_card.json").exists()
        assert (out / "docs" / "doc_000.png").exists()

    def test_harness_anchor(self, stack, tmp_path):
        invoke, *_ = stack
        csv_path = tmp_path / "latency.csv"
        result = _json(
            invoke("harness", "anchor", "--n", "50", "--parallelism", "8", "--csv", str(csv_path))
        )
        assert result["inclusions"] == 50
        assert result["duplicates"] == 0
        assert csv_path.read_text().splitlines()[0] == "request_id,submit_ms,include_ms"
