"""Command-line client mirroring the REST endpoints, plus local tooling.

Remote commands talk to a running server over HTTP (``--server``, or the
DOCVAULT_SERVER environment variable).  ``serve`` starts the API;
``corpus generate`` and ``harness anchor`` run locally without a server.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import httpx


def make_client(server: str) -> httpx.Client:
    return httpx.Client(base_url=server, timeout=60.0)


def _client(ctx) -> httpx.Client:
    return ctx.obj["client_factory"](ctx.obj["server"])


def _headers(ctx) -> dict:
    token = ctx.obj.get("token") or os.environ.get("DOCVAULT_TOKEN", "")
    return {"Authorization": f"Bearer {token}"} if token else {}


def _emit(data) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def _check(response: httpx.Response):
    if response.status_code >= 400:
        click.echo(f"error {response.status_code}: {response.text}", err=True)
        sys.exit(1)
    return response.json()


@click.group()
@click.option("--server", default=lambda: os.environ.get("DOCVAULT_SERVER", "http://127.0.0.1:8345"))
@click.option("--token", default=None, help="bearer token (or DOCVAULT_TOKEN)")
@click.pass_context
def main(ctx, server, token):
    """docvault: privacy-preserving document vault client."""
    ctx.ensure_object(dict)
    ctx.obj.setdefault("client_factory", make_client)
    ctx.obj["server"] = server
    ctx.obj["token"] = token


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
def serve(config_path, host, port):
    """Run the REST API server."""
    import uvicorn

    from .api import create_app
    from .config import load_config
    from .service import DocumentService

    config = load_config(config_path)
    if host:
        config.host = host
    if port:
        config.port = port
    service = DocumentService(config)
    uvicorn.run(create_app(service), host=config.host, port=config.port)


@main.command()
@click.argument("username")
@click.argument("password")
@click.option("--role", default="owner", type=click.Choice(["owner", "notary", "admin"]))
@click.pass_context
def register(ctx, username, password, role):
    """Create an account."""
    with _client(ctx) as client:
        _emit(_check(client.post("/auth/register", json={"username": username, "password": password, "role": role})))


@main.command()
@click.argument("username")
@click.argument("password")
@click.pass_context
def login(ctx, username, password):
    """Obtain a bearer token."""
    with _client(ctx) as client:
        _emit(_check(client.post("/auth/login", json={"username": username, "password": password})))


@main.command()
@click.argument("image", type=click.Path(exists=True))
@click.option("--description", default="")
@click.option("--idempotency-token", default=None)
@click.pass_context
def upload(ctx, image, description, idempotency_token):
    """Upload a document image (PNG) and start processing."""
    headers = _headers(ctx)
    if idempotency_token:
        headers["Idempotency-Token"] = idempotency_token
    with _client(ctx) as client:
        response = client.post(
            "/documents",
            headers=headers,
            files={"file": (Path(image).name, Path(image).read_bytes(), "image/png")},
            data={"description": description},
        )
        _emit(_check(response))


@main.command()
@click.argument("document_id", required=False)
@click.pass_context
def status(ctx, document_id):
    """Show one document (or list all of yours)."""
    with _client(ctx) as client:
        if document_id:
            _emit(_check(client.get(f"/documents/{document_id}", headers=_headers(ctx))))
        else:
            _emit(_check(client.get("/documents", headers=_headers(ctx))))


@main.command()
@click.argument("document_id")
@click.option("--zones", default="", help="comma-separated zone ids to reveal")
@click.option("--until", default=None, help="ISO timestamp expiry")
@click.option("--max-accesses", type=int, default=None)
@click.option("--indefinite", is_flag=True)
@click.pass_context
def share(ctx, document_id, zones, until, max_accesses, indefinite):
    """Create a selective-disclosure share link."""
    mode_count = sum(x is not None and x is not False for x in (until, max_accesses, indefinite or None))
    if mode_count != 1:
        click.echo("choose exactly one of --until / --max-accesses / --indefinite", err=True)
        sys.exit(2)
    mode = {"until": until} if until else ({"max_accesses": max_accesses} if max_accesses else {"indefinite": True})
    zone_ids = [int(z) for z in zones.split(",") if z.strip()]
    with _client(ctx) as client:
        response = client.post(
            f"/documents/{document_id}/shares",
            headers=_headers(ctx),
            json={"zones": zone_ids, "mode": mode},
        )
        _emit(_check(response))


@main.command()
@click.argument("share_uuid")
@click.pass_context
def revoke(ctx, share_uuid):
    """Revoke a share link."""
    with _client(ctx) as client:
        _emit(_check(client.delete(f"/shares/{share_uuid}", headers=_headers(ctx))))


@main.command()
@click.argument("ref")
@click.pass_context
def verify(ctx, ref):
    """Publicly verify a content id or share uuid."""
    with _client(ctx) as client:
        _emit(_check(client.get(f"/verify/{ref}")))


@main.command("view-share")
@click.argument("share_uuid")
@click.pass_context
def view_share(ctx, share_uuid):
    """Resolve a public share link."""
    with _client(ctx) as client:
        _emit(_check(client.get(f"/share/{share_uuid}")))


@main.group()
def notary():
    """Notary review actions."""


@notary.command("queue")
@click.pass_context
def notary_queue(ctx):
    with _client(ctx) as client:
        _emit(_check(client.get("/notary/queue", headers=_headers(ctx))))


@notary.command("decide")
@click.argument("document_id")
@click.option("--approve/--reject", default=True)
@click.option("--correction", "corrections", multiple=True, help="name=value")
@click.option("--reason", default="")
@click.pass_context
def notary_decide(ctx, document_id, approve, corrections, reason):
    fixes = dict(c.split("=", 1) for c in corrections)
    with _client(ctx) as client:
        response = client.post(
            f"/notary/{document_id}/decision",
            headers=_headers(ctx),
            json={"approve": approve, "corrections": fixes, "reason": reason},
        )
        _emit(_check(response))


@main.group()
def facts():
    """Fact queries and revocation."""


@facts.command("list")
@click.argument("subject")
@click.pass_context
def facts_list(ctx, subject):
    with _client(ctx) as client:
        _emit(_check(client.get(f"/facts/{subject}", headers=_headers(ctx))))


@facts.command("revoke")
@click.argument("fact_hash")
@click.option("--reason", default="")
@click.pass_context
def facts_revoke(ctx, fact_hash, reason):
    with _client(ctx) as client:
        response = client.post(
            f"/facts/{fact_hash}/revoke", headers=_headers(ctx), json={"reason": reason}
        )
        _emit(_check(response))


@main.group()
def template():
    """Template registration (server-local)."""


@template.command("register")
@click.argument("manifest", type=click.Path(exists=True))
@click.option("--data-dir", default=None, help="server data dir (local mode)")
def template_register(manifest, data_dir):
    """Register a template from a JSON field-spec manifest (local mode)."""
    from .config import load_config
    from .service import DocumentService

    config = load_config(None)
    if data_dir:
        config.data_dir = data_dir
    service = DocumentService(config)
    template_id = service.register_template_from_manifest(manifest)
    _emit({"template_id": template_id})


@main.group()
def corpus():
    """Synthetic corpus tooling."""


@corpus.command("generate")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--count", type=int, default=20)
@click.option("--seed", type=int, default=7)
@click.option("--noise", type=float, default=3.0)
def corpus_generate(out_dir, count, seed, noise):
    """Write synthetic documents, template manifests and ground truth."""
    from ..extract.corpus import generate_corpus

    truth = generate_corpus(out_dir, count=count, seed=seed, noise_sigma=noise)
    _emit({"documents": len(truth), "out": str(out_dir)})


@main.group()
def harness():
    """Performance harnesses."""


@harness.command("anchor")
@click.option("--n", "n_requests", type=int, default=1000)
@click.option("--parallelism", type=int, default=64)
@click.option("--csv", "csv_path", type=click.Path(), default="anchor_latency.csv")
def harness_anchor(n_requests, parallelism, csv_path):
    """Drive the anchor ledger under load and emit a latency CSV."""
    from ..anchor import Ledger, run_load

    report = run_load(Ledger(), n_requests, parallelism, csv_path=csv_path)
    _emit(report.to_dict())


if __name__ == "__main__":
    main()
