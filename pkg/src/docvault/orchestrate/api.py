"""REST surface over the document service (JSON, UTF-8, bearer tokens)."""

from __future__ import annotations

from fastapi import Depends, FastAPI, File, Form, Header, HTTPException, UploadFile
from pydantic import BaseModel

from ..errors import (
    AlreadyRevoked,
    DocVaultError,
    InvalidInput,
    NotFound,
    StateViolation,
    Unauthorized,
)
from .service import DocumentService


class RegisterBody(BaseModel):
    username: str
    password: str
    role: str = "owner"


class LoginBody(BaseModel):
    username: str
    password: str


class ShareBody(BaseModel):
    zones: list[int]
    mode: dict


class DecisionBody(BaseModel):
    approve: bool
    corrections: dict[str, str] = {}
    reason: str = ""


class RevokeFactBody(BaseModel):
    reason: str = ""


def _status_for(exc: DocVaultError) -> int:
    if isinstance(exc, Unauthorized):
        return 401
    if isinstance(exc, NotFound):
        return 404
    if isinstance(exc, (StateViolation, AlreadyRevoked)):
        return 409
    return 400


def create_app(service: DocumentService) -> FastAPI:
    app = FastAPI(title="docvault", version="0.1.0")

    def bearer(authorization: str = Header(default="")) -> str:
        if not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        return authorization.removeprefix("Bearer ")

    @app.exception_handler(DocVaultError)
    async def _domain_errors(request, exc: DocVaultError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=_status_for(exc), content={"detail": str(exc)})

    # -- auth ---------------------------------------------------------

    @app.post("/auth/register")
    def register(body: RegisterBody):
        user_id = service.register_user(body.username, body.password, role=body.role)
        return {"user_id": user_id}

    @app.post("/auth/login")
    def login(body: LoginBody):
        return {"token": service.login(body.username, body.password)}

    # -- documents ------------------------------------------------------

    @app.post("/documents", status_code=201)
    def create_document(
        token: str = Depends(bearer),
        file: UploadFile = File(...),
        description: str = Form(default=""),
        idempotency_token: str | None = Header(default=None, alias="Idempotency-Token"),
    ):
        payload = file.file.read()
        return service.create_document(
            token, payload, description, idempotency_token=idempotency_token
        )

    @app.get("/documents")
    def list_documents(token: str = Depends(bearer)):
        return service.list_documents(token)

    @app.get("/documents/{document_id}")
    def get_document(document_id: str, token: str = Depends(bearer)):
        return service.get_document(token, document_id)

    @app.post("/documents/{document_id}/shares", status_code=201)
    def create_share(document_id: str, body: ShareBody, token: str = Depends(bearer)):
        return service.create_share(token, document_id, body.zones, body.mode)

    @app.get("/documents/{document_id}/shares")
    def list_shares(document_id: str, token: str = Depends(bearer)):
        return service.list_shares(token, document_id)

    @app.delete("/shares/{share_uuid}")
    def revoke_share(share_uuid: str, token: str = Depends(bearer)):
        return service.revoke_share(token, share_uuid)

    # -- public endpoints --------------------------------------------------

    @app.get("/share/{share_uuid}")
    def resolve_share(share_uuid: str):
        view = service.resolve_share(share_uuid)
        if view == "not-found":
            raise HTTPException(status_code=404, detail="unknown share link")
        if view == "expired":
            raise HTTPException(status_code=410, detail="share link expired")
        return view.to_dict()

    @app.get("/verify/{ref}")
    def verify(ref: str):
        return service.verify_public(ref)

    # -- notary -------------------------------------------------------------

    @app.get("/notary/queue")
    def notary_queue(token: str = Depends(bearer)):
        return service.notary_queue(token)

    @app.post("/notary/{document_id}/decision")
    def notary_decision(document_id: str, body: DecisionBody, token: str = Depends(bearer)):
        return service.notary_decide(
            token, document_id, body.approve, body.corrections, body.reason
        )

    # -- facts ----------------------------------------------------------------

    @app.get("/facts/{subject}")
    def facts_for(subject: str, token: str = Depends(bearer)):
        return service.facts_for_subject(token, subject)

    @app.post("/facts/{fact_hash}/revoke")
    def revoke_fact(fact_hash: str, body: RevokeFactBody, token: str = Depends(bearer)):
        return service.revoke_fact(token, fact_hash, body.reason)

    app.state.service = service
    return app
