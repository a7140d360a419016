"""HTTP interface over TutorService.

Timestamps may be supplied by the client for reproducible sessions; when
omitted the server clock is used.
"""

from __future__ import annotations

import time
from typing import Any, Optional

from fastapi import FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .formulas import FormulaSyntaxError
from .proofs import ProofError
from .rules import ArityError, UnknownRuleError
from .service import (
    ServiceError,
    SessionNotFoundError,
    TutorService,
)


class CreateSessionRequest(BaseModel):
    student_id: str = "anonymous"
    seed: Optional[int] = None
    ts: Optional[float] = None


class ConditionRequest(BaseModel):
    condition: str
    ts: Optional[float] = None


class StepRequest(BaseModel):
    direction: str
    rule: Optional[str] = None
    statement: Optional[str] = None
    target: Optional[str] = None
    parents: list[str] = []
    ts: Optional[float] = None


class HintRequest(BaseModel):
    ts: Optional[float] = None


class ExplanationRequest(BaseModel):
    text: str
    ts: Optional[float] = None


class CompleteRequest(BaseModel):
    ts: Optional[float] = None


def _now(ts: Optional[float]) -> float:
    return time.time() if ts is None else ts


def create_app(service: Optional[TutorService] = None) -> FastAPI:
    svc = service or TutorService()
    app = FastAPI(title="logictutor", version="0.1.0")
    app.state.service = svc
    # the browser UI is served separately from this API, so cross-origin
    # requests must be allowed (no credentials are involved)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(SessionNotFoundError)
    async def _not_found(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(ServiceError)
    async def _conflict(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(ProofError)
    async def _proof_error(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(FormulaSyntaxError)
    async def _syntax_error(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(UnknownRuleError)
    async def _unknown_rule(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ArityError)
    async def _arity_error(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/rules")
    def rules() -> list[dict[str, Any]]:
        return svc.rules_view()

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionRequest) -> dict[str, Any]:
        session = svc.create_session(body.student_id, _now(body.ts), seed=body.seed)
        return {
            "session_id": session.id,
            "student_id": session.student_id,
            "seed": session.seed,
            "total_slots": len(session.slots),
        }

    @app.post("/sessions/{session_id}/condition")
    def assign_condition(session_id: str, body: ConditionRequest) -> dict[str, Any]:
        svc.assign_condition(session_id, body.condition, _now(body.ts))
        return svc.problem_view(session_id)

    @app.get("/sessions/{session_id}/problem")
    def problem(session_id: str) -> dict[str, Any]:
        return svc.problem_view(session_id)

    @app.post("/sessions/{session_id}/step")
    def step(session_id: str, body: StepRequest) -> dict[str, Any]:
        payload = {
            "direction": body.direction,
            "rule": body.rule,
            "statement": body.statement,
            "target": body.target,
            "parents": body.parents,
        }
        return svc.submit_step(session_id, payload, _now(body.ts))

    @app.post("/sessions/{session_id}/hint")
    def hint(session_id: str, body: HintRequest) -> dict[str, Any]:
        return {"hint": svc.request_hint(session_id, _now(body.ts))}

    @app.post("/sessions/{session_id}/explanation")
    def explanation(session_id: str, body: ExplanationRequest) -> dict[str, Any]:
        return svc.submit_explanation(session_id, body.text, _now(body.ts))

    @app.post("/sessions/{session_id}/complete")
    def complete(session_id: str, body: CompleteRequest) -> dict[str, Any]:
        return svc.complete_problem(session_id, _now(body.ts))

    @app.get("/sessions/{session_id}/log")
    def log(session_id: str) -> Response:
        return Response(
            content=svc.session_log(session_id), media_type="application/x-ndjson"
        )

    return app


app = create_app()
