"""HTTP + server-push session service.

Endpoints:
    POST /sessions                   create a session from a config document
    GET  /sessions/{id}              state + full analytics report
    POST /sessions/{id}/actions      submit offer / accept / end
    GET  /sessions/{id}/proposals    pending and decided proposals
    POST /proposals/{id}/decision    approve / reject with a rationale
    GET  /sessions/{id}/events       server-sent event stream

Each session processes one request at a time (per-session lock, arrival
order); the event stream may be consumed by any number of subscribers.  All
session artifacts are persisted as append-only files under the data directory
(FAIRNEG_DATA overrides the default).
"""

from __future__ import annotations

import asyncio
import json
import os
import uuid
from pathlib import Path
from typing import Any, Mapping

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, StreamingResponse

from .errors import FairnegError, ProtocolError
from .protocol import Action
from .runner import (
    SessionRuntime,
    config_from_json,
    outcome_to_json,
    transcript_record,
)

DATA_DIR_ENV = "FAIRNEG_DATA"


class SessionHolder:
    """One live session plus its lock, event history, and subscribers."""

    def __init__(self, session_id: str, runtime: SessionRuntime):
        self.id = session_id
        self.runtime = runtime
        self.lock = asyncio.Lock()
        self.events: list[dict] = []
        self.subscribers: list[asyncio.Queue] = []
        runtime._event_listener = self._publish

    def _publish(self, kind: str, payload: Mapping) -> None:
        event = {"id": len(self.events), "event": kind, "data": dict(payload)}
        self.events.append(event)
        for queue in list(self.subscribers):
            queue.put_nowait(event)

    def subscribe(self) -> asyncio.Queue:
        queue: asyncio.Queue = asyncio.Queue()
        self.subscribers.append(queue)
        return queue

    def unsubscribe(self, queue: asyncio.Queue) -> None:
        if queue in self.subscribers:
            self.subscribers.remove(queue)

    def state_view(self) -> dict:
        runtime = self.runtime
        state = runtime.state
        view: dict[str, Any] = {
            "id": self.id,
            "status": state.status,
            "round": state.round,
            "turn": state.turn if state.status == "open" else None,
            "deadline_rounds": state.settings.deadline_rounds,
            "transcript": [
                transcript_record(state, entry) for entry in state.entries
            ],
            "analytics": runtime.analytics(),
            "reports": [r.to_json() for r in runtime.reports],
            "aberrations": [a.to_json() for a in runtime.aberrations],
            "pending_proposals": [p.to_json() for p in runtime.pending_proposals()],
        }
        if state.status != "open":
            view["outcome"] = outcome_to_json(runtime.outcome())
        return view


def create_app(data_dir: Path | None = None) -> FastAPI:
    if data_dir is None:
        data_dir = Path(os.environ.get(DATA_DIR_ENV, "./fairneg-data"))
    data_dir = Path(data_dir)

    app = FastAPI(title="fairneg", version="0.1.0")
    sessions: dict[str, SessionHolder] = {}
    proposal_owner: dict[str, str] = {}
    app.state.sessions = sessions
    app.state.data_dir = data_dir

    def holder_or_404(session_id: str) -> SessionHolder:
        holder = sessions.get(session_id)
        if holder is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")
        return holder

    @app.exception_handler(FairnegError)
    async def fairneg_error(request: Request, exc: FairnegError):
        status = 409 if isinstance(exc, ProtocolError) else 400
        return JSONResponse(
            status_code=status,
            content={"error": {"type": type(exc).__name__, "message": str(exc)}},
        )

    @app.post("/sessions")
    async def create_session_endpoint(request: Request):
        body = await request.json()
        config = config_from_json(body)
        session_id = uuid.uuid4().hex[:12]
        runtime = SessionRuntime(config, out_dir=data_dir / session_id)
        holder = SessionHolder(session_id, runtime)
        sessions[session_id] = holder
        async with holder.lock:
            runtime.run_builtin_turns()
            for pid in runtime.proposals:
                proposal_owner[pid] = session_id
            if runtime.state.status != "open":
                runtime.finalize()
        return {"id": session_id, "state": holder.state_view()}

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str, view: str | None = None):
        holder = holder_or_404(session_id)
        async with holder.lock:
            data = holder.state_view()
            if view == "transformed":
                data["analytics"] = holder.runtime.analytics(transformed=True)
            elif view == "raw":
                data["analytics"] = holder.runtime.analytics(transformed=False)
            return data

    @app.post("/sessions/{session_id}/actions")
    async def post_action(session_id: str, request: Request):
        holder = holder_or_404(session_id)
        body = await request.json()
        party = body.get("party")
        action_doc = body.get("action") or {}
        kind = action_doc.get("kind")
        runtime = holder.runtime
        async with holder.lock:
            if kind == "offer":
                bid = runtime.state.settings.domain.bid_from_mapping(
                    action_doc.get("bid") or {}
                )
                action = Action.offer(bid)
            elif kind == "accept":
                action = Action.accept()
            elif kind == "end":
                action = Action.end()
            else:
                raise HTTPException(status_code=400, detail=f"unknown action kind {kind!r}")
            entry = runtime.submit(party, action)
            runtime.run_builtin_turns()
            for pid in runtime.proposals:
                proposal_owner.setdefault(pid, session_id)
            if runtime.state.status != "open":
                runtime.finalize()
            return {
                "entry": transcript_record(runtime.state, entry),
                "state": holder.state_view(),
            }

    @app.get("/sessions/{session_id}/proposals")
    async def get_proposals(session_id: str, status: str | None = None):
        holder = holder_or_404(session_id)
        async with holder.lock:
            proposals = list(holder.runtime.proposals.values())
            if status is not None:
                proposals = [p for p in proposals if p.status == status]
            return {"proposals": [p.to_json() for p in proposals]}

    @app.post("/proposals/{proposal_id}/decision")
    async def post_decision(proposal_id: str, request: Request):
        session_id = proposal_owner.get(proposal_id)
        if session_id is None:
            raise HTTPException(status_code=404, detail=f"no proposal {proposal_id!r}")
        holder = holder_or_404(session_id)
        body = await request.json()
        decision = body.get("decision")
        rationale = body.get("rationale", "")
        payload = body.get("payload")
        async with holder.lock:
            entry = holder.runtime.handle_decision(
                proposal_id, decision, rationale, payload=payload
            )
            holder.runtime.run_builtin_turns()
            for pid in holder.runtime.proposals:
                proposal_owner.setdefault(pid, session_id)
            if holder.runtime.state.status != "open":
                holder.runtime.finalize()
            return {"entry": entry.to_json(), "state": holder.state_view()}

    @app.get("/sessions/{session_id}/events")
    async def event_stream(session_id: str):
        holder = holder_or_404(session_id)

        async def generate():
            queue = holder.subscribe()
            try:
                for event in list(holder.events):
                    yield _sse_format(event)
                while True:
                    if holder.runtime.state.status != "open" and queue.empty():
                        yield 'event: stream_end\ndata: {}\n\n'
                        return
                    try:
                        event = await asyncio.wait_for(queue.get(), timeout=0.5)
                    except asyncio.TimeoutError:
                        continue
                    yield _sse_format(event)
            finally:
                holder.unsubscribe(queue)

        return StreamingResponse(generate(), media_type="text/event-stream")

    return app


def _sse_format(event: dict) -> str:
    return (
        f"id: {event['id']}\n"
        f"event: {event['event']}\n"
        f"data: {json.dumps(event['data'])}\n\n"
    )
