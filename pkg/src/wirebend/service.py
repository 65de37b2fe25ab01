"""Local HTTP service backing the browser design studio.

One scene per session (the ``X-Session-Id`` header selects a session,
defaulting to ``"default"``). Mutations on a session are serialized by a
per-session lock and snapshotted onto a bounded undo stack; every
mutating endpoint returns the full updated scene so the client always
re-renders from a single source of truth.

Status codes: 400 malformed body, 404 unknown id/session, 409 constraint
violation (structured detail in the body), 422 infeasible connector or
track spec.
"""

from __future__ import annotations

import os
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Any

from fastapi import FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import scene_io
from .connectors import (
    Splice,
    WirePart,
    check_orientation,
    generate,
    link,
    spec_from_dict,
)
from .errors import (
    ConstraintViolation,
    InfeasibleSpec,
    InfeasibleTrack,
    UnknownLabel,
    VersionError,
    WirebendError,
)
from .machine import MachineProfile, min_feed, profile_from_dict, profile_to_dict
from .marble import TrackSpec, generate_track
from .paths import Polyline3, SimplifyParams, detect_conflicts, simplify

UNDO_DEPTH = 50


@dataclass
class SessionState:
    scene: scene_io.Scene
    profile: MachineProfile
    undo_stack: deque = field(default_factory=lambda: deque(maxlen=UNDO_DEPTH))
    lock: threading.Lock = field(default_factory=threading.Lock)


class SceneInit(BaseModel):
    profile: dict
    scene: dict | None = None


class NewPart(BaseModel):
    # either a raw drawn polyline or a parametric connector spec
    points: list[list[float]] | None = None
    kind: str | None = None
    params: dict = Field(default_factory=dict)


class SimplifyBody(BaseModel):
    smoothing_strength: float = 0.4
    min_reduction_ratio: float = 0.0


class LinkBody(BaseModel):
    part_a: int
    end_a: str
    part_b: int
    end_b: str
    sleeve_length_mm: float = 10.0


class TrackBody(BaseModel):
    center: dict
    marble_diameter_mm: float = 16.0
    clip_spacing_mm: float = 50.0
    rail_contact_deg: float = 45.0


class ExportBody(BaseModel):
    format: str = "coords"


def create_app() -> FastAPI:
    app = FastAPI(title="wirebend service", version="0.1.0")
    # the studio page is served from a separate local port
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, SessionState] = {}
    sessions_lock = threading.Lock()

    def get_session(session_id: str) -> SessionState:
        with sessions_lock:
            state = sessions.get(session_id)
        if state is None:
            raise UnknownLabel(f"session {session_id!r} has no scene; POST /scene first")
        return state

    def scene_response(state: SessionState) -> dict:
        return scene_io.scene_to_dict(state.scene)

    def snapshot(state: SessionState) -> None:
        state.undo_stack.append(state.scene.copy())

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "invalid body", "detail": exc.errors()})

    @app.exception_handler(WirebendError)
    async def on_domain_error(request: Request, exc: WirebendError):
        status = 409
        body: dict[str, Any] = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, (InfeasibleSpec, InfeasibleTrack)):
            status = 422
        elif isinstance(exc, UnknownLabel):
            status = 404
        elif isinstance(exc, ConstraintViolation):
            body["violations"] = exc.violations
        elif isinstance(exc, VersionError):
            status = 400
        return JSONResponse(status_code=status, content=body)

    @app.exception_handler(ValueError)
    async def on_value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": "ValueError", "message": str(exc)})

    @app.post("/scene")
    def post_scene(body: SceneInit, x_session_id: str = Header(default="default")):
        profile = profile_from_dict(body.profile)
        scene = scene_io.scene_from_dict(body.scene) if body.scene else scene_io.Scene()
        state = SessionState(scene=scene, profile=profile)
        with sessions_lock:
            sessions[x_session_id] = state
        return scene_response(state)

    @app.get("/scene")
    def get_scene(x_session_id: str = Header(default="default")):
        return scene_response(get_session(x_session_id))

    @app.get("/profile")
    def get_profile(x_session_id: str = Header(default="default")):
        return profile_to_dict(get_session(x_session_id).profile)

    @app.post("/parts")
    def post_part(body: NewPart, x_session_id: str = Header(default="default")):
        state = get_session(x_session_id)
        with state.lock:
            snapshot(state)
            try:
                if body.points is not None:
                    state.scene.add_part(Polyline3.from_list(body.points))
                elif body.kind is not None:
                    spec = spec_from_dict({"kind": body.kind, "params": body.params})
                    state.scene.add_part(generate(spec, state.profile))
                else:
                    raise ValueError("body needs either 'points' or a connector 'kind'")
            except Exception:
                state.undo_stack.pop()
                raise
            return scene_response(state)

    @app.delete("/parts/{label}")
    def delete_part(label: int, x_session_id: str = Header(default="default")):
        state = get_session(x_session_id)
        with state.lock:
            snapshot(state)
            try:
                state.scene.remove_part(label)
            except Exception:
                state.undo_stack.pop()
                raise
            return scene_response(state)

    @app.post("/parts/{label}/simplify")
    def simplify_part(
        label: int, body: SimplifyBody, x_session_id: str = Header(default="default")
    ):
        state = get_session(x_session_id)
        with state.lock:
            snapshot(state)
            try:
                part = state.scene.part(label)
                params = SimplifyParams(
                    smoothing_strength=body.smoothing_strength,
                    min_reduction_ratio=body.min_reduction_ratio,
                    min_feed_mm=min_feed(state.profile),
                    min_bend_deg=state.profile.min_plastic_deg,
                )
                simplified = WirePart(path=simplify(part.path, params), label=label)
                state.scene.parts = [
                    simplified if p.label == label else p for p in state.scene.parts
                ]
            except Exception:
                state.undo_stack.pop()
                raise
            return scene_response(state)

    @app.post("/links")
    def post_link(body: LinkBody, x_session_id: str = Header(default="default")):
        state = get_session(x_session_id)
        with state.lock:
            snapshot(state)
            try:
                splice = Splice(
                    part_a=body.part_a,
                    end_a=body.end_a,
                    part_b=body.part_b,
                    end_b=body.end_b,
                    sleeve_length_mm=body.sleeve_length_mm,
                )
                link(state.scene, splice)
            except Exception:
                state.undo_stack.pop()
                raise
            return scene_response(state)

    @app.get("/conflicts")
    def get_conflicts(
        threshold_deg: float | None = None,
        proximity_mm: float | None = None,
        x_session_id: str = Header(default="default"),
    ):
        state = get_session(x_session_id)
        threshold = threshold_deg if threshold_deg is not None else state.profile.max_bend_deg
        proximity = (
            proximity_mm if proximity_mm is not None else 2.0 * state.profile.wire_diameter_mm
        )
        conflicts = []
        for part in state.scene.parts:
            report = detect_conflicts(part.path, threshold_deg=threshold, proximity_mm=proximity)
            for c in report.conflicts:
                conflicts.append(
                    {
                        "part": part.label,
                        "segment_a": c.segment_a,
                        "segment_b": c.segment_b,
                        "closest_point_a": list(c.closest_point_a),
                        "closest_point_b": list(c.closest_point_b),
                        "min_distance_mm": c.min_distance_mm,
                    }
                )
        return {"conflicts": conflicts}

    @app.get("/warnings/orientation")
    def get_orientation_warnings(
        gravity: str = "0,-1,0",
        tolerance_mm: float = 2.0,
        x_session_id: str = Header(default="default"),
    ):
        state = get_session(x_session_id)
        g = tuple(float(v) for v in gravity.split(","))
        warnings_list = check_orientation(state.scene, gravity=g, tolerance_mm=tolerance_mm)
        return {
            "warnings": [
                {
                    "splice_index": w.splice_index,
                    "part_a": w.part_a,
                    "part_b": w.part_b,
                    "height_delta_mm": w.height_delta_mm,
                    "message": w.message,
                }
                for w in warnings_list
            ]
        }

    @app.post("/track")
    def post_track(body: TrackBody, x_session_id: str = Header(default="default")):
        state = get_session(x_session_id)
        with state.lock:
            snapshot(state)
            try:
                spec = TrackSpec(
                    center_path=Polyline3.from_list(body.center["points"]),
                    marble_diameter_mm=body.marble_diameter_mm,
                    clip_spacing_mm=body.clip_spacing_mm,
                    rail_contact_deg=body.rail_contact_deg,
                )
                track = generate_track(spec, state.profile)
                for rail in track.rails:
                    state.scene.add_part(rail)
                for support in track.supports:
                    state.scene.add_part(support)
                state.scene.clip_positions.extend(track.clip_positions)
            except Exception:
                state.undo_stack.pop()
                raise
            return scene_response(state)

    @app.post("/export")
    def post_export(body: ExportBody, x_session_id: str = Header(default="default")):
        state = get_session(x_session_id)
        result = scene_io.export_assembly(state.scene, state.profile, file_format=body.format)
        return {
            "files": {name: data.decode("utf-8") for name, data in result.files.items()},
            "plan": scene_io.plan_to_dict(result.plan),
        }

    @app.post("/undo")
    def post_undo(x_session_id: str = Header(default="default")):
        state = get_session(x_session_id)
        with state.lock:
            if not state.undo_stack:
                raise ConstraintViolation("nothing to undo")
            state.scene = state.undo_stack.pop()
            return scene_response(state)

    return app


app = create_app()


def run() -> None:  # pragma: no cover - manual entry point
    import uvicorn

    port = int(os.environ.get("PORT", "8571"))
    uvicorn.run(app, host="127.0.0.1", port=port)


if __name__ == "__main__":  # pragma: no cover
    run()
