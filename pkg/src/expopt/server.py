"""HTTP service exposing live campaigns to operators and the web UI.

All campaign mutations are persisted (fsynced) before the response is sent,
and each campaign has a single-writer lock, so two operators cannot
interleave silently; stale submissions are rejected with 409. Restarting the
service recovers every campaign from its event log.
"""
from __future__ import annotations

import hashlib
import os
import re
import threading
import uuid
from pathlib import Path
from typing import Optional

from fastapi import Body, FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse

from .campaign import (
    STATUS_AWAITING_RESULT,
    CampaignConfig,
    CampaignState,
    ProtocolError,
    export_trace,
    init_campaign,
    next_recommendation,
    submit_comparison,
    submit_result,
)
from .gp import NotPositiveDefiniteError
from .scoring import Measurement
from .space import DesignPoint
from .store import CampaignStore, StoreCorruptError

STATE_DIR_ENV = "EXPOPT_STATE_DIR"
FRONTEND_DIR_ENV = "EXPOPT_FRONTEND_DIR"

_REF_PATTERN = re.compile(r"^[A-Za-z0-9_-]{1,128}$")


class CampaignRegistry:
    """In-memory cache over the store with per-campaign writer locks."""

    def __init__(self, store: CampaignStore):
        self.store = store
        self._states: dict[str, CampaignState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def lock_for(self, campaign_id: str) -> threading.Lock:
        with self._registry_lock:
            if campaign_id not in self._locks:
                self._locks[campaign_id] = threading.Lock()
            return self._locks[campaign_id]

    def get(self, campaign_id: str) -> CampaignState:
        with self._registry_lock:
            cached = self._states.get(campaign_id)
        if cached is not None:
            return cached
        if not self.store.exists(campaign_id):
            raise KeyError(campaign_id)
        state = self.store.load(campaign_id)
        with self._registry_lock:
            self._states.setdefault(campaign_id, state)
        return state

    def put(self, campaign_id: str, state: CampaignState) -> None:
        with self._registry_lock:
            self._states[campaign_id] = state

    def ids(self) -> list[str]:
        return self.store.list_ids()


def _named_point(state: CampaignState, point: DesignPoint) -> dict:
    return {
        dim.name: value for dim, value in zip(state.config.space.dims, point.coords)
    }


def _observation_view(state: CampaignState, index: int) -> dict:
    obs = state.observations[index]
    return {
        "index": index,
        "point": list(obs.point.coords),
        "point_named": _named_point(state, obs.point),
        "image_refs": list(obs.image_refs),
        "batch": obs.batch,
    }


def _summary(campaign_id: str, state: CampaignState) -> dict:
    rec = state.recommendation
    return {
        "id": campaign_id,
        "status": state.status,
        "iteration": len(state.observations),
        "iterations_done": state.iterations_done,
        "iteration_budget": state.config.iteration_budget,
        "seed_count": state.config.seed_count,
        "best_found": state.best_found,
        "space": state.config.space.to_dict(),
        "targets": state.config.targets.to_dict(),
        "pending_comparisons": [
            {
                "current_index": current,
                "prior_index": prior,
                "current": _observation_view(state, current),
                "prior": _observation_view(state, prior),
            }
            for current, prior in state.pending
        ],
        "recommendation": (
            {
                "point": list(rec.point.coords),
                "point_named": _named_point(state, rec.point),
                "acquisition_value": rec.acquisition_value,
                "iteration": rec.iteration,
                "duplicate_flag": rec.duplicate_flag,
            }
            if rec is not None
            else None
        ),
        "links": {
            "self": f"/campaigns/{campaign_id}",
            "trace": f"/campaigns/{campaign_id}/trace",
            "recommendation": f"/campaigns/{campaign_id}/recommendation",
        },
    }


def create_app(state_dir: Optional[str | os.PathLike] = None) -> FastAPI:
    if state_dir is None:
        state_dir = os.environ.get(STATE_DIR_ENV, "./expopt-state")
    store = CampaignStore(state_dir)
    registry = CampaignRegistry(store)
    images_root = Path(state_dir) / "images"

    app = FastAPI(title="expopt", docs_url=None, redoc_url=None)

    def fetch(campaign_id: str) -> CampaignState:
        try:
            return registry.get(campaign_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no campaign {campaign_id!r}")
        except StoreCorruptError as exc:
            raise HTTPException(
                status_code=500, detail=f"campaign state is corrupt: {exc}"
            )

    def check_expected_iteration(state: CampaignState, payload: dict) -> None:
        expected = payload.get("expected_iteration")
        if expected is not None and int(expected) != len(state.observations):
            raise HTTPException(
                status_code=409,
                detail=(
                    f"expected iteration {expected}, campaign is at "
                    f"{len(state.observations)}"
                ),
            )

    @app.exception_handler(ProtocolError)
    def on_protocol_error(request: Request, exc: ProtocolError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    def on_value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(NotPositiveDefiniteError)
    def on_numerical_error(request: Request, exc: NotPositiveDefiniteError):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.get("/campaigns")
    def list_campaigns() -> dict:
        entries = []
        for campaign_id in registry.ids():
            try:
                state = registry.get(campaign_id)
            except StoreCorruptError as exc:
                entries.append({"id": campaign_id, "error": str(exc)})
                continue
            entries.append(
                {
                    "id": campaign_id,
                    "status": state.status,
                    "iteration": len(state.observations),
                    "best_found": state.best_found,
                }
            )
        return {"campaigns": entries}

    @app.post("/campaigns", status_code=201)
    def create_campaign(payload: dict = Body(...)) -> dict:
        config = CampaignConfig.from_dict(payload["config"])
        seeds = [
            (DesignPoint(s["point"]), Measurement.from_dict(s["measurement"]))
            for s in payload["seed_observations"]
        ]
        campaign_id = payload.get("id") or uuid.uuid4().hex[:12]
        if store.exists(campaign_id):
            raise HTTPException(status_code=409, detail=f"campaign {campaign_id!r} exists")
        state = init_campaign(config, seeds)
        event = {
            "kind": "init",
            "config": config.to_dict(),
            "seeds": [[list(p.coords), m.to_dict()] for p, m in seeds],
        }
        store.append(campaign_id, event, state)
        registry.put(campaign_id, state)
        return _summary(campaign_id, state)

    @app.get("/campaigns/{campaign_id}")
    def get_campaign(campaign_id: str) -> dict:
        return _summary(campaign_id, fetch(campaign_id))

    @app.post("/campaigns/{campaign_id}/recommendation")
    def post_recommendation(campaign_id: str, payload: Optional[dict] = Body(None)) -> dict:
        with registry.lock_for(campaign_id):
            state = fetch(campaign_id)
            check_expected_iteration(state, payload or {})
            already_outstanding = state.status == STATUS_AWAITING_RESULT
            new_state, recommendation = next_recommendation(state)
            if not already_outstanding:
                store.append(campaign_id, {"kind": "recommend"}, new_state)
                registry.put(campaign_id, new_state)
            summary = _summary(campaign_id, new_state)
        summary["recommendation_repeated"] = already_outstanding
        return summary

    @app.post("/campaigns/{campaign_id}/results")
    def post_result(campaign_id: str, payload: dict = Body(...)) -> dict:
        point = DesignPoint(payload["point"])
        measurement = Measurement(
            median_length=float(payload["median_length"]),
            median_diameter=float(payload["median_diameter"]),
        )
        image_refs = tuple(payload.get("image_refs", ()))
        with registry.lock_for(campaign_id):
            state = fetch(campaign_id)
            check_expected_iteration(state, payload)
            new_state = submit_result(state, point, measurement, image_refs)
            event = {
                "kind": "result",
                "point": list(point.coords),
                "measurement": measurement.to_dict(),
                "image_refs": list(image_refs),
            }
            store.append(campaign_id, event, new_state)
            registry.put(campaign_id, new_state)
            return _summary(campaign_id, new_state)

    @app.post("/campaigns/{campaign_id}/comparisons")
    def post_comparison(campaign_id: str, payload: dict = Body(...)) -> dict:
        prior_index = int(payload["prior_index"])
        outcome = str(payload["outcome"])
        with registry.lock_for(campaign_id):
            state = fetch(campaign_id)
            check_expected_iteration(state, payload)
            new_state = submit_comparison(state, prior_index, outcome)
            event = {"kind": "comparison", "prior": prior_index, "outcome": outcome}
            store.append(campaign_id, event, new_state)
            registry.put(campaign_id, new_state)
            return _summary(campaign_id, new_state)

    @app.get("/campaigns/{campaign_id}/trace")
    def get_trace(campaign_id: str, request: Request) -> Response:
        state = fetch(campaign_id)
        table = export_trace(state)
        accept = request.headers.get("accept", "")
        if "text/csv" in accept:
            return Response(content=table.to_csv(), media_type="text/csv")
        return JSONResponse(
            content={"columns": list(table.columns), "rows": [list(r) for r in table.rows]}
        )

    @app.post("/campaigns/{campaign_id}/images", status_code=201)
    async def upload_image(campaign_id: str, request: Request) -> dict:
        fetch(campaign_id)
        blob = await request.body()
        if not blob:
            raise HTTPException(status_code=400, detail="empty image upload")
        ref = hashlib.sha256(blob).hexdigest()[:16]
        target_dir = images_root / campaign_id
        target_dir.mkdir(parents=True, exist_ok=True)
        target = target_dir / ref
        if not target.exists():
            tmp = target.with_suffix(".tmp")
            tmp.write_bytes(blob)
            os.replace(tmp, target)
        return {"ref": ref}

    @app.get("/campaigns/{campaign_id}/images/{ref}")
    def get_image(campaign_id: str, ref: str) -> Response:
        fetch(campaign_id)
        if not _REF_PATTERN.match(ref):
            raise HTTPException(status_code=400, detail="invalid image ref")
        target = images_root / campaign_id / ref
        if not target.exists():
            raise HTTPException(status_code=404, detail=f"no image {ref!r}")
        return Response(content=target.read_bytes(), media_type="application/octet-stream")

    frontend_dir = os.environ.get(FRONTEND_DIR_ENV)
    if frontend_dir and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app
