"""HTTP+JSON facade over the resolver and catalog.

Handlers are stateless; the only shared state is an immutable
catalog/index/policy snapshot swapped atomically by the reload endpoint.
Success bodies carry the resolver's wire format; every error body is
``{"code": ..., "message": ...}`` with a stable machine-readable code.
"""

from __future__ import annotations

import base64
import binascii
import importlib.metadata
import math
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .catalog import Catalog, list_duas, load_catalog
from .errors import GuideError
from .geodesy import GeoPoint
from .recognizer import ReferenceIndex, SelectionPolicy, load_index
from .resolver import (
    GpsDisabled,
    LocationAvailable,
    PermissionDenied,
    resolve_image,
    resolve_location,
    resolve_manual,
)

DEFAULT_MAX_UPLOAD_BYTES = 8 * 1024 * 1024

try:
    ENGINE_VERSION = importlib.metadata.version("placeguide")
except importlib.metadata.PackageNotFoundError:  # running from a checkout
    ENGINE_VERSION = "0.0.0+local"

#: HTTP status for each engine error code; anything unmapped is a 500.
STATUS_BY_CODE = {
    "invalid_argument": 400,
    "decode_error": 400,
    "not_found": 404,
    "not_at_known_place": 404,
    "unrecognized_scene": 422,
    "gps_activation_required": 428,
    "permission_required": 428,
}


@dataclass
class ServiceConfig:
    catalog_path: str
    index_path: str
    host: str = "127.0.0.1"
    port: int = 8000
    floor: Optional[float] = None
    accept: Optional[float] = None
    asset_dir: Optional[str] = None
    allow_cors: bool = False
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD_BYTES

    def selection_policy(self) -> SelectionPolicy:
        defaults = SelectionPolicy()
        return SelectionPolicy(
            floor=defaults.floor if self.floor is None else self.floor,
            accept=defaults.accept if self.accept is None else self.accept,
        )


@dataclass(frozen=True)
class EngineState:
    """One immutable catalog + index snapshot."""

    catalog: Catalog
    index: ReferenceIndex
    policy: SelectionPolicy


def _load_state(config: ServiceConfig) -> EngineState:
    return EngineState(
        catalog=load_catalog(config.catalog_path),
        index=load_index(config.index_path),
        policy=config.selection_policy(),
    )


def _error_json(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"code": code, "message": message}, status_code=status)


def _parse_location_body(payload: object) -> "GpsDisabled | PermissionDenied | LocationAvailable":
    if not isinstance(payload, dict):
        raise _BadRequest("body must be a JSON object")
    keys = set(payload)
    if "status" in keys:
        if keys != {"status"}:
            raise _BadRequest("a status body must contain only 'status'")
        status = payload["status"]
        if status == "gps_disabled":
            return GpsDisabled()
        if status == "permission_denied":
            return PermissionDenied()
        raise _BadRequest(
            "status must be 'gps_disabled' or 'permission_denied'"
        )
    unknown = keys - {"lat", "lon"}
    if unknown:
        raise _BadRequest(f"unknown field(s): {', '.join(sorted(unknown))}")
    for key in ("lat", "lon"):
        if key not in payload:
            raise _BadRequest(f"missing required field '{key}'")
        value = payload[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise _BadRequest(f"{key} must be a number")
        if not math.isfinite(value):
            raise _BadRequest(f"{key} must be finite")
    lat, lon = float(payload["lat"]), float(payload["lon"])
    if not -90.0 <= lat <= 90.0:
        raise _BadRequest(f"lat {lat} outside [-90, 90]")
    return LocationAvailable(point=GeoPoint(lat, lon))


class _BadRequest(Exception):
    pass


async def _read_image_payload(request: Request, limit: int) -> bytes:
    """Extract image bytes from a multipart 'image' field or JSON image_b64."""
    declared = request.headers.get("content-length")
    if declared is not None and declared.isdigit() and int(declared) > limit + 4096:
        raise _PayloadTooLarge(limit)

    content_type = request.headers.get("content-type", "")
    if content_type.startswith("multipart/form-data"):
        form = await request.form()
        upload = form.get("image")
        if upload is None or isinstance(upload, str):
            raise _BadRequest("multipart body must carry a file field named 'image'")
        data = await upload.read()
    else:
        try:
            payload = await request.json()
        except Exception:
            raise _BadRequest("body must be multipart/form-data or JSON") from None
        if not isinstance(payload, dict) or set(payload) != {"image_b64"}:
            raise _BadRequest("JSON body must contain exactly 'image_b64'")
        encoded = payload["image_b64"]
        if not isinstance(encoded, str):
            raise _BadRequest("image_b64 must be a base64 string")
        try:
            data = base64.b64decode(encoded, validate=True)
        except (binascii.Error, ValueError):
            raise _BadRequest("image_b64 is not valid base64") from None
    if len(data) > limit:
        raise _PayloadTooLarge(limit)
    return data


class _PayloadTooLarge(Exception):
    def __init__(self, limit: int):
        super().__init__(f"image exceeds the {limit} byte limit")
        self.limit = limit


def create_app(config: ServiceConfig) -> FastAPI:
    """Build the service; raises (exiting startup) if catalog/index fail to load."""
    app = FastAPI(title="placeguide", version=ENGINE_VERSION)
    app.state.engine = _load_state(config)
    app.state.config = config
    reload_lock = threading.Lock()

    if config.allow_cors:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(GuideError)
    async def _guide_error(request: Request, exc: GuideError):
        status = STATUS_BY_CODE.get(exc.code, 500)
        return _error_json(status, exc.code, str(exc))

    @app.exception_handler(_BadRequest)
    async def _bad_request(request: Request, exc: _BadRequest):
        return _error_json(400, "invalid_request", str(exc))

    @app.exception_handler(_PayloadTooLarge)
    async def _too_large(request: Request, exc: _PayloadTooLarge):
        return _error_json(413, "payload_too_large", str(exc))

    @app.get("/api/health")
    def health():
        state: EngineState = app.state.engine
        return {
            "version": ENGINE_VERSION,
            "catalog_version": state.catalog.version,
            "places": len(state.catalog.places),
            "duas": len(state.catalog.duas),
            "labels": list(state.index.manifest.labels),
        }

    @app.get("/api/places")
    def places():
        state: EngineState = app.state.engine
        return [p.to_dict() for p in sorted(state.catalog.places, key=lambda p: p.id)]

    @app.get("/api/duas")
    def duas():
        state: EngineState = app.state.engine
        return [d.to_dict() for d in list_duas(state.catalog)]

    @app.get("/api/duas/{dua_id}")
    def dua_detail(dua_id: str):
        state: EngineState = app.state.engine
        return resolve_manual(state.catalog, dua_id).to_dict()

    @app.get("/api/model/manifest")
    def manifest():
        state: EngineState = app.state.engine
        return state.index.manifest.to_dict()

    @app.post("/api/resolve/location")
    async def api_resolve_location(request: Request):
        state: EngineState = app.state.engine
        try:
            payload = await request.json()
        except Exception:
            raise _BadRequest("body must be JSON") from None
        status = _parse_location_body(payload)
        return resolve_location(state.catalog, status).to_dict()

    @app.post("/api/resolve/image")
    async def api_resolve_image(request: Request):
        state: EngineState = app.state.engine
        data = await _read_image_payload(request, config.max_upload_bytes)
        return resolve_image(state.catalog, state.index, data, state.policy).to_dict()

    @app.post("/api/admin/reload")
    def admin_reload():
        with reload_lock:
            app.state.engine = _load_state(config)
        state: EngineState = app.state.engine
        return {
            "reloaded": True,
            "catalog_version": state.catalog.version,
            "places": len(state.catalog.places),
            "duas": len(state.catalog.duas),
            "labels": list(state.index.manifest.labels),
        }

    if config.asset_dir is not None:
        app.mount(
            "/", StaticFiles(directory=Path(config.asset_dir), html=True), name="ui"
        )

    return app
