"""Read-only HTTP API over a loaded dataset, vector index, and grid map.

All artifacts are loaded fully before the app is created, then shared
immutably across request handlers; no endpoint mutates anything on disk.
Error bodies are always {"code", "message"}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .core import ClipRecord, DatasetStats, compute_stats, load_clips
from .encoder import EncoderConfig, load_encoder_config, remote_encode
from .errors import (
    EncoderUnavailable,
    InvalidConfig,
    NoEmotionFound,
    OutOfBounds,
)
from .latentmap import GridMap, LatentPoint, grid_lookup, import_points
from .pipeline import DEFAULT_LEXICON, SuffixLexicon
from .retrieval import VectorIndex, query_strategy_filter, query_strategy_full


@dataclass(frozen=True)
class ServiceConfig:
    listen: str = "127.0.0.1:8000"
    dataset_dir: str | None = None
    index_path: str | None = None
    map_path: str | None = None
    points_path: str | None = None
    remote_encoder_url: str | None = None
    default_k: int = 10
    cors_origins: tuple[str, ...] = ()

    @property
    def host_port(self) -> tuple[str, int]:
        host, _, port = self.listen.rpartition(":")
        if not host or not port.isdigit():
            raise InvalidConfig(f"listen must be host:port, got {self.listen!r}")
        return host, int(port)


@dataclass
class AppState:
    """Everything a running service shares across requests (immutable)."""

    clips: dict[str, ClipRecord] = field(default_factory=dict)
    stats: dict[str, DatasetStats] | None = None
    enc_cfg: EncoderConfig = EncoderConfig()
    lexicon: SuffixLexicon = DEFAULT_LEXICON
    index: VectorIndex | None = None
    grid: GridMap | None = None
    map_bytes: bytes | None = None
    points: dict[str, tuple[float, float]] = field(default_factory=dict)
    clip_cells: dict[str, tuple[int, int]] = field(default_factory=dict)
    remote_encoder_url: str | None = None
    default_k: int = 10

    def attach_grid(self, grid: GridMap, raw: bytes | None = None) -> None:
        self.grid = grid
        self.map_bytes = raw if raw is not None else (
            json.dumps(grid.to_document(), ensure_ascii=False, indent=2) + "\n"
        ).encode("utf-8")
        self.clip_cells = {
            clip_id: cell for cell, clips in grid.cells.items() for clip_id in clips
        }

    def attach_points(self, points: list[LatentPoint]) -> None:
        self.points = {p.clip_id: (p.x, p.y) for p in points}


def load_state(cfg: ServiceConfig) -> AppState:
    """Load every configured artifact up front; a missing path raises
    InvalidConfig naming it, before any listener is bound."""
    state = AppState(
        remote_encoder_url=cfg.remote_encoder_url,
        default_k=cfg.default_k,
    )
    if cfg.dataset_dir:
        dataset_dir = Path(cfg.dataset_dir)
        clips_path = dataset_dir / "clips.jsonl"
        if not clips_path.exists():
            raise InvalidConfig(f"missing clip file: {clips_path}")
        clips = load_clips(clips_path)
        state.clips = {c.id: c for c in clips}
        state.stats = {
            kind: compute_stats(clips, kind) for kind in ("naive", "emotional")
        }
        encoder_path = dataset_dir / "encoder.json"
        if encoder_path.exists():
            state.enc_cfg = load_encoder_config(encoder_path)
    if cfg.index_path:
        if not Path(cfg.index_path).exists():
            raise InvalidConfig(f"missing index file: {cfg.index_path}")
        state.index = VectorIndex.load(cfg.index_path)
    if cfg.map_path:
        if not Path(cfg.map_path).exists():
            raise InvalidConfig(f"missing map file: {cfg.map_path}")
        raw = Path(cfg.map_path).read_bytes()
        state.attach_grid(GridMap.from_document(json.loads(raw)), raw)
    if cfg.points_path:
        if not Path(cfg.points_path).exists():
            raise InvalidConfig(f"missing points file: {cfg.points_path}")
        state.attach_points(import_points(cfg.points_path))
    return state


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _clip_summary(state: AppState, clip_id: str) -> dict:
    clip = state.clips.get(clip_id)
    xy = state.points.get(clip_id)
    summary = {
        "id": clip_id,
        "naive_captions": list(clip.naive_captions) if clip else [],
        "emotional_captions": list(clip.emotional_captions) if clip else [],
        "emotion": clip.emotion.value if clip and clip.emotion else None,
        "media_url": clip.media_url if clip else None,
        "x": xy[0] if xy else None,
        "y": xy[1] if xy else None,
    }
    return summary


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="latentwander", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"code": "bad_request", "message": str(exc)}
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/api/map")
    def get_map():
        if state.grid is None or state.map_bytes is None:
            raise ApiError(503, "map_not_loaded", "no grid map is loaded")
        return Response(content=state.map_bytes, media_type="application/json")

    @app.get("/api/grid/{i}/{j}")
    def get_grid_cell(i: int, j: int):
        if state.grid is None:
            raise ApiError(503, "map_not_loaded", "no grid map is loaded")
        try:
            clip_ids = grid_lookup(state.grid, i, j)
        except OutOfBounds as exc:
            raise ApiError(404, exc.code, str(exc))
        return {"clips": [_clip_summary(state, cid) for cid in clip_ids]}

    @app.get("/api/clips/{clip_id}")
    def get_clip(clip_id: str):
        if not state.clips:
            raise ApiError(503, "dataset_not_loaded", "no dataset is loaded")
        clip = state.clips.get(clip_id)
        if clip is None:
            raise ApiError(404, "unknown_clip", f"no clip with id {clip_id!r}")
        detail = clip.to_json_dict()
        xy = state.points.get(clip_id)
        detail["x"] = xy[0] if xy else None
        detail["y"] = xy[1] if xy else None
        return detail

    @app.get("/api/stats")
    def get_stats():
        if state.stats is None:
            raise ApiError(503, "dataset_not_loaded", "no dataset is loaded")
        return {kind: stats.as_dict() for kind, stats in state.stats.items()}

    @app.post("/api/query")
    async def post_query(request: Request):
        if state.index is None:
            raise ApiError(503, "index_not_loaded", "no vector index is loaded")
        if state.grid is None:
            raise ApiError(503, "map_not_loaded", "no grid map is loaded")
        try:
            payload = await request.json()
        except Exception:
            raise ApiError(400, "bad_request", "body must be a JSON object")
        if not isinstance(payload, dict):
            raise ApiError(400, "bad_request", "body must be a JSON object")
        text = payload.get("text", "")
        if not isinstance(text, str) or not text.strip():
            raise ApiError(400, "empty_text", "query text must be non-empty")
        strategy = payload.get("strategy", "full")
        if strategy not in ("filter", "full"):
            raise ApiError(400, "invalid_strategy", "strategy must be 'filter' or 'full'")
        k = payload.get("k", state.default_k)
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise ApiError(400, "invalid_k", "k must be an integer >= 1")

        encode_fn = None
        if state.remote_encoder_url:
            url = state.remote_encoder_url
            dim = state.index.dimension

            def encode_fn(query_text: str, mode: str) -> np.ndarray:
                return remote_encode(query_text, url, mode, expected_dim=dim).values

        fallback_used = False
        try:
            if strategy == "filter":
                try:
                    result = query_strategy_filter(
                        state.index, text, k, state.enc_cfg, state.lexicon, encode_fn
                    )
                except NoEmotionFound:
                    fallback_used = True
                    result = query_strategy_full(
                        state.index, text, k, state.enc_cfg, state.lexicon, encode_fn
                    )
            else:
                result = query_strategy_full(
                    state.index, text, k, state.enc_cfg, state.lexicon, encode_fn
                )
        except EncoderUnavailable as exc:
            raise ApiError(502, exc.code, str(exc))

        results = []
        for clip_id, score in result.ranked:
            cell = state.clip_cells.get(clip_id)
            results.append(
                {
                    "clip": _clip_summary(state, clip_id),
                    "score": score,
                    "cell": {"i": cell[0], "j": cell[1]} if cell else None,
                }
            )
        return {
            "results": results,
            "comparisons": result.comparisons_made,
            "fallback_used": fallback_used,
        }

    return app


def create_app_from_config(cfg: ServiceConfig) -> FastAPI:
    app = create_app(load_state(cfg))
    if cfg.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cfg.cors_origins),
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )
    return app


def serve(cfg: ServiceConfig) -> None:
    """Load everything, then bind the listener (requests never observe a
    partially loaded state)."""
    import uvicorn

    app = create_app_from_config(cfg)
    host, port = cfg.host_port
    uvicorn.run(app, host=host, port=port, log_level="warning")
