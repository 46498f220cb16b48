"""HTTP query service over a loaded index.

Stateless request handling: the only shared state is the immutable index.
Uploaded query images are processed in memory and never persisted; the
query response embeds the ROI overlay as a data URI instead of a URL so
nothing about an upload outlives its request.
"""

from __future__ import annotations

import base64
import io
import json
import os
import sys

import numpy as np
from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.responses import JSONResponse, Response
from PIL import Image, ImageDraw

from .errors import QuerySegmentationError, RcbirError, UnsupportedFormatError
from .imaging import GrayImage, from_array, load_image
from .indexing import ImageIndex, load_index
from .retrieval import MODES, QueryResult, query, query_by_id
from .segmentation import compute_t_star, segment

PAGE_SIZE = 4  # results shown four at a time
LISTING_PAGE_SIZE = 50
THUMB_MAX_SIDE = 128


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, extra: dict | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.extra = extra or {}


def _decode_upload(data: bytes) -> GrayImage:
    try:
        with Image.open(io.BytesIO(data)) as img:
            img.load()
            arr = np.asarray(img.convert("L"), dtype=np.uint8)
    except Exception as exc:
        raise ApiError(400, "bad_image", f"cannot decode image: {exc}") from exc
    return from_array(arr)


def _png_bytes(img: Image.Image) -> bytes:
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def _overlay_data_uri(gray: GrayImage, bbox: tuple[int, int, int, int] | None) -> str:
    rgb = Image.fromarray(gray.pixels, mode="L").convert("RGB")
    if bbox is not None:
        draw = ImageDraw.Draw(rgb)
        draw.rectangle(bbox, outline=(255, 48, 48), width=2)
    return "data:image/png;base64," + base64.b64encode(_png_bytes(rgb)).decode("ascii")


def create_app(idx: ImageIndex, corpus_root: str, cors_origin: str | None = None) -> FastAPI:
    app = FastAPI(title="rcbir query service")

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    def resolve_path(source_path: str) -> str:
        if os.path.isabs(source_path) and os.path.exists(source_path):
            return source_path
        candidate = os.path.join(corpus_root, source_path)
        if os.path.exists(candidate):
            return candidate
        basename = os.path.join(corpus_root, os.path.basename(source_path))
        if os.path.exists(basename):
            return basename
        raise ApiError(404, "not_found", f"source image for {source_path!r} is missing")

    def get_entry(image_id: str):
        if image_id not in idx:
            raise ApiError(404, "not_found", f"unknown image id {image_id!r}")
        return idx.entry(image_id)

    def entry_meta(e) -> dict:
        return {
            "image_id": e.image_id,
            "class_label": e.class_label,
            "features": {
                "energy": e.features.energy,
                "entropy": e.features.entropy,
                "contrast": e.features.contrast,
            },
            "roi_bbox": list(e.roi_bbox),
            "roi_area": e.roi_area,
            "location_cell": e.location_cell,
            "combined_key": e.combined_key,
        }

    def parse_mode_k_page(mode: str, k, page) -> tuple[str, int, int]:
        if mode not in MODES:
            raise ApiError(400, "bad_request", f"mode must be one of {MODES}, got {mode!r}")
        try:
            k = int(k)
            page = int(page)
        except (TypeError, ValueError):
            raise ApiError(400, "bad_request", "k and page must be integers")
        if k < 1:
            raise ApiError(400, "bad_request", f"k must be >= 1, got {k}")
        if page < 1:
            raise ApiError(400, "bad_request", f"page must be >= 1, got {page}")
        return mode, k, page

    def query_response(res: QueryResult, page: int, query_info: dict, k: int) -> dict:
        total = len(res.results)
        total_pages = max(1, -(-total // PAGE_SIZE))
        start = (page - 1) * PAGE_SIZE
        page_items = res.results[start : start + PAGE_SIZE]
        return {
            "mode": res.mode,
            "k": k,
            "query_key": res.query_key,
            "candidates_examined": res.candidates_examined,
            "query": query_info,
            "page": page,
            "page_size": PAGE_SIZE,
            "total_results": total,
            "total_pages": total_pages,
            "results": [
                {
                    "image_id": r.image_id,
                    "class_label": r.class_label,
                    "distance": r.distance,
                    "combined_key": r.combined_key,
                    "location_cell": r.location_cell,
                    "roi_bbox": list(r.roi_bbox),
                    "image_url": f"/images/{r.image_id}",
                    "thumbnail_url": f"/images/{r.image_id}/thumb",
                    "mask_url": f"/images/{r.image_id}/mask",
                }
                for r in page_items
            ],
        }

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        body = {"error": exc.message, "code": exc.code, **exc.extra}
        return JSONResponse(status_code=exc.status, content=body)

    @app.exception_handler(RcbirError)
    async def domain_error_handler(request: Request, exc: RcbirError):
        return JSONResponse(status_code=500, content={"error": str(exc), "code": "internal"})

    @app.get("/health")
    def health():
        return {"status": "ok", "index_version": idx.version, "entries": len(idx)}

    @app.get("/images")
    def list_images(page: int = 1, page_size: int = LISTING_PAGE_SIZE):
        if page < 1 or page_size < 1:
            raise ApiError(400, "bad_request", "page and page_size must be >= 1")
        total = len(idx.entries)
        start = (page - 1) * page_size
        return {
            "page": page,
            "page_size": page_size,
            "total": total,
            "total_pages": max(1, -(-total // page_size)),
            "images": [
                {
                    "id": e.image_id,
                    "class": e.class_label,
                    "cell": e.location_cell,
                    "key": e.combined_key,
                }
                for e in idx.entries[start : start + page_size]
            ],
        }

    @app.get("/images/{image_id}")
    def image_bytes(image_id: str):
        e = get_entry(image_id)
        path = resolve_path(e.source_path)
        with Image.open(path) as img:
            img.load()
            data = _png_bytes(img.convert("L"))
        return Response(content=data, media_type="image/png")

    @app.get("/images/{image_id}/mask")
    def image_mask(image_id: str):
        e = get_entry(image_id)
        img = load_image(resolve_path(e.source_path))
        try:
            roi, _ = segment(img)
        except RcbirError as exc:
            raise ApiError(422, "no_region", str(exc)) from exc
        data = _png_bytes(Image.fromarray(roi.mask * 255, mode="L"))
        return Response(content=data, media_type="image/png")

    @app.get("/images/{image_id}/thumb")
    def image_thumb(image_id: str):
        e = get_entry(image_id)
        path = resolve_path(e.source_path)
        with Image.open(path) as img:
            img.load()
            thumb = img.convert("L")
            thumb.thumbnail((THUMB_MAX_SIDE, THUMB_MAX_SIDE))
            data = _png_bytes(thumb)
        return Response(content=data, media_type="image/png")

    @app.get("/images/{image_id}/meta")
    def image_meta(image_id: str):
        return entry_meta(get_entry(image_id))

    @app.post("/query")
    async def query_upload(
        image: UploadFile = File(...),
        mode: str = Form("rbir"),
        k: int = Form(10),
        page: int = Form(1),
    ):
        mode, k, page = parse_mode_k_page(mode, k, page)
        data = await image.read()
        gray = _decode_upload(data)
        try:
            res = query(idx, gray, mode=mode, k=k)
        except QuerySegmentationError as exc:
            # hand the UI the threshold diagnostics behind the failure
            report = compute_t_star(gray)
            raise ApiError(
                422,
                "no_region",
                str(exc),
                extra={
                    "threshold": {
                        "t_iterative": report.t_iterative,
                        "t_otsu": report.t_otsu,
                        "t_star": report.t_star,
                        "iterations": report.iterations,
                    }
                },
            ) from exc
        except ValueError as exc:
            raise ApiError(400, "bad_request", str(exc)) from exc
        bbox = None
        if mode != "cbir":
            roi, _ = segment(gray)
            bbox = roi.bbox
        query_info = {
            "source_id": None,
            "features": {
                "energy": res.query_features.energy,
                "entropy": res.query_features.entropy,
                "contrast": res.query_features.contrast,
            },
            "roi_bbox": list(bbox) if bbox else None,
            "overlay": _overlay_data_uri(gray, bbox),
        }
        return query_response(res, page, query_info, k)

    @app.post("/query/by-id")
    async def query_by_id_endpoint(request: Request):
        try:
            payload = await request.json()
        except json.JSONDecodeError as exc:
            raise ApiError(400, "bad_request", f"invalid JSON body: {exc}") from exc
        if not isinstance(payload, dict) or "id" not in payload:
            raise ApiError(400, "bad_request", "body must be a JSON object with an 'id' field")
        mode, k, page = parse_mode_k_page(
            payload.get("mode", "rbir"), payload.get("k", 10), payload.get("page", 1)
        )
        e = get_entry(str(payload["id"]))
        try:
            res = query_by_id(idx, e.image_id, mode=mode, k=k)
        except ValueError as exc:
            raise ApiError(400, "bad_request", str(exc)) from exc
        gray = load_image(resolve_path(e.source_path))
        bbox = e.roi_bbox if mode != "cbir" else None
        query_info = {
            "source_id": e.image_id,
            "features": {
                "energy": res.query_features.energy,
                "entropy": res.query_features.entropy,
                "contrast": res.query_features.contrast,
            },
            "roi_bbox": list(bbox) if bbox else None,
            "overlay": _overlay_data_uri(gray, bbox),
        }
        return query_response(res, page, query_info, k)

    return app


def run_service(
    index_path: str,
    corpus_root: str,
    host: str,
    port: int,
    cors_origin: str | None = None,
) -> int:
    try:
        idx = load_index(index_path)
    except (RcbirError, OSError, UnsupportedFormatError) as exc:
        print(f"error: cannot load index: {exc}", file=sys.stderr)
        return 1
    import uvicorn

    app = create_app(idx, corpus_root, cors_origin=cors_origin)
    uvicorn.run(app, host=host, port=port, log_level="info")
    return 0
