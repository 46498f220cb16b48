"""Query-by-example search over a built index.

Three modes: ``rbir`` compares only the images in the query's combined-key
bucket, ``lbir`` only those in its location-cell bucket, and ``cbir`` is
the no-index baseline scanning every entry on whole-image features.
Candidates are ranked by Euclidean distance over the raw feature triples,
ties broken by image id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateRegionError, NoRegionError, QuerySegmentationError
from .imaging import GrayImage
from .indexing import ImageIndex, IndexEntry, combined_key, location_cell
from .segmentation import segment
from .texture import TextureFeatures, region_texture

MODES = ("rbir", "lbir", "cbir")


@dataclass(frozen=True)
class RankedItem:
    image_id: str
    class_label: str | None
    distance: float
    combined_key: int
    location_cell: int
    roi_bbox: tuple[int, int, int, int]


@dataclass(frozen=True)
class QueryResult:
    results: tuple[RankedItem, ...]
    query_features: TextureFeatures
    query_key: int | None  # combined key (rbir), cell (lbir), None for the full scan
    mode: str
    candidates_examined: int


def euclidean_distance(a: TextureFeatures, b: TextureFeatures) -> float:
    return math.sqrt(
        (a.energy - b.energy) ** 2
        + (a.entropy - b.entropy) ** 2
        + (a.contrast - b.contrast) ** 2
    )


def _validate(idx: ImageIndex, mode: str, k: int) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(idx) == 0:
        raise ValueError("index holds no entries")


def _rank(
    idx: ImageIndex,
    candidates: list[str],
    query_features: TextureFeatures,
    mode: str,
    query_key: int | None,
    k: int,
    exclude_id: str | None = None,
) -> QueryResult:
    entries = [idx.entry(i) for i in candidates if i != exclude_id]

    def dist(e: IndexEntry) -> float:
        stored = e.global_features if mode == "cbir" else e.features
        return euclidean_distance(query_features, stored)

    ranked = sorted(((dist(e), e.image_id, e) for e in entries), key=lambda t: (t[0], t[1]))
    items = tuple(
        RankedItem(
            image_id=e.image_id,
            class_label=e.class_label,
            distance=d,
            combined_key=e.combined_key,
            location_cell=e.location_cell,
            roi_bbox=e.roi_bbox,
        )
        for d, _, e in ranked[:k]
    )
    return QueryResult(
        results=items,
        query_features=query_features,
        query_key=query_key,
        mode=mode,
        candidates_examined=len(entries),
    )


def query(idx: ImageIndex, img: GrayImage, mode: str = "rbir", k: int = 10) -> QueryResult:
    """Run a query image through the mode's pipeline and rank its bucket.

    rbir/lbir segment the image and look only at the matching bucket (an
    unmatched key yields an empty result); cbir skips segmentation entirely
    and scans every entry. Raises QuerySegmentationError when the query
    image has no usable region.
    """
    _validate(idx, mode, k)
    if mode == "cbir":
        features = region_texture(img, None, idx.ng, idx.d)
        candidates = [e.image_id for e in idx.entries]
        return _rank(idx, candidates, features, mode, None, k)

    try:
        roi, _ = segment(img)
        features = region_texture(img, roi.mask, idx.ng, idx.d)
    except NoRegionError as exc:
        raise QuerySegmentationError(f"query image has no region: {exc}") from exc
    except DegenerateRegionError as exc:
        raise QuerySegmentationError(f"query region is degenerate: {exc}") from exc

    if mode == "rbir":
        key = combined_key(features, idx.calibration)
        candidates = idx.combined_buckets.get(key, [])
    else:
        key = location_cell(roi.bbox, img.width, img.height)
        candidates = idx.location_buckets.get(key, [])
    return _rank(idx, list(candidates), features, mode, key, k)


def query_by_id(
    idx: ImageIndex,
    image_id: str,
    mode: str = "rbir",
    k: int = 10,
    exclude_self: bool = False,
) -> QueryResult:
    """Query with an already-indexed image, reusing its stored features.

    The pipeline is deterministic, so this returns exactly what re-running
    query() on the source image would; it just skips the image processing.
    Set exclude_self for leave-one-out evaluation.
    """
    _validate(idx, mode, k)
    if image_id not in idx:
        raise KeyError(image_id)
    e = idx.entry(image_id)
    exclude = image_id if exclude_self else None
    if mode == "cbir":
        candidates = [x.image_id for x in idx.entries]
        return _rank(idx, candidates, e.global_features, mode, None, k, exclude_id=exclude)
    if mode == "rbir":
        candidates = idx.combined_buckets.get(e.combined_key, [])
        return _rank(idx, list(candidates), e.features, mode, e.combined_key, k, exclude_id=exclude)
    candidates = idx.location_buckets.get(e.location_cell, [])
    return _rank(idx, list(candidates), e.features, mode, e.location_cell, k, exclude_id=exclude)
