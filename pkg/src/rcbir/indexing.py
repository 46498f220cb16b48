"""Feature quantization, bucket keys, and the persistent image index.

Entries are keyed two ways: a combined key built from the three quantized
texture digits (100*entropy + 10*energy + contrast) and a location cell
giving which of the 3x3 grid cells the region occupies. Both key spaces
are tiny, so buckets are plain dict-of-list hash maps.

The on-disk format is little-endian binary: magic ``RCBIR``, a version
byte, the payload, and a trailing CRC-32 over everything before it.
"""

from __future__ import annotations

import io
import json
import struct
import time
import zlib
from dataclasses import dataclass, field

from .errors import (
    CorruptIndexError,
    DegenerateRegionError,
    IndexVersionError,
    NoRegionError,
    RcbirError,
    UnsupportedFormatError,
)
from .imaging import load_image
from .segmentation import segment
from .texture import DEFAULT_DISTANCE, DEFAULT_NG, TextureFeatures, region_texture

MAGIC = b"RCBIR"
FORMAT_VERSION = 1

FEATURE_NAMES = ("energy", "entropy", "contrast")


@dataclass(frozen=True)
class FeatureCalibration:
    """Per-feature min/max observed over the indexed corpus.

    Frozen into the index file so query-time quantization reproduces the
    build-time digits exactly.
    """

    energy_min: float = 0.0
    energy_max: float = 0.0
    entropy_min: float = 0.0
    entropy_max: float = 0.0
    contrast_min: float = 0.0
    contrast_max: float = 0.0

    def bounds(self, name: str) -> tuple[float, float]:
        return (getattr(self, f"{name}_min"), getattr(self, f"{name}_max"))

    @classmethod
    def from_features(cls, features: list[TextureFeatures]) -> "FeatureCalibration":
        if not features:
            return cls()
        return cls(
            energy_min=min(f.energy for f in features),
            energy_max=max(f.energy for f in features),
            entropy_min=min(f.entropy for f in features),
            entropy_max=max(f.entropy for f in features),
            contrast_min=min(f.contrast for f in features),
            contrast_max=max(f.contrast for f in features),
        )


@dataclass(frozen=True)
class IndexEntry:
    image_id: str
    class_label: str | None
    source_path: str
    features: TextureFeatures  # region features, raw
    global_features: TextureFeatures  # whole-image features for the full-scan baseline
    roi_bbox: tuple[int, int, int, int]
    roi_area: int
    location_cell: int
    combined_key: int


@dataclass(frozen=True)
class SkippedImage:
    image_id: str
    source_path: str
    reason: str


@dataclass
class ImageIndex:
    entries: list[IndexEntry]
    calibration: FeatureCalibration
    ng: int
    d: int
    created_at: float
    skipped: list[SkippedImage] = field(default_factory=list)
    version: int = FORMAT_VERSION
    combined_buckets: dict[int, list[str]] = field(default_factory=dict)
    location_buckets: dict[int, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.combined_buckets and not self.location_buckets:
            self.rebuild_buckets()
        self._by_id = {e.image_id: e for e in self.entries}

    def rebuild_buckets(self) -> None:
        combined: dict[int, list[str]] = {}
        location: dict[int, list[str]] = {}
        for e in self.entries:
            combined.setdefault(e.combined_key, []).append(e.image_id)
            location.setdefault(e.location_cell, []).append(e.image_id)
        self.combined_buckets = combined
        self.location_buckets = location

    def entry(self, image_id: str) -> IndexEntry:
        return self._by_id[image_id]

    def __contains__(self, image_id: str) -> bool:
        return image_id in self._by_id

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ImageIndex):
            return NotImplemented
        return (
            self.entries == other.entries
            and self.calibration == other.calibration
            and self.ng == other.ng
            and self.d == other.d
            and self.created_at == other.created_at
            and self.skipped == other.skipped
            and self.version == other.version
            and self.combined_buckets == other.combined_buckets
            and self.location_buckets == other.location_buckets
        )


def quantize_feature(value: float, lo: float, hi: float) -> int:
    """Scale a raw feature into a digit 0-9 using frozen corpus bounds.

    Values are clamped into [lo, hi] first, so out-of-range query features
    saturate instead of failing; a degenerate calibration (hi == lo) maps
    everything to 0.
    """
    if hi <= lo:
        return 0
    v = min(max(value, lo), hi)
    q = int(10.0 * (v - lo) / (hi - lo))
    return 9 if q > 9 else q


def combined_key(f: TextureFeatures, cal: FeatureCalibration) -> int:
    """100*[entropy] + 10*[energy] + [contrast] over quantized digits."""
    qe = quantize_feature(f.entropy, *cal.bounds("entropy"))
    qn = quantize_feature(f.energy, *cal.bounds("energy"))
    qc = quantize_feature(f.contrast, *cal.bounds("contrast"))
    return 100 * qe + 10 * qn + qc


def location_axis(lo: int, hi: int, extent: int) -> int:
    """One axis of the 3x3 grid assignment.

    Walks the cell boundaries c, 2c, ... (c = extent // 3) up to the one
    just below hi and steps right whenever the boundary is at least as far
    from hi as from lo, i.e. whenever the span [lo, hi] sits mostly past
    the boundary. Clamped to [0, 2].
    """
    c = extent // 3
    if c == 0:
        return 0
    loc = 0
    for i in range(1, hi // c + 1):
        if abs(c * i - hi) >= abs(c * i - lo):
            loc += 1
    return min(loc, 2)


def location_cell(bbox: tuple[int, int, int, int], width: int, height: int) -> int:
    """Grid cell 0-8 (row-major) the bounding box mostly covers."""
    x1, y1, x2, y2 = bbox
    row = location_axis(y1, y2, height)
    col = location_axis(x1, x2, width)
    return row * 3 + col


def build_index(
    corpus,
    ng: int = DEFAULT_NG,
    d: int = DEFAULT_DISTANCE,
) -> ImageIndex:
    """Index a corpus of (image_id, class_label, path) triples.

    Pass 1 segments every image and extracts raw region features (plus
    whole-image features for the full-scan baseline); calibration bounds
    come from the region features of the images that segmented. Pass 2
    assigns keys and fills the buckets. Images that fail to load or
    segment land on the skip list and the build continues.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("corpus is empty")

    measured = []
    skipped: list[SkippedImage] = []
    for image_id, class_label, path in corpus:
        path = str(path)
        try:
            img = load_image(path)
            roi, _ = segment(img)
            features = region_texture(img, roi.mask, ng, d)
            global_features = region_texture(img, None, ng, d)
        except NoRegionError:
            skipped.append(SkippedImage(image_id, path, "no_region"))
            continue
        except DegenerateRegionError:
            skipped.append(SkippedImage(image_id, path, "degenerate_region"))
            continue
        except (OSError, UnsupportedFormatError, ValueError) as exc:
            skipped.append(SkippedImage(image_id, path, f"unreadable: {exc}"))
            continue
        measured.append((image_id, class_label, path, img, roi, features, global_features))

    calibration = FeatureCalibration.from_features([m[5] for m in measured])

    entries = []
    for image_id, class_label, path, img, roi, features, global_features in measured:
        entries.append(
            IndexEntry(
                image_id=image_id,
                class_label=class_label,
                source_path=path,
                features=features,
                global_features=global_features,
                roi_bbox=roi.bbox,
                roi_area=roi.area,
                location_cell=location_cell(roi.bbox, img.width, img.height),
                combined_key=combined_key(features, calibration),
            )
        )

    return ImageIndex(
        entries=entries,
        calibration=calibration,
        ng=ng,
        d=d,
        created_at=time.time(),
        skipped=skipped,
    )


# --- serialization ---------------------------------------------------------


class _Writer:
    def __init__(self):
        self.buf = io.BytesIO()

    def u8(self, v):
        self.buf.write(struct.pack("<B", v))

    def u16(self, v):
        self.buf.write(struct.pack("<H", v))

    def u32(self, v):
        self.buf.write(struct.pack("<I", v))

    def f64(self, v):
        self.buf.write(struct.pack("<d", v))

    def string(self, s: str):
        raw = s.encode("utf-8")
        self.u32(len(raw))
        self.buf.write(raw)

    def opt_string(self, s: str | None):
        if s is None:
            self.u8(0)
        else:
            self.u8(1)
            self.string(s)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CorruptIndexError("index file truncated")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u8(self) -> int:
        return struct.unpack("<B", self.take(1))[0]

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def f64(self) -> float:
        return struct.unpack("<d", self.take(8))[0]

    def string(self) -> str:
        n = self.u32()
        try:
            return self.take(n).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptIndexError("index file holds invalid text") from exc

    def opt_string(self) -> str | None:
        return self.string() if self.u8() else None


def _write_features(w: _Writer, f: TextureFeatures):
    w.f64(f.energy)
    w.f64(f.entropy)
    w.f64(f.contrast)


def _read_features(r: _Reader) -> TextureFeatures:
    return TextureFeatures(energy=r.f64(), entropy=r.f64(), contrast=r.f64())


def index_to_bytes(idx: ImageIndex) -> bytes:
    w = _Writer()
    w.buf.write(MAGIC)
    w.u8(idx.version)
    w.u32(idx.ng)
    w.u32(idx.d)
    w.f64(idx.created_at)
    for name in FEATURE_NAMES:
        lo, hi = idx.calibration.bounds(name)
        w.f64(lo)
        w.f64(hi)
    w.u32(len(idx.entries))
    for e in idx.entries:
        w.string(e.image_id)
        w.opt_string(e.class_label)
        w.string(e.source_path)
        _write_features(w, e.features)
        _write_features(w, e.global_features)
        for v in e.roi_bbox:
            w.u32(v)
        w.u32(e.roi_area)
        w.u8(e.location_cell)
        w.u16(e.combined_key)
    w.u32(len(idx.skipped))
    for s in idx.skipped:
        w.string(s.image_id)
        w.string(s.source_path)
        w.string(s.reason)
    body = w.buf.getvalue()
    return body + struct.pack("<I", zlib.crc32(body))


def index_from_bytes(data: bytes) -> ImageIndex:
    if len(data) < len(MAGIC) + 1 + 4:
        raise CorruptIndexError("file too short to be an index")
    if data[: len(MAGIC)] != MAGIC:
        raise CorruptIndexError("bad magic: not an index file")
    version = data[len(MAGIC)]
    if version != FORMAT_VERSION:
        raise IndexVersionError(f"index version {version} not supported (expected {FORMAT_VERSION})")
    body, tail = data[:-4], data[-4:]
    if struct.unpack("<I", tail)[0] != zlib.crc32(body):
        raise CorruptIndexError("checksum mismatch")

    r = _Reader(body)
    r.take(len(MAGIC) + 1)
    ng = r.u32()
    d = r.u32()
    created_at = r.f64()
    cal_values = {}
    for name in FEATURE_NAMES:
        cal_values[f"{name}_min"] = r.f64()
        cal_values[f"{name}_max"] = r.f64()
    calibration = FeatureCalibration(**cal_values)
    n_entries = r.u32()
    entries = []
    for _ in range(n_entries):
        image_id = r.string()
        class_label = r.opt_string()
        source_path = r.string()
        features = _read_features(r)
        global_features = _read_features(r)
        bbox = (r.u32(), r.u32(), r.u32(), r.u32())
        roi_area = r.u32()
        cell = r.u8()
        key = r.u16()
        entries.append(
            IndexEntry(
                image_id=image_id,
                class_label=class_label,
                source_path=source_path,
                features=features,
                global_features=global_features,
                roi_bbox=bbox,
                roi_area=roi_area,
                location_cell=cell,
                combined_key=key,
            )
        )
    n_skipped = r.u32()
    skipped = [SkippedImage(r.string(), r.string(), r.string()) for _ in range(n_skipped)]
    if r.pos != len(body):
        raise CorruptIndexError("trailing bytes after index payload")
    return ImageIndex(
        entries=entries,
        calibration=calibration,
        ng=ng,
        d=d,
        created_at=created_at,
        skipped=skipped,
        version=version,
    )


def save_index(idx: ImageIndex, path) -> None:
    with open(path, "wb") as fh:
        fh.write(index_to_bytes(idx))


def load_index(path) -> ImageIndex:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise RcbirError(f"cannot read index: {exc}") from exc
    return index_from_bytes(data)


def index_to_json(idx: ImageIndex) -> dict:
    """Debug-friendly JSON mirror of the full index."""
    return {
        "version": idx.version,
        "ng": idx.ng,
        "d": idx.d,
        "created_at": idx.created_at,
        "calibration": {
            name: {"min": idx.calibration.bounds(name)[0], "max": idx.calibration.bounds(name)[1]}
            for name in FEATURE_NAMES
        },
        "entries": [
            {
                "image_id": e.image_id,
                "class_label": e.class_label,
                "source_path": e.source_path,
                "features": {
                    "energy": e.features.energy,
                    "entropy": e.features.entropy,
                    "contrast": e.features.contrast,
                },
                "global_features": {
                    "energy": e.global_features.energy,
                    "entropy": e.global_features.entropy,
                    "contrast": e.global_features.contrast,
                },
                "roi_bbox": list(e.roi_bbox),
                "roi_area": e.roi_area,
                "location_cell": e.location_cell,
                "combined_key": e.combined_key,
            }
            for e in idx.entries
        ],
        "skipped": [
            {"image_id": s.image_id, "source_path": s.source_path, "reason": s.reason}
            for s in idx.skipped
        ],
        "combined_buckets": {str(k): v for k, v in sorted(idx.combined_buckets.items())},
        "location_buckets": {str(k): v for k, v in sorted(idx.location_buckets.items())},
    }


def export_index_json(idx: ImageIndex) -> str:
    return json.dumps(index_to_json(idx), indent=2, sort_keys=False)
