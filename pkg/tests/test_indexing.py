import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import coverage_cell
from rcbir.errors import CorruptIndexError, IndexVersionError
from rcbir.imaging import save_pgm
from rcbir.indexing import (
    FeatureCalibration,
    ImageIndex,
    IndexEntry,
    SkippedImage,
    build_index,
    combined_key,
    index_from_bytes,
    index_to_bytes,
    load_index,
    location_axis,
    location_cell,
    quantize_feature,
    save_index,
)
from rcbir.texture import TextureFeatures

# --- quantization -----------------------------------------------------------


def test_quantize_feature_bounds():
    assert quantize_feature(2.5, 2.5, 9.0) == 0
    assert quantize_feature(9.0, 2.5, 9.0) == 9
    assert quantize_feature(4.99, 0.0, 10.0) == 4
    assert quantize_feature(5.0, 0.0, 10.0) == 5


def test_quantize_feature_degenerate_and_clamping():
    assert quantize_feature(123.0, 5.0, 5.0) == 0
    assert quantize_feature(-100.0, 0.0, 1.0) == 0
    assert quantize_feature(+100.0, 0.0, 1.0) == 9


@given(st.floats(0, 1), st.floats(0, 1), st.floats(min_value=1e-6, max_value=1e6))
@settings(max_examples=200, deadline=None)
def test_quantize_monotone_in_value(a, b, span):
    lo, hi = 0.0, span
    va, vb = sorted((a * span, b * span))
    assert quantize_feature(va, lo, hi) <= quantize_feature(vb, lo, hi)


def test_quantize_stable_over_repeats():
    rng = np.random.default_rng(5)
    for _ in range(200):
        lo = float(rng.uniform(-10, 10))
        hi = lo + float(rng.uniform(0, 20))
        v = float(rng.uniform(lo - 5, hi + 5))
        first = quantize_feature(v, lo, hi)
        assert all(quantize_feature(v, lo, hi) == first for _ in range(3))
        assert 0 <= first <= 9


def test_combined_key_digit_positions():
    cal = FeatureCalibration(0.0, 1.0, 0.0, 1.0, 0.0, 1.0)
    f = TextureFeatures(energy=0.35, entropy=0.55, contrast=0.75)
    # digits: entropy 5 (hundreds), energy 3 (tens), contrast 7 (ones)
    assert combined_key(f, cal) == 537
    assert combined_key(TextureFeatures(0.0, 0.0, 0.0), cal) == 0
    assert combined_key(TextureFeatures(1.0, 1.0, 1.0), cal) == 999


# --- location --------------------------------------------------------------


def test_location_axis_boundary_walk_cases():
    assert location_axis(0, 50, 256) == 0
    assert location_axis(100, 160, 256) == 1
    assert location_axis(10, 250, 256) == 1


def test_location_axis_clamped():
    assert location_axis(255, 255, 256) == 2


def test_location_cell_examples():
    assert location_cell((108, 108, 147, 147), 256, 256) == 4
    assert location_cell((0, 0, 50, 50), 256, 256) == 0
    assert location_cell((200, 0, 250, 50), 256, 256) == 2


def test_location_cell_uses_row_major_numbering():
    # bottom-left corner box: row 2, col 0 -> cell 6
    assert location_cell((0, 200, 50, 250), 256, 256) == 6


def test_location_heuristic_vs_true_coverage_report(capsys):
    """Documented property report: the boundary-walk heuristic is normative
    and disagrees with exact maximal coverage on some wide spans."""
    extent = 64
    divergent = []
    for lo in range(extent):
        for hi in range(lo, extent):
            heur = location_axis(lo, hi, extent)
            true = coverage_cell((lo, 0, hi, 0), extent, extent) % 3
            if heur != true:
                divergent.append((lo, hi, heur, true))
    total = extent * (extent + 1) // 2
    with capsys.disabled():
        print(
            f"\n[property report] location heuristic vs true coverage on extent {extent}: "
            f"{len(divergent)}/{total} axis spans diverge "
            f"(first: {divergent[0] if divergent else None})"
        )
    # frozen count documents the heuristic's behavior; a change here means
    # the normative algorithm changed
    assert len(divergent) == 42
    # only spans at least two grid cells wide ever diverge
    assert all(hi - lo >= 2 * (extent // 3) for lo, hi, _, _ in divergent)


# --- index building ---------------------------------------------------------


def _write_blob_image(path, value=220, bg=30, size=32, at=(4, 4), side=10):
    img = np.full((size, size), bg, dtype=np.uint8)
    y, x = at
    img[y : y + side, x : x + side] = value
    save_pgm(img, path)
    return img


def test_build_index_singleton(tmp_path):
    p = tmp_path / "one.pgm"
    _write_blob_image(p)
    idx = build_index([("one", "classA", p)])
    assert len(idx) == 1
    e = idx.entries[0]
    assert idx.combined_buckets == {e.combined_key: ["one"]}
    assert idx.location_buckets == {e.location_cell: ["one"]}
    cal = idx.calibration
    assert cal.energy_min == cal.energy_max == e.features.energy
    assert cal.entropy_min == cal.entropy_max == e.features.entropy
    assert cal.contrast_min == cal.contrast_max == e.features.contrast


def test_build_index_skips_constant_image(tmp_path):
    good = tmp_path / "good.pgm"
    flat = tmp_path / "flat.pgm"
    _write_blob_image(good)
    save_pgm(np.full((16, 16), 50, dtype=np.uint8), flat)
    idx = build_index([("good", "a", good), ("flat", "a", flat)])
    assert len(idx) == 1
    assert len(idx.skipped) == 1
    assert idx.skipped[0].image_id == "flat"
    assert idx.skipped[0].reason == "no_region"


def test_build_index_records_unreadable_files(tmp_path):
    good = tmp_path / "good.pgm"
    _write_blob_image(good)
    idx = build_index([("good", "a", good), ("ghost", "a", tmp_path / "missing.png")])
    assert len(idx) == 1
    assert idx.skipped[0].image_id == "ghost"
    assert idx.skipped[0].reason.startswith("unreadable")


def test_build_index_empty_corpus_rejected():
    with pytest.raises(ValueError):
        build_index([])


def test_build_index_keys_recomputable(synthetic_corpus):
    idx = synthetic_corpus["index"]
    for e in idx.entries:
        assert e.combined_key == combined_key(e.features, idx.calibration)
        assert 0 <= e.location_cell <= 8
    # bucket partition: every entry in exactly one bucket of each kind
    assert sum(len(v) for v in idx.combined_buckets.values()) == len(idx)
    assert sum(len(v) for v in idx.location_buckets.values()) == len(idx)
    seen = [i for v in idx.combined_buckets.values() for i in v]
    assert sorted(seen) == sorted(e.image_id for e in idx.entries)


# --- serialization ----------------------------------------------------------


def _random_index(rng) -> ImageIndex:
    n = int(rng.integers(1, 12))
    entries = []
    feats = []
    for i in range(n):
        f = TextureFeatures(*(float(v) for v in rng.random(3) * [1, 5, 30]))
        feats.append(f)
        g = TextureFeatures(*(float(v) for v in rng.random(3) * [1, 5, 30]))
        x1, y1 = int(rng.integers(0, 100)), int(rng.integers(0, 100))
        entries.append(
            IndexEntry(
                image_id=f"img_{i:03d}",
                class_label=None if rng.random() < 0.2 else f"class{int(rng.integers(0, 4))}",
                source_path=f"some/dir/img_{i:03d}.png",
                features=f,
                global_features=g,
                roi_bbox=(x1, y1, x1 + int(rng.integers(1, 50)), y1 + int(rng.integers(1, 50))),
                roi_area=int(rng.integers(1, 2500)),
                location_cell=int(rng.integers(0, 9)),
                combined_key=int(rng.integers(0, 1000)),
            )
        )
    cal = FeatureCalibration.from_features(feats)
    skipped = [
        SkippedImage(f"bad_{j}", f"some/bad_{j}.png", "no_region")
        for j in range(int(rng.integers(0, 3)))
    ]
    return ImageIndex(
        entries=entries,
        calibration=cal,
        ng=int(rng.choice([4, 8, 16])),
        d=int(rng.integers(1, 3)),
        created_at=float(rng.uniform(1e9, 2e9)),
        skipped=skipped,
    )


@pytest.mark.parametrize("seed", range(12))
def test_index_roundtrip_structural_equality(seed, tmp_path):
    idx = _random_index(np.random.default_rng(seed))
    path = tmp_path / "x.rcbir"
    save_index(idx, path)
    back = load_index(path)
    assert back == idx


def test_index_bad_magic_rejected():
    idx = _random_index(np.random.default_rng(0))
    data = bytearray(index_to_bytes(idx))
    data[0] ^= 0xFF
    with pytest.raises(CorruptIndexError):
        index_from_bytes(bytes(data))


def test_index_future_version_rejected():
    idx = _random_index(np.random.default_rng(0))
    data = bytearray(index_to_bytes(idx))
    data[5] = 9
    with pytest.raises(IndexVersionError):
        index_from_bytes(bytes(data))


def test_index_crc_flip_detected():
    idx = _random_index(np.random.default_rng(1))
    data = bytearray(index_to_bytes(idx))
    data[20] ^= 0x10
    with pytest.raises(CorruptIndexError):
        index_from_bytes(bytes(data))


def test_index_truncation_detected():
    idx = _random_index(np.random.default_rng(2))
    data = index_to_bytes(idx)
    with pytest.raises(CorruptIndexError):
        index_from_bytes(data[: len(data) // 2])
    with pytest.raises(CorruptIndexError):
        index_from_bytes(data + b"\x00")
