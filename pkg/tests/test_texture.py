import numpy as np
import pytest

from conftest import make_gray
from oracles import features_direct, glcm_all_pairs
from rcbir.errors import DegenerateRegionError
from rcbir.texture import (
    ANGLES,
    CooccurrenceMatrix,
    average_probabilities,
    cooccurrence,
    features_from_matrix,
    features_from_probabilities,
    quantize_gray,
    region_texture,
)


def test_quantize_boundaries():
    img = make_gray([[255, 0], [128, 16]])
    q = quantize_gray(img, None, 16)
    assert q.tolist() == [[15, 0], [8, 1]]
    assert quantize_gray(img, None, 2).tolist() == [[1, 0], [1, 0]]


def test_quantize_mask_marks_absent():
    img = make_gray([[255, 0], [128, 16]])
    mask = np.array([[1, 0], [0, 1]], dtype=np.uint8)
    q = quantize_gray(img, mask, 16)
    assert q.tolist() == [[15, -1], [-1, 1]]


def test_quantize_rejects_bad_ng():
    img = make_gray([[0]])
    with pytest.raises(ValueError):
        quantize_gray(img, None, 1)
    with pytest.raises(ValueError):
        quantize_gray(img, None, 257)


def test_domino_horizontal_pairs():
    q = np.array([[0, 0], [1, 1]], dtype=np.int16)
    m = cooccurrence(q, 0, ng=2)
    assert m.counts.tolist() == [[2, 0], [0, 2]]
    assert m.probabilities.tolist() == [[0.5, 0.0], [0.0, 0.5]]


def test_domino_vertical_pairs():
    q = np.array([[0, 0], [1, 1]], dtype=np.int16)
    m = cooccurrence(q, 90, ng=2)
    assert m.counts.tolist() == [[0, 2], [2, 0]]


def test_constant_raster_single_cell():
    q = np.full((5, 5), 3, dtype=np.int16)
    for angle in ANGLES:
        m = cooccurrence(q, angle)
        assert m.probabilities[3, 3] == 1.0
        assert m.counts.sum() == m.counts[3, 3]


@pytest.mark.parametrize("seed", range(12))
def test_cooccurrence_matches_all_pairs_oracle(seed):
    rng = np.random.default_rng(seed)
    ng = int(rng.choice([2, 4, 8, 16]))
    d = int(rng.choice([1, 2]))
    q = rng.integers(0, ng, (16, 16)).astype(np.int16)
    if seed % 3 == 0:  # sometimes knock holes in the raster
        q[rng.random((16, 16)) < 0.2] = -1
    ref = glcm_all_pairs(q, ng, d)
    for angle in ANGLES:
        m = cooccurrence(q, angle, d, ng=ng)
        assert (m.counts == ref[angle]).all(), angle
        assert (m.counts == m.counts.T).all()


@pytest.mark.parametrize("d", [1, 2, 3])
def test_pair_count_identities(d):
    rng = np.random.default_rng(9)
    w, h, ng = 11, 7, 4
    q = rng.integers(0, ng, (h, w)).astype(np.int16)
    assert cooccurrence(q, 0, d, ng=ng).counts.sum() == 2 * (w - d) * h
    assert cooccurrence(q, 90, d, ng=ng).counts.sum() == 2 * w * (h - d)
    assert cooccurrence(q, 45, d, ng=ng).counts.sum() == 2 * (w - d) * (h - d)
    assert cooccurrence(q, 135, d, ng=ng).counts.sum() == 2 * (w - d) * (h - d)


def test_rotation_swaps_angle_pairs():
    rng = np.random.default_rng(21)
    q = rng.integers(0, 8, (9, 13)).astype(np.int16)
    rot = np.ascontiguousarray(np.rot90(q))
    pairs = {0: 90, 90: 0, 45: 135, 135: 45}
    for a, b in pairs.items():
        ma = cooccurrence(rot, a, ng=8)
        mb = cooccurrence(q, b, ng=8)
        assert (ma.counts == mb.counts).all(), (a, b)


def test_features_single_cell():
    p = np.zeros((4, 4))
    p[2, 2] = 1.0
    f = features_from_probabilities(p)
    assert f.as_tuple() == (1.0, 0.0, 0.0)


def test_features_two_cell_example():
    p = np.zeros((2, 2))
    p[0, 1] = p[1, 0] = 0.5
    f = features_from_probabilities(p)
    assert abs(f.energy - 0.5) < 1e-12
    assert abs(f.entropy - 1.0) < 1e-12
    assert abs(f.contrast - 1.0) < 1e-12


def test_features_zero_matrix():
    f = features_from_probabilities(np.zeros((3, 3)))
    assert f.as_tuple() == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("seed", range(15))
def test_features_match_direct_summation(seed):
    rng = np.random.default_rng(seed)
    ng = int(rng.choice([2, 4, 8, 16]))
    m = rng.random((ng, ng))
    m = m + m.T
    p = m / m.sum()
    f = features_from_probabilities(p)
    e_ref, h_ref, c_ref = features_direct(p)
    assert abs(f.energy - e_ref) < 1e-12
    assert abs(f.entropy - h_ref) < 1e-12
    assert abs(f.contrast - c_ref) < 1e-12


def test_region_texture_constant_region():
    f = region_texture(make_gray(np.full((8, 8), 200)), None, ng=16)
    assert f.as_tuple() == (1.0, 0.0, 0.0)


def test_region_texture_single_pixel_mask_degenerate():
    img = make_gray(np.full((4, 4), 100))
    mask = np.zeros((4, 4), dtype=np.uint8)
    mask[1, 1] = 1
    with pytest.raises(DegenerateRegionError):
        region_texture(img, mask)


def test_region_texture_empty_mask_degenerate():
    img = make_gray(np.full((4, 4), 100))
    with pytest.raises(DegenerateRegionError):
        region_texture(img, np.zeros((4, 4), dtype=np.uint8))


def test_region_texture_stripes_matches_per_angle_average():
    rows = np.zeros((6, 6), dtype=np.uint8)
    rows[1::2, :] = 255  # alternating tone rows at ng=2
    img = make_gray(rows)
    got = region_texture(img, None, ng=2)

    q = quantize_gray(img, None, 2)
    ref = glcm_all_pairs(q, 2, 1)
    probs = []
    for angle in ANGLES:
        counts = ref[angle]
        probs.append(counts / counts.sum())
    e_ref, h_ref, c_ref = features_direct(np.mean(probs, axis=0))
    assert got.energy == pytest.approx(e_ref, abs=1e-12)
    assert got.entropy == pytest.approx(h_ref, abs=1e-12)
    assert got.contrast == pytest.approx(c_ref, abs=1e-12)


def test_region_texture_feature_bounds_on_random_masked_regions():
    rng = np.random.default_rng(77)
    checked = 0
    attempts = 0
    while checked < 1000 and attempts < 5000:
        attempts += 1
        side = int(rng.integers(3, 14))
        img = make_gray(rng.integers(0, 256, (side, side)))
        mask = (rng.random((side, side)) < rng.uniform(0.3, 1.0)).astype(np.uint8)
        try:
            f = region_texture(img, mask, ng=int(rng.choice([2, 4, 8, 16])))
        except DegenerateRegionError:
            continue
        checked += 1
        assert 0.0 < f.energy <= 1.0
        assert f.entropy >= 0.0
        assert f.contrast >= 0.0
    assert checked == 1000


def test_masked_pairs_skip_absent_pixels():
    # mask splits the raster into two isolated halves: no cross pairs
    img = make_gray([[0, 0, 255, 255]] * 2)
    mask = np.array([[1, 1, 0, 1]] * 2, dtype=np.uint8)
    q = quantize_gray(img, mask, 2)
    m = cooccurrence(q, 0, ng=2)
    # only the left 0-0 pairs survive at 0 degrees (right column is alone)
    assert m.counts[0, 0] == 4
    assert m.counts[1, 1] == 0
    assert m.counts[0, 1] == 0
