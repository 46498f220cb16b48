"""Gray-tone co-occurrence matrices and the three texture features.

A region is described by counting neighboring tone pairs at distance d
along the four 45-degree-quantized directions, normalizing each matrix,
averaging the four, and reducing the average to (energy, entropy,
contrast). Entropy is in bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateRegionError
from .imaging import GRAY_LEVELS, GrayImage

ANGLES = (0, 45, 90, 135)

# one displacement per angle as (dy, dx); the kernel counts both signs
_OFFSETS = {0: (0, 1), 45: (-1, 1), 90: (1, 0), 135: (1, 1)}

DEFAULT_NG = 16
DEFAULT_DISTANCE = 1


@dataclass(frozen=True, eq=False)
class CooccurrenceMatrix:
    """Symmetric pair counts for one angle, with their normalized form."""

    ng: int
    angle: int
    d: int
    counts: np.ndarray  # (ng, ng), int64
    probabilities: np.ndarray  # (ng, ng), float64; all zeros if no pairs

    @property
    def total_pairs(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class TextureFeatures:
    energy: float
    entropy: float
    contrast: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.energy, self.entropy, self.contrast)


def quantize_gray(img: GrayImage, mask: np.ndarray | None, ng: int) -> np.ndarray:
    """Map gray levels onto ng tones; masked-out pixels become -1."""
    if not 2 <= ng <= GRAY_LEVELS:
        raise ValueError(f"ng must lie in [2, 256], got {ng}")
    q = (img.pixels.astype(np.int32) * ng // GRAY_LEVELS).astype(np.int16)
    if mask is not None:
        if mask.shape != img.pixels.shape:
            raise ValueError("mask shape does not match image")
        q[np.asarray(mask) == 0] = -1
    return q


def cooccurrence(
    q: np.ndarray, angle: int, d: int = DEFAULT_DISTANCE, ng: int | None = None
) -> CooccurrenceMatrix:
    """Build the pair-count matrix for one angle.

    Each unordered neighboring pair contributes in both orders, which makes
    the matrix symmetric; pairs with either pixel absent are skipped. When
    ng is omitted the matrix is sized to the largest tone present.
    """
    if angle not in _OFFSETS:
        raise ValueError(f"angle must be one of {ANGLES}, got {angle}")
    if d < 1:
        raise ValueError(f"distance must be >= 1, got {d}")
    if ng is None:
        ng = int(q.max()) + 1 if q.size and q.max() >= 0 else 1
    dy, dx = _OFFSETS[angle]
    qq = np.ascontiguousarray(q, dtype=np.int16)
    counts = kernels.glcm_counts(qq, ng, d, dy * d, dx * d)
    total = counts.sum()
    if total > 0:
        probabilities = counts / total
    else:
        probabilities = np.zeros((ng, ng))
    counts.setflags(write=False)
    probabilities.setflags(write=False)
    return CooccurrenceMatrix(ng=ng, angle=angle, d=d, counts=counts, probabilities=probabilities)


def features_from_probabilities(p: np.ndarray) -> TextureFeatures:
    """Energy, entropy (bits), contrast of a probability matrix.

    Accepts the all-zero matrix (no pairs) and returns (0, 0, 0) for it;
    0 * log 0 counts as 0.
    """
    energy = float((p * p).sum())
    nz = p[p > 0]
    entropy = float(-(nz * np.log2(nz)).sum()) + 0.0 if nz.size else 0.0
    ng = p.shape[0]
    idx = np.arange(ng)
    diff = idx[:, None] - idx[None, :]
    contrast = float((p * (diff * diff)).sum())
    return TextureFeatures(energy=energy, entropy=entropy, contrast=contrast)


def features_from_matrix(m: CooccurrenceMatrix) -> TextureFeatures:
    return features_from_probabilities(m.probabilities)


def average_probabilities(matrices) -> np.ndarray:
    """Element-wise mean of the probability matrices."""
    return np.mean([m.probabilities for m in matrices], axis=0)


def region_texture(
    img: GrayImage,
    mask: np.ndarray | None = None,
    ng: int = DEFAULT_NG,
    d: int = DEFAULT_DISTANCE,
) -> TextureFeatures:
    """Texture features of the masked region (or the whole image).

    The four angular matrices are averaged element-wise after
    normalization, so one feature triple captures the overall spatial
    relationship irrespective of direction.
    """
    q = quantize_gray(img, mask, ng)
    matrices = [cooccurrence(q, angle, d, ng=ng) for angle in ANGLES]
    if sum(m.total_pairs for m in matrices) == 0:
        raise DegenerateRegionError("region has no neighboring pixel pair at distance d")
    return features_from_probabilities(average_probabilities(matrices))
