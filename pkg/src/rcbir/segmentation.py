"""Global-threshold segmentation and largest-cluster extraction.

The threshold is the sum of two estimates computed from the histogram: the
iterative mean-split threshold and the between-class-variance maximizer,
clamped to 255. Pixels strictly above it form the foreground, which is
labeled into 8-connected clusters; the largest cluster is the region of
interest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NoRegionError
from .imaging import GRAY_LEVELS, GrayImage, Histogram, histogram

MAX_ITERATIONS = 256
_CONVERGENCE_EPS = 1e-6

# instrumentation: how many times segment() ran in this process (lets tests
# assert that the global-feature search path never segments)
_segment_calls = 0


def segment_call_count() -> int:
    return _segment_calls


@dataclass(frozen=True, eq=False)
class ThresholdReport:
    """The two threshold estimates, their clamped sum, and the variance curve."""

    t_iterative: int
    t_otsu: int
    t_star: int
    iterations: int
    between_class_variance_curve: np.ndarray  # shape (256,), float64


@dataclass(frozen=True, eq=False)
class RegionLabeling:
    """Connected clusters of the binarized image, labeled 1..region_count."""

    labels: np.ndarray  # shape (h, w), int32, 0 = background
    region_count: int
    volumes: dict[int, int]


@dataclass(frozen=True, eq=False)
class Roi:
    """The selected largest cluster: its mask, tight bounds, and size."""

    label: int
    mask: np.ndarray  # shape (h, w), uint8 0/1
    bbox: tuple[int, int, int, int]  # x1, y1, x2, y2 inclusive
    area: int


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def iterative_threshold(h: Histogram) -> tuple[int, int]:
    """Mean-split threshold: T starts at the image mean and is repeatedly
    replaced by the midpoint of the two class means until it stops moving.

    The class split happens at T rounded to the nearest integer while T
    itself is carried as a real; an empty class keeps the current T as its
    mean so degenerate single-class histograms converge immediately.
    Returns (T rounded to int, iteration count).
    """
    if h.total == 0:
        raise ValueError("cannot threshold an empty histogram")
    counts = h.counts.astype(np.float64)
    levels = np.arange(GRAY_LEVELS, dtype=np.float64)
    weighted = levels * counts
    t = float(weighted.sum() / h.total)
    iterations = 0
    while iterations < MAX_ITERATIONS:
        split = min(_round_half_up(t), GRAY_LEVELS - 1)
        n1 = counts[: split + 1].sum()
        n2 = counts[split + 1 :].sum()
        mu1 = weighted[: split + 1].sum() / n1 if n1 > 0 else t
        mu2 = weighted[split + 1 :].sum() / n2 if n2 > 0 else t
        t_new = 0.5 * (mu1 + mu2)
        iterations += 1
        converged = abs(t_new - t) < _CONVERGENCE_EPS
        t = t_new
        if converged:
            break
    return _round_half_up(t), iterations


def otsu_threshold(h: Histogram) -> tuple[int, np.ndarray]:
    """Threshold maximizing the between-class variance of the gray levels.

    For each candidate t the levels split into {0..t} and {t+1..255}, and
    sigma_B^2(t) = w1*(mu1-muT)^2 + w2*(mu2-muT)^2 over the normalized
    histogram. Candidates with an empty class score 0. Returns the smallest
    argmax together with the full 256-entry curve (entry 255 is always 0).
    """
    if h.total == 0:
        raise ValueError("cannot threshold an empty histogram")
    p = h.counts / h.total
    levels = np.arange(GRAY_LEVELS, dtype=np.float64)
    mu_t = float(levels @ p)

    cum_counts = np.cumsum(h.counts)  # exact integer class occupancy
    w1 = np.cumsum(p)
    s1 = np.cumsum(levels * p)

    curve = np.zeros(GRAY_LEVELS)
    valid = (cum_counts > 0) & (cum_counts < h.total)
    valid[GRAY_LEVELS - 1] = False
    with np.errstate(invalid="ignore", divide="ignore"):
        mu1 = np.where(valid, s1 / w1, 0.0)
        w2 = 1.0 - w1
        mu2 = np.where(valid, (mu_t - s1) / w2, 0.0)
        sigma = w1 * (mu1 - mu_t) ** 2 + w2 * (mu2 - mu_t) ** 2
    curve[valid] = sigma[valid]
    t_star = int(np.argmax(curve[: GRAY_LEVELS - 1]))
    curve.setflags(write=False)
    return t_star, curve


def compute_t_star(img: GrayImage) -> ThresholdReport:
    """Combine the two estimates: T* = min(T_iterative + t_otsu, 255)."""
    h = histogram(img)
    t_iter, iterations = iterative_threshold(h)
    t_otsu, curve = otsu_threshold(h)
    t_star = min(t_iter + t_otsu, GRAY_LEVELS - 1)
    return ThresholdReport(t_iter, t_otsu, t_star, iterations, curve)


def binarize(img: GrayImage, t_star: int) -> np.ndarray:
    """Foreground = pixels strictly above the threshold."""
    if not 0 <= t_star <= GRAY_LEVELS - 1:
        raise ValueError(f"threshold {t_star} outside [0, 255]")
    return (img.pixels > t_star).astype(np.uint8)


def label_regions(binary: np.ndarray) -> RegionLabeling:
    """Label 8-connected foreground clusters in scan discovery order."""
    b = np.ascontiguousarray(binary, dtype=np.uint8)
    labels, volumes = kernels.label_components(b)
    return RegionLabeling(
        labels=labels,
        region_count=len(volumes),
        volumes={i + 1: int(v) for i, v in enumerate(volumes)},
    )


def select_roi(labeling: RegionLabeling, binary: np.ndarray) -> Roi:
    """Pick the largest cluster; ties go to the earliest-discovered label."""
    if labeling.region_count == 0:
        raise NoRegionError("binarized image has no foreground pixels")
    label = min(labeling.volumes, key=lambda n: (-labeling.volumes[n], n))
    mask = (labeling.labels == label).astype(np.uint8)
    ys, xs = np.nonzero(mask)
    bbox = (int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))
    return Roi(label=label, mask=mask, bbox=bbox, area=labeling.volumes[label])


def segment(img: GrayImage) -> tuple[Roi, ThresholdReport]:
    """Full pipeline: threshold, binarize, label, select the largest cluster.

    Small clusters are eliminated simply by not being the largest one.
    Raises NoRegionError when thresholding leaves no foreground.
    """
    global _segment_calls
    _segment_calls += 1
    report = compute_t_star(img)
    binary = binarize(img, report.t_star)
    labeling = label_regions(binary)
    roi = select_roi(labeling, binary)
    return roi, report
