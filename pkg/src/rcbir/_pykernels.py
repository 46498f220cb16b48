"""Numpy implementations of the two hot kernels.

These mirror the compiled kernels in ``rcbir._ckernels`` exactly; the
package selects between the two at import time (see ``rcbir.kernels``).
"""

from __future__ import annotations

import numpy as np

# 8-neighborhood as (dx, dy), fixed order: E, SE, S, SW, W, NW, N, NE.
# The partition does not depend on this order, but keeping it pinned makes
# the traversal reproducible between backends.
NEIGHBORS_8 = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))


def glcm_counts(q: np.ndarray, ng: int, d: int, dy: int, dx: int) -> np.ndarray:
    """Count ordered gray-tone pairs at displacement +-(dy, dx).

    ``q`` is a 2-D int16 raster of tones in [0, ng-1] with -1 marking pixels
    outside the region; pairs touching an absent pixel are skipped. Counting
    both displacement signs makes the result symmetric.
    """
    h, w = q.shape
    counts = np.zeros(ng * ng, dtype=np.int64)
    for sy, sx in ((dy, dx), (-dy, -dx)):
        y0, y1 = max(0, -sy), h - max(0, sy)
        x0, x1 = max(0, -sx), w - max(0, sx)
        if y0 >= y1 or x0 >= x1:
            continue
        a = q[y0:y1, x0:x1]
        b = q[y0 + sy : y1 + sy, x0 + sx : x1 + sx]
        valid = (a >= 0) & (b >= 0)
        if not valid.any():
            continue
        pair = a[valid].astype(np.int64) * ng + b[valid]
        counts += np.bincount(pair, minlength=ng * ng)
    return counts.reshape(ng, ng)


def label_components(binary: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """8-connected component labels in scan discovery order.

    Scans columns left to right and rows top to bottom within each column;
    every foreground pixel of a component gets the label assigned when the
    component is first reached. Returns (labels, volumes) where labels is
    int32 with 0 = background and volumes[n-1] is the pixel count of label n.
    """
    b = binary
    h, w = b.shape
    labels = np.zeros((h, w), dtype=np.int32)
    volumes: list[int] = []
    n = 0
    for x in range(w):
        for y in range(h):
            if b[y, x] == 0 or labels[y, x] != 0:
                continue
            n += 1
            labels[y, x] = n
            stack = [(x, y)]
            vol = 0
            while stack:
                cx, cy = stack.pop()
                vol += 1
                for ddx, ddy in NEIGHBORS_8:
                    jx, jy = cx + ddx, cy + ddy
                    if 0 <= jx < w and 0 <= jy < h and b[jy, jx] != 0 and labels[jy, jx] == 0:
                        labels[jy, jx] = n
                        stack.append((jx, jy))
            volumes.append(vol)
    return labels, np.asarray(volumes, dtype=np.int64)
