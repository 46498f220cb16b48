# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the two per-pixel hot loops.

Behavior is bit-identical to ``rcbir._pykernels``; both count the same
ordered pairs and assign component labels in the same discovery order.
"""

import numpy as np


def glcm_counts(short[:, ::1] q, int ng, int d, int dy, int dx):
    """Count ordered gray-tone pairs at displacement +-(dy, dx).

    ``q`` holds tones in [0, ng-1] with -1 marking absent pixels; pairs
    touching an absent pixel are skipped.
    """
    cdef Py_ssize_t h = q.shape[0]
    cdef Py_ssize_t w = q.shape[1]
    out = np.zeros((ng, ng), dtype=np.int64)
    cdef long long[:, ::1] counts = out
    cdef Py_ssize_t y, x, ny, nx
    cdef int a, b
    for y in range(h):
        for x in range(w):
            a = q[y, x]
            if a < 0:
                continue
            ny = y + dy
            nx = x + dx
            if 0 <= ny < h and 0 <= nx < w:
                b = q[ny, nx]
                if b >= 0:
                    counts[a, b] += 1
            ny = y - dy
            nx = x - dx
            if 0 <= ny < h and 0 <= nx < w:
                b = q[ny, nx]
                if b >= 0:
                    counts[a, b] += 1
    return out


def label_components(const unsigned char[:, ::1] binary):
    """8-connected component labels in scan discovery order.

    Scans columns left to right, rows top to bottom within each column,
    flood-filling with an explicit stack. Returns (labels, volumes).
    """
    cdef Py_ssize_t h = binary.shape[0]
    cdef Py_ssize_t w = binary.shape[1]
    labels_arr = np.zeros((h, w), dtype=np.int32)
    cdef int[:, ::1] labels = labels_arr
    # every pixel is pushed at most once, so h*w slots suffice
    stack_arr = np.empty(h * w, dtype=np.intp)
    cdef Py_ssize_t[::1] stack = stack_arr
    # neighbor order E, SE, S, SW, W, NW, N, NE as (dx, dy)
    cdef int* ndx = [1, 1, 0, -1, -1, -1, 0, 1]
    cdef int* ndy = [0, 1, 1, 1, 0, -1, -1, -1]
    cdef Py_ssize_t x, y, cx, cy, jx, jy, top
    cdef int n = 0, i
    cdef long long vol
    vols = []
    for x in range(w):
        for y in range(h):
            if binary[y, x] == 0 or labels[y, x] != 0:
                continue
            n += 1
            labels[y, x] = n
            stack[0] = x * h + y
            top = 1
            vol = 0
            while top > 0:
                top -= 1
                cx = stack[top] // h
                cy = stack[top] % h
                vol += 1
                for i in range(8):
                    jx = cx + ndx[i]
                    jy = cy + ndy[i]
                    if 0 <= jx < w and 0 <= jy < h and binary[jy, jx] != 0 and labels[jy, jx] == 0:
                        labels[jy, jx] = n
                        stack[top] = jx * h + jy
                        top += 1
            vols.append(vol)
    return labels_arr, np.asarray(vols, dtype=np.int64)
