#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot loops (co-occurrence counting and component labeling)
on realistic inputs and prints a small comparison table. Run directly:

    python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from rcbir import _pykernels

try:
    from rcbir import _ckernels
except ImportError:
    _ckernels = None


def make_inputs(seed=7):
    rng = np.random.default_rng(seed)
    # full-frame 256x256 raster quantized to 16 tones, plus a masked variant
    q_full = rng.integers(0, 16, (256, 256)).astype(np.int16)
    q_masked = q_full.copy()
    q_masked[rng.random((256, 256)) < 0.5] = -1
    q_masked = np.ascontiguousarray(q_masked)
    # labeling inputs: sparse blobs and a near-solid frame (worst-case fill)
    blobs = (rng.random((256, 256)) < 0.3).astype(np.uint8)
    solid = (rng.random((256, 256)) < 0.95).astype(np.uint8)
    return {
        "glcm 256x256 full": ("glcm", q_full),
        "glcm 256x256 masked": ("glcm", q_masked),
        "label 256x256 blobs": ("label", blobs),
        "label 256x256 solid": ("label", solid),
    }


def run_case(impl, kind, data, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        if kind == "glcm":
            for dy, dx in ((0, 1), (-1, 1), (1, 0), (1, 1)):
                impl.glcm_counts(data, 16, 1, dy, dx)
        else:
            impl.label_components(data)
        best = min(best, time.perf_counter() - t0)
    return best


def verify_agreement(inputs):
    for name, (kind, data) in inputs.items():
        if kind == "glcm":
            for dy, dx in ((0, 1), (-1, 1), (1, 0), (1, 1)):
                a = _pykernels.glcm_counts(data, 16, 1, dy, dx)
                b = _ckernels.glcm_counts(data, 16, 1, dy, dx)
                assert (a == b).all(), name
        else:
            la, va = _pykernels.label_components(data)
            lb, vb = _ckernels.label_components(data)
            assert (la == lb).all() and (va == vb).all(), name


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    inputs = make_inputs()
    if _ckernels is None:
        print("native kernels not built; showing numpy fallback only")
    else:
        verify_agreement(inputs)
        print("backends agree on all benchmark inputs")

    header = f"{'case':24s} {'python':>10s} {'native':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, (kind, data) in inputs.items():
        t_py = run_case(_pykernels, kind, data, args.repeats)
        if _ckernels is not None:
            t_c = run_case(_ckernels, kind, data, args.repeats)
            print(f"{name:24s} {t_py * 1e3:9.2f}ms {t_c * 1e3:9.2f}ms {t_py / t_c:7.1f}x")
        else:
            print(f"{name:24s} {t_py * 1e3:9.2f}ms {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
