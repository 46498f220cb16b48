"""Retrieval measurement: precision@k, recall@n, and the query-everything
protocol, plus a deterministic synthetic corpus so the protocol can run
without any external dataset.

The protocol uses every indexed image as a query (leave-one-out by
default) and aggregates per-class means of precision@1..10 and recall@20
into the familiar class-rows-by-k-columns table shape.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .indexing import ImageIndex, location_cell
from .retrieval import QueryResult, query_by_id

PRECISION_KS = tuple(range(1, 11))
RECALL_N = 20

MANIFEST_NAME = "manifest.json"
IMAGE_SUFFIXES = (".png", ".gif", ".bmp", ".pgm", ".ppm")


@dataclass(frozen=True)
class EvalReport:
    mode: str
    corpus: str
    classes: tuple[str, ...]
    precision: dict[str, tuple[float, ...]]  # class -> mean P@k for k in ks (percent)
    recall: dict[str, float]  # class -> mean recall@n (percent)
    avg_precision: tuple[float, ...]
    avg_recall: float
    ks: tuple[int, ...]
    n_recall: int
    include_self: bool
    queries: int


def precision_at_k(result: QueryResult, query_class: str, k: int) -> float:
    """Percent of the top k that share the query's class (denominator k)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    top = result.results[:k]
    hits = sum(1 for item in top if item.class_label == query_class)
    return 100.0 * hits / k


def recall_at_n(result: QueryResult, query_class: str, n: int, class_size: int) -> float:
    """Percent of the class found in the top n.

    The denominator is class_size - 1: under leave-one-out the query itself
    is not retrievable. A singleton class has nothing to retrieve and
    scores 100 vacuously.
    """
    if class_size < 1:
        raise ValueError(f"class_size must be >= 1, got {class_size}")
    if class_size == 1:
        return 100.0
    top = result.results[:n]
    hits = sum(1 for item in top if item.class_label == query_class)
    return 100.0 * hits / (class_size - 1)


def run_protocol(
    idx: ImageIndex,
    mode: str,
    include_self: bool = False,
    ks: tuple[int, ...] = PRECISION_KS,
    n_recall: int = RECALL_N,
) -> EvalReport:
    """Query every indexed image and aggregate per-class precision/recall.

    Every entry must carry a class label. Per-class rows are means over the
    class's queries; the average row is the arithmetic mean of class rows.
    """
    unlabeled = [e.image_id for e in idx.entries if e.class_label is None]
    if unlabeled:
        raise ValueError(f"{len(unlabeled)} entries have no class label (e.g. {unlabeled[0]!r})")

    classes: list[str] = []
    for e in idx.entries:
        if e.class_label not in classes:
            classes.append(e.class_label)
    class_sizes = Counter(e.class_label for e in idx.entries)

    depth = max(max(ks), n_recall)
    per_class_prec: dict[str, list[list[float]]] = {c: [] for c in classes}
    per_class_rec: dict[str, list[float]] = {c: [] for c in classes}
    for e in idx.entries:
        res = query_by_id(idx, e.image_id, mode, k=depth, exclude_self=not include_self)
        per_class_prec[e.class_label].append([precision_at_k(res, e.class_label, k) for k in ks])
        per_class_rec[e.class_label].append(
            recall_at_n(res, e.class_label, n_recall, class_sizes[e.class_label])
        )

    precision = {
        c: tuple(float(np.mean([row[i] for row in per_class_prec[c]])) for i in range(len(ks)))
        for c in classes
    }
    recall = {c: float(np.mean(per_class_rec[c])) for c in classes}
    avg_precision = tuple(
        float(np.mean([precision[c][i] for c in classes])) for i in range(len(ks))
    )
    avg_recall = float(np.mean([recall[c] for c in classes]))

    return EvalReport(
        mode=mode,
        corpus=f"{len(idx)} entries, ng={idx.ng}, d={idx.d}",
        classes=tuple(classes),
        precision=precision,
        recall=recall,
        avg_precision=avg_precision,
        avg_recall=avg_recall,
        ks=tuple(ks),
        n_recall=n_recall,
        include_self=include_self,
        queries=len(idx),
    )


def report_to_csv(report: EvalReport) -> str:
    """Class-rows-by-k-columns precision table plus the recall table."""
    lines = ["class," + ",".join(str(k) for k in report.ks)]
    for c in report.classes:
        lines.append(c + "," + ",".join(f"{v:.2f}" for v in report.precision[c]))
    lines.append("average," + ",".join(f"{v:.2f}" for v in report.avg_precision))
    lines.append("")
    lines.append(f"class,recall@{report.n_recall}")
    for c in report.classes:
        lines.append(f"{c},{report.recall[c]:.2f}")
    lines.append(f"average,{report.avg_recall:.2f}")
    return "\n".join(lines) + "\n"


def report_to_json(report: EvalReport) -> dict:
    return {
        "mode": report.mode,
        "corpus": report.corpus,
        "include_self": report.include_self,
        "queries": report.queries,
        "ks": list(report.ks),
        "precision": {c: list(v) for c, v in report.precision.items()},
        "average_precision": list(report.avg_precision),
        "recall_n": report.n_recall,
        "recall": dict(report.recall),
        "average_recall": report.avg_recall,
    }


def plot_precision_svg(report: EvalReport, path) -> None:
    """Write a precision-vs-k line chart (per class plus the average)."""
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for c in report.classes:
        ax.plot(report.ks, report.precision[c], marker="o", label=c)
    ax.plot(report.ks, report.avg_precision, marker="s", linewidth=2.5, color="black", label="average")
    ax.set_xlabel("retrievals (k)")
    ax.set_ylabel("precision (%)")
    ax.set_title(f"precision vs k, mode={report.mode}")
    ax.set_ylim(0, 105)
    ax.set_xticks(list(report.ks))
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# --- synthetic corpus -------------------------------------------------------

# Four classes told apart by the texture inside the bright blob and by
# which grid cell the blob sits in. Blob gray levels stay >= 196 and the
# background tops out at 60, so the computed threshold always recovers the
# blob exactly.
CLASS_SPECS = (
    ("smooth", 4),
    ("checkered", 0),
    ("striped", 2),
    ("speckled", 8),
)

_BG_MEAN = 30.0
_BG_SIGMA = 10.0
_BG_CLIP = (5, 60)
_TONE_LO = 200  # quantizes to tone 12 at ng=16
_TONE_MID = 216  # tone 13
_TONE_HI = 232  # tone 14


def _render_blob(kind: str, side: int, serial: int, rng: np.random.Generator) -> np.ndarray:
    """One blob patch; `serial` varies the pixel content so no two images
    of a class share identical features."""
    yy, xx = np.mgrid[0:side, 0:side]
    if kind == "smooth":
        blob = np.full((side, side), _TONE_HI, dtype=np.int64)
        k = 8 + serial
        flat = rng.choice(side * side, size=k, replace=False)
        blob.ravel()[flat] = 208
        return blob.astype(np.uint8)
    if kind == "checkered":
        base = np.where((xx + yy) % 2 == 0, _TONE_LO, _TONE_HI).astype(np.int64)
    elif kind == "striped":
        base = np.where(yy % 2 == 0, _TONE_LO, _TONE_HI).astype(np.int64)
    elif kind == "speckled":
        # exact-count shuffle of three tones keeps the feature cluster tight
        # and centered inside its quantization bin across realizations
        n = side * side
        tones = np.repeat([_TONE_LO, _TONE_MID, _TONE_HI], n // 3 + 1)[:n]
        return rng.permutation(tones).reshape(side, side).astype(np.uint8)
    else:
        raise ValueError(f"unknown blob kind {kind!r}")
    k = 8 + serial
    flat = rng.choice(side * side, size=k, replace=False)
    base.ravel()[flat] = (_TONE_LO + _TONE_HI) - base.ravel()[flat]
    noise = rng.integers(-4, 5, size=(side, side))
    return (base + noise).astype(np.uint8)


def _place_blob(cell: int, side: int, size: int, rng: np.random.Generator) -> tuple[int, int, int, int]:
    """Jittered position inside the target cell, rejected until the grid
    heuristic assigns the intended cell."""
    c = size // 3
    row, col = divmod(cell, 3)
    base_x, base_y = col * c, row * c
    slack = max(c - side - 2, 1)
    for _ in range(32):
        x1 = base_x + int(rng.integers(1, slack + 1))
        y1 = base_y + int(rng.integers(1, slack + 1))
        x2, y2 = x1 + side - 1, y1 + side - 1
        if x2 >= size or y2 >= size:
            continue
        if location_cell((x1, y1, x2, y2), size, size) == cell:
            return x1, y1, x2, y2
    # centered fallback; holds for every cell at the default geometry
    x1 = base_x + (c - side) // 2
    y1 = base_y + (c - side) // 2
    return x1, y1, x1 + side - 1, y1 + side - 1


def generate_synthetic_corpus(out_dir, seed: int = 0, per_class: int = 25, size: int = 256) -> dict:
    """Write per_class images for each of the 4 classes plus a manifest.

    Deterministic in `seed`: the same seed reproduces the corpus byte for
    byte. Returns the manifest dict (also written as manifest.json).
    """
    if per_class < 2:
        raise ValueError(f"per_class must be >= 2, got {per_class}")
    if size < 24:
        raise ValueError(f"size must be >= 24, got {size}")
    os.makedirs(out_dir, exist_ok=True)
    side = max(8, (size * 7) // 32)  # 56 at the default 256

    children = np.random.SeedSequence(seed).spawn(len(CLASS_SPECS) * per_class)
    images = []
    serial = 0
    for kind, cell in CLASS_SPECS:
        for _ in range(per_class):
            rng = np.random.default_rng(children[serial])
            bg = rng.normal(_BG_MEAN, _BG_SIGMA, size=(size, size))
            pixels = np.clip(np.rint(bg), *_BG_CLIP).astype(np.uint8)
            x1, y1, x2, y2 = _place_blob(cell, side, size, rng)
            pixels[y1 : y2 + 1, x1 : x2 + 1] = _render_blob(kind, side, serial % per_class, rng)
            image_id = f"img_{serial:03d}"
            filename = f"{image_id}.png"
            Image.fromarray(pixels, mode="L").save(os.path.join(out_dir, filename), format="PNG")
            images.append(
                {
                    "id": image_id,
                    "class": kind,
                    "file": filename,
                    "bbox": [x1, y1, x2, y2],
                    "cell": cell,
                }
            )
            serial += 1

    manifest = {
        "seed": seed,
        "per_class": per_class,
        "size": size,
        "classes": [kind for kind, _ in CLASS_SPECS],
        "images": images,
    }
    with open(os.path.join(out_dir, MANIFEST_NAME), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


def load_corpus(input_dir) -> list[tuple[str, str | None, str]]:
    """Corpus triples (id, class, path) from a manifest directory.

    Falls back to globbing raster files (class unknown) when there is no
    manifest.
    """
    manifest_path = os.path.join(input_dir, MANIFEST_NAME)
    if os.path.exists(manifest_path):
        with open(manifest_path) as fh:
            manifest = json.load(fh)
        return [
            (img["id"], img.get("class"), os.path.join(input_dir, img["file"]))
            for img in manifest["images"]
        ]
    triples = []
    for name in sorted(os.listdir(input_dir)):
        if name.lower().endswith(IMAGE_SUFFIXES):
            triples.append((os.path.splitext(name)[0], None, os.path.join(input_dir, name)))
    if not triples:
        raise ValueError(f"no manifest and no raster files in {input_dir}")
    return triples
