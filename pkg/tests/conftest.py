import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rcbir import _pykernels

try:
    from rcbir import _ckernels

    KERNEL_BACKENDS = [("python", _pykernels), ("native", _ckernels)]
except ImportError:
    _ckernels = None
    KERNEL_BACKENDS = [("python", _pykernels)]


@pytest.fixture(params=KERNEL_BACKENDS, ids=[name for name, _ in KERNEL_BACKENDS])
def kernel_backend(request):
    return request.param[1]


@pytest.fixture(scope="session")
def synthetic_corpus(tmp_path_factory):
    """The 100-image 4-class corpus plus its built index, shared per session."""
    from rcbir.evaluation import generate_synthetic_corpus, load_corpus
    from rcbir.indexing import build_index

    root = tmp_path_factory.mktemp("corpus")
    manifest = generate_synthetic_corpus(root, seed=7)
    corpus = load_corpus(root)
    idx = build_index(corpus)
    return {"root": root, "manifest": manifest, "corpus": corpus, "index": idx}


def make_gray(arr):
    from rcbir.imaging import from_array

    return from_array(np.asarray(arr, dtype=np.uint8))
