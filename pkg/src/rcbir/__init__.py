"""Region-of-interest content-based image retrieval.

Segments the brightest coherent region of a grayscale image, describes it
with co-occurrence texture features, indexes a corpus in hash buckets
(combined feature key or 3x3 location cell), and answers query-by-example
searches ranked by Euclidean distance.
"""

from .errors import (
    CorruptIndexError,
    DegenerateRegionError,
    IndexVersionError,
    NoRegionError,
    QuerySegmentationError,
    RcbirError,
    UnsupportedFormatError,
)
from .imaging import GrayImage, Histogram, from_array, histogram, load_image, mean_gray
from .indexing import (
    FeatureCalibration,
    ImageIndex,
    IndexEntry,
    build_index,
    combined_key,
    load_index,
    location_cell,
    save_index,
)
from .retrieval import MODES, QueryResult, euclidean_distance, query, query_by_id
from .segmentation import Roi, ThresholdReport, segment
from .texture import CooccurrenceMatrix, TextureFeatures, cooccurrence, region_texture

__version__ = "0.1.0"

__all__ = [
    "CooccurrenceMatrix",
    "CorruptIndexError",
    "DegenerateRegionError",
    "FeatureCalibration",
    "GrayImage",
    "Histogram",
    "ImageIndex",
    "IndexEntry",
    "IndexVersionError",
    "MODES",
    "NoRegionError",
    "QueryResult",
    "QuerySegmentationError",
    "RcbirError",
    "Roi",
    "TextureFeatures",
    "ThresholdReport",
    "UnsupportedFormatError",
    "build_index",
    "combined_key",
    "cooccurrence",
    "euclidean_distance",
    "from_array",
    "histogram",
    "load_image",
    "load_index",
    "location_cell",
    "mean_gray",
    "query",
    "query_by_id",
    "region_texture",
    "save_index",
    "segment",
    "__version__",
]
