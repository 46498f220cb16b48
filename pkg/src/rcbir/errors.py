"""Domain exceptions shared across the pipeline."""


class RcbirError(Exception):
    """Base class for all domain errors raised by this package."""


class UnsupportedFormatError(RcbirError):
    """The file decoded, but not to a raster we can turn into 8-bit gray."""


class NoRegionError(RcbirError):
    """Segmentation produced an empty foreground: there is no region to select."""


class DegenerateRegionError(RcbirError):
    """The region has no neighboring pixel pair, so no texture can be measured."""


class QuerySegmentationError(RcbirError):
    """The query image could not be segmented into a usable region."""


class CorruptIndexError(RcbirError):
    """Index file failed the magic/CRC/structure checks."""


class IndexVersionError(RcbirError):
    """Index file carries a version this build does not understand."""
