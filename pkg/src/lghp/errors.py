"""Exception types raised across the package."""


class LghpError(Exception):
    """Base class for every error this package raises on purpose."""


class UnsupportedFormatError(LghpError):
    """File extension is not one of the supported raster formats."""


class DecodeError(LghpError):
    """File exists but cannot be decoded as an image."""


class EmptyDatasetError(LghpError):
    """Dataset root contains no usable image files."""


class NegativeVarianceError(LghpError, ValueError):
    """Noise variance must be non-negative."""


class InvalidParameterError(LghpError, ValueError):
    """Parameter value outside its documented domain."""


class DistanceTooLargeError(LghpError, ValueError):
    """Neighborhood distance leaves no computable pixels in the image."""


class CodeOutOfRangeError(LghpError, ValueError):
    """Pattern code outside the 9-bit range."""


class EmptyCellError(LghpError):
    """A spatial histogram cell contains no countable pixels."""


class ConfigMismatchError(LghpError):
    """Descriptors built under different extraction configs cannot be compared."""


class EmptyIndexError(LghpError):
    """Operation requires a non-empty index."""


class QueryNotInIndexError(LghpError):
    """Query image id is not present in the index."""


class DegenerateSplitError(LghpError):
    """Probe/gallery split would leave one side empty."""


class IoError(LghpError):
    """Index file could not be written."""


class BadMagicError(LghpError):
    """File does not start with the index magic bytes."""


class UnsupportedVersionError(LghpError):
    """Index file version is newer than this reader understands."""


class CorruptFileError(LghpError):
    """Index file is truncated or internally inconsistent."""
