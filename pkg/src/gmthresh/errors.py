"""Exception types raised across the package."""


class GmthreshError(Exception):
    """Base class for all package errors."""


class ImageFormatError(GmthreshError, ValueError):
    pass


class UnsupportedFormatError(ImageFormatError):
    pass


class NonGrayscaleError(ImageFormatError):
    pass


class CorruptHeaderError(ImageFormatError):
    pass


class EmptyImageError(GmthreshError, ValueError):
    pass


class IdenticalComponentsError(GmthreshError, ValueError):
    """Two adjacent mixture components coincide, so no threshold separates them."""


class DegenerateHistogramError(GmthreshError, ValueError):
    pass


class EmptyMaskError(GmthreshError, ValueError):
    pass


class EmptyCorpusError(GmthreshError):
    pass


class MaskPairingError(GmthreshError):
    pass


class EmptyGroupError(GmthreshError, ValueError):
    pass


class InvalidSpecError(GmthreshError, ValueError):
    pass
