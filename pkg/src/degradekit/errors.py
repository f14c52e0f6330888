"""Exception types raised across the package."""


class DegradeKitError(Exception):
    """Base class for every error raised by degradekit."""


# imagecore
class MalformedFile(DegradeKitError, ValueError):
    pass


class UnsupportedFormat(DegradeKitError, ValueError):
    pass


class InvalidQuality(DegradeKitError, ValueError):
    pass


class DimensionMismatch(DegradeKitError, ValueError):
    pass


# degrade
class InvalidSeverity(DegradeKitError, ValueError):
    pass


class UnknownOp(DegradeKitError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class MissingParam(DegradeKitError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InvalidParam(DegradeKitError, ValueError):
    """A resolved op parameter has a value the op cannot apply (e.g. an edited manifest)."""


class DuplicateImageId(DegradeKitError, ValueError):
    pass


class ConfigError(DegradeKitError, ValueError):
    """Degradation or experiment config failed schema validation."""


class VersionMismatch(UserWarning):
    """Manifest was written by a different engine version (replay proceeds)."""


# facegeom
class DegenerateBox(DegradeKitError, ValueError):
    pass


class NotPatchAligned(DegradeKitError, ValueError):
    def __init__(self, dim, patch, remainder):
        super().__init__(f"{dim} is not divisible by patch size {patch} (remainder {remainder})")
        self.dim = dim
        self.patch = patch
        self.remainder = remainder


class ExternalCommandFailed(DegradeKitError, RuntimeError):
    pass


class DetectorError(DegradeKitError, RuntimeError):
    pass


# ensemble / metrics
class EmptyInput(DegradeKitError, ValueError):
    pass


class OutOfRange(DegradeKitError, ValueError):
    pass


class NoStreams(DegradeKitError, ValueError):
    pass


class IdMismatch(DegradeKitError, ValueError):
    def __init__(self, message, ids=()):
        self.ids = sorted(ids)
        if self.ids:
            message = f"{message}: {', '.join(self.ids)}"
        super().__init__(message)


class SingleClass(DegradeKitError, ValueError):
    pass


class NegativeValue(DegradeKitError, ValueError):
    pass


class AllZero(DegradeKitError, ValueError):
    pass


class ZeroVector(DegradeKitError, ValueError):
    pass


class ZeroVariance(DegradeKitError, ValueError):
    pass


class MalformedData(DegradeKitError, ValueError):
    """A CSV or binary table could not be parsed; carries the 1-based line when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
