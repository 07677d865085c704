"""Exception types shared across the package."""


class PaprSimError(Exception):
    """Base class for all paprsim errors."""


class ConfigError(PaprSimError):
    """A parameter or configuration value is invalid."""


class UndefinedInputError(PaprSimError):
    """The operation is mathematically undefined for this input (e.g. all-zero frame)."""


class ShapeError(PaprSimError):
    """Array lengths or shapes do not match."""


class FormatError(PaprSimError):
    """A file does not conform to its documented binary/text format."""


class EndOfStreamError(PaprSimError):
    """A finite frame source has no more frames."""


class SideInfoError(PaprSimError):
    """Side information does not match the configured candidate/trial range."""


class FileError(PaprSimError):
    """A result or interchange file could not be written or read."""
