"""Exception types shared across the package."""


class ConecertError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(ConecertError):
    """An array argument has the wrong shape or bad entries."""


class HermiticityError(ConecertError):
    """A matrix or map that must be Hermitian (preserving) is not."""


class InputRejected(ConecertError):
    """A domain-level rejection: apex map, non-PSD factor and similar."""


class EncodingError(ConecertError):
    """A JSON payload does not match the documented encoding."""


class ClassificationError(ConecertError):
    """A map matched none of the three recognized normal forms."""


class SearchError(ConecertError):
    """A numerical search was invoked with unusable parameters."""
