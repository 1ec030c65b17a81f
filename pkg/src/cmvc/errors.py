"""Exception hierarchy shared by every module."""


class CmvcError(Exception):
    """Base class for all codec errors."""


class ContractError(CmvcError):
    """A documented precondition was violated by the caller."""


class MalformedInputError(CmvcError):
    """Raw input does not match the declared geometry."""


class TooShortError(MalformedInputError):
    """Input video has fewer than two frames."""


class ConfigError(CmvcError):
    """Invalid or incomplete encode/decode configuration."""


class MalformedPayloadError(CmvcError):
    """A section payload cannot be decoded."""


class UnsupportedStreamError(CmvcError):
    """Stream magic or version is not recognised."""


class CorruptStreamError(CmvcError):
    """Stream checksum does not match its content."""


class MalformedStreamError(CmvcError):
    """Stream structure is truncated or inconsistent."""


class BackendUnavailableError(CmvcError):
    """External generation backend could not be spawned or set up."""


class BackendReportedError(CmvcError):
    """External generation backend replied with an error message."""


class ProtocolViolationError(CmvcError):
    """External backend sent bytes that do not follow the wire protocol."""


class NoOverlapError(CmvcError):
    """Rate curves share no distortion interval."""


class NumericalFailureError(CmvcError):
    """Optimization produced a non-finite value."""
