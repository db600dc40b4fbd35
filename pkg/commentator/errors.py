"""
Exception hierarchy shared by every commentator module.
Library code raises these; only the CLI turns them into exit codes.
"""

from typing import List, Optional


class CommentatorError(Exception):
    """Base class for all commentator errors."""


class ConfigurationError(CommentatorError, ValueError):
    """Invalid configuration value (zero HP, empty template library, ...)."""


class FrameLogError(CommentatorError):
    """Problem with a frame log line."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class FrameParseError(FrameLogError):
    """Line is not a well-formed frame record."""


class FrameSequenceError(FrameLogError):
    """Frames arrived out of order or are not consecutive."""


class FrameValidationError(FrameLogError):
    """Frame parsed but violates the telemetry invariants."""

    def __init__(self, violations: List[str], line_number: Optional[int] = None):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations), line_number)


class CueDomainError(CommentatorError, ValueError):
    """A highlight cue fell outside [0, 1]."""


class RenderError(CommentatorError):
    """A template placeholder could not be resolved."""

    def __init__(self, placeholder: str, message: Optional[str] = None):
        self.placeholder = placeholder
        super().__init__(message or f"unresolvable placeholder {{{placeholder}}}")


class TTSError(CommentatorError):
    """Text-to-speech request failed."""


class TTSTransportError(TTSError):
    """Endpoint answered with a non-2xx status or the connection failed."""

    def __init__(self, message: str, status_code: Optional[int] = None):
        self.status_code = status_code
        super().__init__(message)


class TTSDecodeError(TTSError):
    """Endpoint answered 2xx but the body is not a usable synthesis response."""


class TTSTimeoutError(TTSError):
    """Endpoint did not answer within the configured timeout."""


class StudyDomainError(CommentatorError, ValueError):
    """Preference counts cannot be analysed (e.g. no respondents)."""
