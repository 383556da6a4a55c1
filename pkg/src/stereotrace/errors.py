class StereoTraceError(Exception):
    """Base class for all errors raised by stereotrace."""


class ParseError(StereoTraceError):
    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class ValidationError(StereoTraceError):
    def __init__(self, entity: str, reason: str):
        self.entity = entity
        self.reason = reason
        super().__init__(f"{entity}: {reason}")


class UnsupportedCount(StereoTraceError, ValueError):
    pass


class AccelMismatch(StereoTraceError):
    pass


class DimensionMismatch(StereoTraceError, ValueError):
    pass


class ZeroTotal(StereoTraceError, ValueError):
    pass


class WriteError(StereoTraceError, OSError):
    pass
