"""Exception types shared across the toolkit."""


class DensePeelError(Exception):
    """Base class for all toolkit errors."""


class EdgeListParseError(DensePeelError):
    """A malformed or invalid line in an edge-list source."""

    def __init__(self, message: str, source: str, line_no: int) -> None:
        super().__init__(f"{source}:{line_no}: {message}")
        self.source = source
        self.line_no = line_no


class UndefinedDensityError(DensePeelError):
    """Density was queried for an empty node set."""


class EmptyGraphError(DensePeelError):
    """Peeling needs at least one edge to work with."""


class InfeasibleParameterError(DensePeelError):
    """Parameter combination admits no run (for example k > n or delta <= 1)."""


class StreamModeError(DensePeelError):
    """Stream directedness or weighting does not match the requested run."""


class GraphTooLargeError(DensePeelError):
    """An exhaustive oracle was asked to enumerate past its size limit."""


class ScanAbortedError(DensePeelError):
    """I/O failed partway through a scan; no partial state was committed."""


class ConcurrentScanError(DensePeelError):
    """A second scan was started on a stream that is already being scanned."""


class InvariantViolationError(DensePeelError):
    """An internal self-check failed; the run's outputs must not be trusted."""
