"""Exception hierarchy shared by every kernelconv module."""


class KernelConvError(Exception):
    """Base class for all errors raised by kernelconv."""


class SpecError(KernelConvError):
    """A shape, sequence or field description is malformed."""


class GridError(KernelConvError):
    """Masks on different grids, or a cell outside the grid window."""


class TamenessError(KernelConvError):
    """A kernel was requested for a sequence that is not tamed at its limit point."""


class MonotoneError(KernelConvError):
    """A sequence declared monotone is not, at some sampled index."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ClassError(KernelConvError):
    """The operation is only decidable for periodic (or constant) tails."""


class FieldError(KernelConvError):
    """A scalar field evaluated to NaN or +inf at some cell."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class MetricError(KernelConvError):
    """A distance was requested between masks where it is undefined."""


class ConsistencyError(KernelConvError):
    """An internal invariant (e.g. monotonicity in k) was violated."""


class ValidationError(KernelConvError):
    """A run configuration failed validation; ``path`` is a JSON pointer."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class ParseError(KernelConvError):
    """Expression text could not be parsed. Rendered as ``offset:message``."""

    def __init__(self, offset, message):
        super().__init__(f"{offset}:{message}")
        self.offset = offset
        self.message = message


class EvalError(KernelConvError):
    """Expression evaluation failed (unbound variable, domain error, +inf)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
