"""Exception hierarchy.  CLI exit codes hang off these classes."""


class CdgaError(Exception):
    exit_code = 1


class InputError(CdgaError, ValueError):
    """Malformed input: dimension mismatch, unsupported shape, bad syntax."""
    exit_code = 2


class PresentationError(InputError):
    """A presentation does not define a CDGA (e.g. d^2 != 0)."""


class ValidationError(CdgaError):
    """Constructed object fails its axioms.  Carries the report."""
    exit_code = 2

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class PreconditionError(CdgaError):
    exit_code = 3


class HypothesisError(PreconditionError):
    """A hypothesis of the blow-up construction fails (stable range, H^1 injectivity, ...)."""


class InternalError(CdgaError):
    """Should be unreachable when preconditions hold."""
    exit_code = 4
