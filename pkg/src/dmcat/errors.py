class DmcatError(Exception):
    """Base class for all package errors."""


class PreconditionError(DmcatError, ValueError):
    """An operation was called on input outside its contract."""


class CertifiedRefutation(DmcatError):
    """A construction that must succeed by theorem did not.

    Either the implementation is wrong or the instance is a counterexample;
    both demand attention, so this never degrades to a soft failure.
    """

    def __init__(self, step, detail=""):
        self.step = step
        self.detail = detail
        super().__init__(f"{step}: {detail}" if detail else step)


class SizeLimitError(DmcatError):
    pass


class SiteBudgetExceeded(DmcatError):
    pass


class ParseError(DmcatError):
    def __init__(self, message, line=0, col=0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {message}")
