class QSDError(Exception):
    """Base class for errors raised by qsdcluster."""


class ParameterError(QSDError, ValueError):
    pass


class GraphFormatError(QSDError, ValueError):
    """Malformed edge-list or label file."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class DisconnectedError(QSDError):
    """The graph (or an absorbing complement) is not connected."""


class ConvergenceError(QSDError):
    def __init__(self, message, residual=float("nan"), iterations=0):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual={residual:.3e} after {iterations} iterations)")


class DegenerateGapError(QSDError):
    pass


class MissingGroundTruthError(QSDError):
    pass


class BenchError(QSDError):
    pass


class MethodError(QSDError):
    """An estimator failed; ``method`` names it and ``__cause__`` holds the original error."""

    def __init__(self, method, cause):
        self.method = method
        super().__init__(f"{method}: {type(cause).__name__}: {cause}")
