"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class AccuracyError(ArithmeticError):
    """A numerical routine failed to reach its tolerance.

    ``achieved`` holds the relative error estimate at the point of failure.
    """

    def __init__(self, message, achieved=float("nan")):
        super().__init__(f"{message} (achieved relative error {achieved:.3g})")
        self.achieved = achieved


class E1DomainError(DomainError):
    """The exponential-integral argument of an RF term is not positive.

    ``node`` is the 1-based Chebyshev node index that caused the violation.
    """

    def __init__(self, node, value):
        super().__init__(
            f"Chebyshev node {node}: E1 argument denominator {value:.6g} is not positive"
        )
        self.node = node
        self.value = value


class ConfigError(ValueError):
    """Malformed or out-of-range configuration input."""

    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line
