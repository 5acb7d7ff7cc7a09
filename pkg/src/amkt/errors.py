"""Exception hierarchy shared by every module."""


class AmktError(Exception):
    """Base class for all library errors."""


class DomainError(AmktError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class UnboundedQuantile(DomainError):
    """Quantile requested at an endpoint of an unbounded support."""


class ValidationError(AmktError, ValueError):
    """A parameter record or scenario breaks one of its invariants.

    ``field`` names the offending field using dotted-path notation.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ParseError(ValidationError):
    """Scenario file is not well-formed JSON."""


class SchemaError(ValidationError):
    """Scenario field is missing or has the wrong type."""


class EmptyRoster(AmktError, ValueError):
    """A publisher roster with no entries."""


class CollapseError(AmktError):
    """Base for failures of the collapse-threshold search."""


class NotViableAtZero(CollapseError):
    """Max profit is non-positive with no AI traffic: the market is never viable."""


class NoCollapse(CollapseError):
    """Max profit stays non-negative at full delegation: tolling alone sustains the market."""


class DegenerateSlope(CollapseError):
    """The profit slope at the threshold vanishes, so the implicit function theorem does not apply."""


class IoError(AmktError, OSError):
    """Reading a scenario or writing a report failed."""


class NonFiniteOutput(AmktError):
    """A report would contain NaN or infinity."""

    def __init__(self, field, value):
        self.field = field
        super().__init__(f"{field}: non-finite value {value!r}")
