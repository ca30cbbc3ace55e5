"""Exception types raised across the package."""


class TsSortError(Exception):
    """Base class; the CLI maps these to a data-error exit code."""


class InvalidConfig(TsSortError, ValueError):
    pass


class InvalidGraph(TsSortError, ValueError):
    pass


class SingularContemporaneous(TsSortError):
    pass


class Unstable(TsSortError):
    pass


class NumericalOverflow(TsSortError, ArithmeticError):
    pass


class DegenerateColumn(TsSortError, ValueError):
    pass


class NonFinite(TsSortError, ValueError):
    pass


class InsufficientSamples(TsSortError, ValueError):
    pass


class NoAdmissiblePairs(TsSortError):
    """The pair set is empty, so the sortability score is undefined."""


class ShapeMismatch(TsSortError, ValueError):
    pass


class DatasetError(TsSortError):
    """Base class for loader failures."""


class Malformed(DatasetError):
    pass


class EmptyFile(DatasetError):
    pass


class NonSquare(DatasetError):
    pass


class NonBinary(DatasetError):
    pass


class SchemaError(DatasetError):
    pass


class NotConverged(UserWarning):
    """Emitted when the acyclicity constraint was not met within budget."""


class BinUnderfilled(UserWarning):
    pass
