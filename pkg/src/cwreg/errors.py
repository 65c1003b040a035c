"""Exception types shared across the toolkit."""


class CwregError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(CwregError, ValueError):
    """Operands have incompatible shapes or lengths."""


class ParameterError(CwregError, ValueError):
    """A parameter or option is outside its valid range."""


class SingularFitError(CwregError):
    """A weighted least-squares system is numerically singular."""


class DegenerateWeightsError(CwregError):
    """Every observation weight is zero."""


class SearchFailureError(CwregError):
    """No hyperparameter candidate produced a valid fit."""


class SchemaError(CwregError):
    """An input file does not match the declared schema."""


class IngestionError(CwregError):
    """A dataset could not be ingested."""


class UndefinedImprovementError(CwregError):
    """Improvement percentage is undefined for a non-positive baseline."""
