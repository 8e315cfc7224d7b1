"""Exception types shared across the package."""


class PaircdError(Exception):
    """Base class for all package-specific errors."""


class CsvParseError(PaircdError):
    """Malformed CSV input (non-numeric cell, ragged row, ...)."""


class ValidationError(PaircdError):
    """Input data violates a structural precondition."""


class ImputationError(PaircdError):
    """A column cannot be imputed (too few observed values)."""


class DegenerateDesignError(ImputationError):
    """The imputation design matrix is unusable (no predictors left)."""


class ContractError(PaircdError):
    """An internal contract was violated; signals an upstream bug."""


class ConfigurationError(PaircdError):
    """A run configuration is invalid for the given data."""


class InsufficientDataError(PaircdError):
    """Too few rows survive deletion to run the requested test."""
