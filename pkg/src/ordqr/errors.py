"""Exception types raised across the package."""

import numpy as np


class DomainError(ValueError):
    """A parameter lies outside the domain of the distribution or transform."""


class NotSPDError(np.linalg.LinAlgError):
    """A matrix that must be symmetric positive definite is not."""


class DatasetError(ValueError):
    """Ordinal data failed validation (codes, categories, design rank, parsing)."""


class ModelMismatchError(ValueError):
    """The data do not fit the requested model class."""


class DegenerateChainError(ValueError):
    """A chain has zero variance, so a diagnostic is undefined."""


class NumericalError(RuntimeError):
    """A numerical failure inside a sampler, tagged with the sweep where it happened."""

    def __init__(self, message, iteration=None):
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)
        self.iteration = iteration


class MissingColumnError(DatasetError):
    """A requested column is absent from the file header."""


class NonNumericCellError(DatasetError):
    """A cell that must be numeric could not be parsed."""


class MissingValueError(DatasetError):
    """A required cell is empty."""


class TooFewCategoriesError(DatasetError):
    """The response has fewer than three distinct values."""


class RankDeficientError(DatasetError):
    """The design matrix does not have full column rank."""
