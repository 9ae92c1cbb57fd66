"""modcoh: exact cohomology-relation computations for moduli of bundles."""

from .algebra import GradedElement, AlgebraError
from .series import TruncatedSeries, SeriesError

__all__ = ["GradedElement", "AlgebraError", "TruncatedSeries", "SeriesError"]
