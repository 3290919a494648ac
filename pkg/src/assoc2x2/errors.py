"""Semantic exceptions shared across the package."""


class Assoc2x2Error(Exception):
    """Base error for this package."""


class InvalidDistributionError(Assoc2x2Error, ValueError):
    """A joint distribution violates its invariants (negative cell, bad sum)."""


class InvalidTableError(Assoc2x2Error, ValueError):
    """A contingency table violates its invariants (negative or non-integer cell)."""


class DegenerateMarginError(Assoc2x2Error):
    """A whole row or column has zero mass; association measures are undefined."""


class ZeroCellError(Assoc2x2Error):
    """An individual cell is zero where a formula needs strictly positive cells."""
