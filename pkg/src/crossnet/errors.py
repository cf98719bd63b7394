"""Exception taxonomy.

Data/shape problems derive from :class:`DataError`, numerical failures from
:class:`NumericalError`.  The CLI maps these onto exit codes (2 and 3
respectively); anything else is a plain bug and propagates.
"""


class CrossnetError(Exception):
    """Base class for all library-raised errors."""


class DataError(CrossnetError):
    """Invalid or inconsistent input data."""


class NumericalError(CrossnetError):
    """Numerical failure during iteration."""


# -- data errors ------------------------------------------------------------

class UnknownUserError(DataError):
    """An edge references a user id missing from the declared user set."""


class AsymmetricInputError(DataError):
    """A matrix declared symmetric differs from its transpose beyond tolerance."""


class NegativeWeightError(DataError):
    """An edge weight or matrix entry is negative where nonnegativity is required."""


class IoFailureError(DataError):
    """A file could not be read, parsed, or written."""


class DimensionMismatchError(DataError):
    """Arrays that must agree in shape do not."""


class NoLayersError(DataError):
    """A multiplex network has neither directed nor symmetric layers."""


class EmptyGraphError(DataError):
    """A graph with no edges where at least one is required."""


class EmptySeedError(DataError):
    """A stub community has no seed members."""


class DegenerateDataError(DataError):
    """Input rows collapse to fewer distinct points than requested clusters."""


class InvalidSpecError(DataError):
    """A generator or solver configuration violates its invariants."""


class EmptyCorpusError(DataError):
    """A text corpus contains no tokens."""


class LengthMismatchError(DataError):
    """Two label vectors that must be parallel have different lengths."""


class EmptyHiddenSetError(DataError):
    """A community has no hidden members to score."""


# -- numerical errors -------------------------------------------------------

class NumericalBlowupError(NumericalError):
    """A factor picked up a non-finite entry during updates."""
