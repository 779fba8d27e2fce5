"""Exception types shared across the package."""


class UsageError(Exception):
    """Malformed input: mismatched groups, bad word grammar, invalid presentation data."""


class DomainError(UsageError):
    """An argument lies outside the mathematical domain of the operation."""


class UnsupportedCaseError(Exception):
    """The presentation falls in a configuration the segment counting does not cover.

    Raised in particular when the two double cosets C a C and C a^-1 C coincide,
    where the a-segment statistics are not defined by this package.
    """


class InvariantFailure(Exception):
    """An internal consistency check failed; indicates a bug, not bad input."""


class ResourceLimitError(Exception):
    """An enumeration or search exceeded its configured size cap."""
