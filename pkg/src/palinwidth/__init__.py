"""Palindromic-length lower bounds in HNN extensions and amalgamated free products."""

from . import amalgam, counting, groups, hnn, oracle, presets
from .errors import (DomainError, InvariantFailure, ResourceLimitError,
                     UnsupportedCaseError, UsageError)
from .presets import (amalgam_z3z, amalgam_z4_z2_z4, baumslag_solitar,
                      free_product_zz, load_presentation)

__all__ = [
    "amalgam", "counting", "groups", "hnn", "oracle", "presets",
    "DomainError", "InvariantFailure", "ResourceLimitError",
    "UnsupportedCaseError", "UsageError",
    "amalgam_z3z", "amalgam_z4_z2_z4", "baumslag_solitar",
    "free_product_zz", "load_presentation",
]
