"""Cyclic-shift measurement amplifier and harmonic-chain autocorrelation toolkit."""

__version__ = "0.1.0"

from .errors import (
    ConfigInvalidError,
    DegenerateFitError,
    DenseBoundError,
    IndefiniteFormError,
    MingsimError,
    NonPrimeOrderError,
    NotNormalizedError,
    UnsupportedInitialStateError,
    ZeroModeError,
)

# cli and acceptance are import-on-demand: they pull in argparse plumbing and
# the full check registry, which library users never need.
from . import bitlattice, dynamics, fkm, ming, observable, thermolimit

__all__ = [
    "__version__",
    "bitlattice",
    "dynamics",
    "fkm",
    "ming",
    "observable",
    "thermolimit",
    "MingsimError",
    "NonPrimeOrderError",
    "DenseBoundError",
    "NotNormalizedError",
    "UnsupportedInitialStateError",
    "IndefiniteFormError",
    "ZeroModeError",
    "DegenerateFitError",
    "ConfigInvalidError",
]
