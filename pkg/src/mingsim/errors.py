"""Exception types shared across the package.

Every failure mode a caller is expected to handle gets its own class so
that tests and the CLI can map them to exit codes without string matching.
"""


class MingsimError(Exception):
    """Base class for all package-specific errors."""


class NonPrimeOrderError(MingsimError, ValueError):
    """Lattice size n must be prime for the orbit decomposition to be uniform."""


class DenseBoundError(MingsimError, OverflowError):
    """2**n exceeds the configured dense-mode bound."""


class NotNormalizedError(MingsimError, ValueError):
    """State norm deviates from 1 beyond tolerance and caller did not ask for renormalization."""


class UnsupportedInitialStateError(MingsimError, ValueError):
    """Orbit-compressed averaging needs basis-vector branch states."""


class IndefiniteFormError(MingsimError, ValueError):
    """Quadratic form of the chain is not positive semidefinite."""


class ZeroModeError(MingsimError, ValueError):
    """Gibbs sampling is undefined when a normal mode has zero frequency."""


class DegenerateFitError(MingsimError, ValueError):
    """Curve does not support the requested fit (identically zero or nonpositive at the origin)."""


class ConfigInvalidError(MingsimError, ValueError):
    """Run configuration failed validation; message names the offending field."""
