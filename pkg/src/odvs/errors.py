"""Exception types shared across the package."""


class OdvsError(Exception):
    """Base class for all errors raised by :mod:`odvs`."""


class SyncInfeasible(OdvsError, ValueError):
    """The PoC voltage has no real solution for the requested current.

    Raised when ``(r*iq + x*id)**2 > vg**2``; physically the inverter cannot
    stay synchronised with the grid at that operating point.
    """


class NoRoot(OdvsError, ValueError):
    """A bracketed 1-D root search found no sign change."""


class EmptyInterval(OdvsError, ValueError):
    """A search interval for the 1-D reduction is empty."""


class Infeasible(OdvsError, ValueError):
    """No feasible point was found by an exhaustive scan."""


class ParseError(OdvsError, ValueError):
    """A scenario file could not be parsed or failed validation."""
