"""Exception types shared across the package."""


class ConsensusHinfError(Exception):
    """Base class for errors raised by this package."""


class GraphInputError(ConsensusHinfError, ValueError):
    """Malformed or inconsistent graph input (parse errors, bad weights, asymmetry)."""


class DisconnectedGraphError(ConsensusHinfError, ValueError):
    """Operation requires a connected graph."""


class DomainError(ConsensusHinfError, ValueError):
    """Scalar gain function evaluated outside its valid branch."""


class NumericError(ConsensusHinfError, RuntimeError):
    """Numerical routine failed to converge or produced invalid values."""
