"""Exception hierarchy shared by all modules."""


class BetheError(Exception):
    """Base class for every error raised by :mod:`orthobethe`."""


class PoleError(BetheError, ZeroDivisionError):
    """A rational expression was evaluated exactly on one of its poles."""


class NearPoleError(PoleError):
    """Float evaluation came within tolerance of a pole."""


class UnboundedError(BetheError):
    """A rational function grows at infinity, so no Laurent coefficient exists."""


class MismatchError(BetheError, ValueError):
    """Operands live on different spaces (rank ``n`` or number of sites)."""


class GenericityError(BetheError, ValueError):
    """Input parameters collide with a pole or zero locus of the construction."""


class CardinalityError(BetheError, ValueError):
    """A partition asks for more elements than a set contains."""


class NoVacuumError(BetheError):
    """No product basis vector is annihilated by the lower-triangular entries."""


class CentralityError(BetheError):
    """The quadratic central relation failed on the chain."""


class DimensionError(BetheError, ValueError):
    """Dense diagonalization requested above the allowed Hilbert space size."""


class NoConvergence(BetheError):
    """Newton iteration did not reach the residual target from a seed."""


class ConfigError(BetheError, ValueError):
    """A CLI configuration file is malformed."""
