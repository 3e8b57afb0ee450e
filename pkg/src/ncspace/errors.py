"""Exception hierarchy shared by the numeric and symbolic layers."""


class NCSpaceError(Exception):
    """Base class for all package errors."""


class UnknownParticleError(NCSpaceError, KeyError):
    """A particle label has no registered noncommutativity parameter."""


class InvalidQuantumNumbers(NCSpaceError, ValueError):
    pass


class DivergentLevel(NCSpaceError, ValueError):
    """The perturbative expansion of 1/|X| has no finite matrix element for this level."""


class NonConvergedQuadrature(NCSpaceError, RuntimeError):
    pass


class NonConverged(NCSpaceError, RuntimeError):
    """A spectral mode sum did not stabilise within tolerance."""


class InconsistentScaling(NCSpaceError, RuntimeError):
    pass


class GridTooCoarse(NCSpaceError, ValueError):
    pass


class TruncationTooSmall(NCSpaceError, ValueError):
    pass
