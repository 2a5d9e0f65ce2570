"""Exception hierarchy shared across the package."""


class FapError(Exception):
    """Base class for all errors raised by fapnfd."""


class InvalidParameters(FapError, ValueError):
    pass


class EmptyAssignment(FapError, ValueError):
    pass


class CoLocatedNodes(FapError, ValueError):
    """Two distinct nodes that must be apart sit on the same coordinates."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class DegenerateMask(FapError, ValueError):
    pass


class UnreachableTarget(FapError, ValueError):
    """Required discrimination exceeds what the NFD curve can provide."""

    def __init__(self, message, required_db=None, pair=None):
        super().__init__(message)
        self.required_db = required_db
        self.pair = pair


class EmptyGraph(FapError, ValueError):
    pass


class UnknownVertex(FapError, KeyError):
    pass


class LengthMismatch(FapError, ValueError):
    pass


class PlacementFailure(FapError, RuntimeError):
    pass


class InfeasibleInstance(FapError, RuntimeError):
    """A solver could not produce a feasible assignment.

    ``link`` is the link id that blocked the run and ``neighbors`` its
    constraint neighbours, when known.
    """

    def __init__(self, message, link=None, neighbors=()):
        super().__init__(message)
        self.link = link
        self.neighbors = tuple(neighbors)


class AllReplicationsInfeasible(InfeasibleInstance):
    pass
