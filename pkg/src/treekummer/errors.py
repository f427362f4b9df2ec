"""Exception hierarchy shared by the package."""


class TreeKummerError(Exception):
    """Base class for all errors raised by this package."""


class TreeError(TreeKummerError, ValueError):
    """Invalid tree structure."""


class DisconnectedGraph(TreeError):
    pass


class CycleDetected(TreeError):
    pass


class SelfLoop(TreeError):
    pass


class DuplicateEdge(TreeError):
    pass


class VertexOutOfRange(TreeError, IndexError):
    pass


class SizeOneTree(TreeError):
    pass


class TooLarge(TreeKummerError, ValueError):
    """Enumeration requested on a tree above the size cap."""


class InvalidParameter(TreeKummerError, ValueError):
    pass


class NonPositiveInput(TreeKummerError, ValueError):
    pass


class NonPositiveScale(InvalidParameter):
    pass


class QuadratureNotConverged(TreeKummerError, RuntimeError):
    pass


class NonMonotoneCdf(TreeKummerError, ValueError):
    pass


class TooFewSamples(TreeKummerError, ValueError):
    pass


class LengthMismatch(TreeKummerError, ValueError):
    pass


class InputError(TreeKummerError, ValueError):
    """Malformed user input (spec files, CLI arguments)."""
