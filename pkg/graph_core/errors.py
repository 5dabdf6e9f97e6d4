"""Exception hierarchy shared by every package.

Each class carries the process exit status the command line maps it to:
2 for bad input or configuration, 3 when a computation needs more room
(graph window, quadrature grid) than it was given.
"""


class HeatKernelError(Exception):
    exit_code = 2


# graph construction and lookup
class NonPositiveTheta(HeatKernelError):
    pass


class SelfLoop(HeatKernelError):
    pass


class DuplicateEdge(HeatKernelError):
    pass


class DuplicateVertex(HeatKernelError):
    pass


class NonFiniteWeight(HeatKernelError):
    pass


class NonSymmetricWeight(HeatKernelError):
    pass


class UnknownVertex(HeatKernelError):
    pass


class MissingFunctionValue(HeatKernelError):
    pass


# numerical preconditions
class NonFiniteInput(HeatKernelError):
    pass


class NegativeTime(HeatKernelError):
    pass


class AssumptionViolated(HeatKernelError):
    pass


class MetricLowerBoundMissing(HeatKernelError):
    pass


class GridMismatch(HeatKernelError):
    pass


class BallMismatch(HeatKernelError):
    pass


class InvalidParams(HeatKernelError):
    pass


class NoClosedFormForGraph(HeatKernelError):
    pass


class ConfigError(HeatKernelError):
    pass


# resource limits
class RegionTooSmall(HeatKernelError):
    exit_code = 3


class WindowTooSmall(HeatKernelError):
    exit_code = 3


class QuadratureNotConverged(HeatKernelError):
    exit_code = 3
