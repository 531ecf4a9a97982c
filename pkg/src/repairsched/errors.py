"""Exception hierarchy.

Everything the engine raises on bad input or violated preconditions derives
from :class:`RepairError`, so callers (the CLI in particular) can map domain
failures to a single exit code.
"""


class RepairError(Exception):
    pass


class InvalidInstance(RepairError):
    pass


class CycleDetected(InvalidInstance):
    pass


class RateOutOfRange(InvalidInstance):
    pass


class HealthOutOfRange(InvalidInstance):
    pass


class BadNodeCount(InvalidInstance):
    pass


class DanglingEdge(InvalidInstance):
    pass


class PrecedenceViolation(RepairError):
    def __init__(self, t, node=None):
        self.t = t
        self.node = node
        msg = f"action at t={t}"
        if node is not None:
            msg += f" targets node {node}"
        super().__init__(msg + " outside the feasible set")


class HorizonExceeded(RepairError):
    pass


class StateBudgetExceeded(RepairError):
    pass


class AssumptionViolated(RepairError):
    pass


class NodeFailsBeforeReached(RepairError):
    def __init__(self, k, node=None):
        self.k = k
        self.node = node
        super().__init__(f"position {k} (node {node}) has failed before it is reached")


class NotSingleJump(RepairError):
    pass


class ShapeMismatch(RepairError):
    pass


class LemmaPreconditionFailed(RepairError):
    pass


class BadP(RepairError):
    pass


class InfeasibleConfig(RepairError):
    pass


class RegimeMismatch(RepairError):
    pass
