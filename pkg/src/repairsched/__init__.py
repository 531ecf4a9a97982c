"""Repair scheduling for deteriorating components under precedence constraints."""

from .core import (
    HealthState,
    Instance,
    NodeParams,
    PrecedenceDag,
    Trajectory,
    actionable_set,
    detect_jumps,
    feasible_set,
    reward,
    simulate,
    step,
    validate_instance,
)
from .policies import FixedOrder, HealthiestFirst, LeastModifiedHealthFirst, run_policy
from .solver import solve_exhaustive, solve_nonjumping

__version__ = "0.1.0"
