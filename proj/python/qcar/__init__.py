"""Quarter-car suspension toolkit (C++ core)."""

from ._qcar import *  # noqa: F401,F403
from ._qcar import (
    LqrDesign,
    LqrWeights,
    PidGains,
    PidState,
    StateSpace,
    SuspensionParams,
    assemble_state_space,
    metrics,
    reference_weights,
    pid_step,
    poles,
    run,
    simulate_defaults,
    solve_care,
    zeros,
)

__all__ = [
    "LqrDesign",
    "LqrWeights",
    "PidGains",
    "PidState",
    "StateSpace",
    "SuspensionParams",
    "assemble_state_space",
    "metrics",
    "reference_weights",
    "pid_step",
    "poles",
    "run",
    "simulate_defaults",
    "solve_care",
    "zeros",
]
