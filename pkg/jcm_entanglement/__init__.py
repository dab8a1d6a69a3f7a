"""
JCM Entanglement - two-atom Jaynes-Cummings entanglement simulator
"""

__version__ = "0.1.0"

from .physics import (
    ModelSpec,
    Propagator,
    SystemState,
    TimeGrid,
    TruncationPolicy,
    bell_atoms,
    build,
    compose_initial,
    concurrence,
    negativity,
    propagate,
    scts_state,
    werner_atoms,
    wigner,
)
from .runner import Scenario, ScenarioPipeline, load_scenario

__all__ = [
    "ModelSpec",
    "Propagator",
    "Scenario",
    "ScenarioPipeline",
    "SystemState",
    "TimeGrid",
    "TruncationPolicy",
    "bell_atoms",
    "build",
    "compose_initial",
    "concurrence",
    "load_scenario",
    "negativity",
    "propagate",
    "scts_state",
    "werner_atoms",
    "wigner",
]
