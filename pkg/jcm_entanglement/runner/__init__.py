"""
JCM Entanglement Scenario Runner
"""

from .cli import main, run, sweep
from .config_file import build_scenario, load_scenario
from .pipeline import ScenarioPipeline
from .schemas import AtomsSpec, OutputSpec, Scenario, SweepSpec, TimeSeries

__all__ = [
    "AtomsSpec",
    "OutputSpec",
    "Scenario",
    "ScenarioPipeline",
    "SweepSpec",
    "TimeSeries",
    "build_scenario",
    "load_scenario",
    "main",
    "run",
    "sweep",
]
