"""MANET mobility-model workbench."""

from .core import Area, BoundaryPolicy, NodeState, Phase, Position, SimulationClock, Trace, Velocity
from .experiments import ScenarioConfig, fit_report, run_simulation, run_speed_sweep
from .mobility import MobilityModel, MobilityParams, ModelKind, P1, TransitionMatrix

__version__ = "0.1.0"

__all__ = [
    "Area", "BoundaryPolicy", "NodeState", "Phase", "Position", "SimulationClock", "Trace", "Velocity",
    "ScenarioConfig", "fit_report", "run_simulation", "run_speed_sweep",
    "MobilityModel", "MobilityParams", "ModelKind", "P1", "TransitionMatrix",
]
