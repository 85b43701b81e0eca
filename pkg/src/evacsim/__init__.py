"""Agent-based room evacuation simulator."""

from .engine import evacuation_time, run
from .physics import BACKEND
from .scenarios import preset, run_experiment, survival_mean

__all__ = ["BACKEND", "evacuation_time", "preset", "run", "run_experiment", "survival_mean"]
__version__ = "0.1.0"
