"""Model-free optimal dynamic voltage support for grid-connected inverters.

Per-unit algebra, the analytic optimum, one-dimensional reductions, a
perturb-and-observe seeker and a quasi-static closed-loop plant.
"""

from .analytic import OdvsSolution, Stage, Thresholds, brute_force_oracle, solve, thresholds
from .errors import EmptyInterval, Infeasible, NoRoot, OdvsError, ParseError, SyncInfeasible
from .grid import CurrentPair, GridParams, Limits, active_power, constraint_residuals, poc_voltage
from .reduction import Bounds1D, iq_bounds, phi_bounds, psi, v_on_circle, v_on_power_boundary
from .seeker import SeekerState, StepSchedule, po_step, run_seek

__all__ = [
    "Bounds1D", "CurrentPair", "EmptyInterval", "GridParams", "Infeasible", "Limits", "NoRoot",
    "OdvsError", "OdvsSolution", "ParseError", "SeekerState", "Stage", "StepSchedule",
    "SyncInfeasible", "Thresholds", "active_power", "brute_force_oracle", "constraint_residuals",
    "iq_bounds", "phi_bounds", "po_step", "poc_voltage", "psi", "run_seek", "solve", "thresholds",
    "v_on_circle", "v_on_power_boundary",
]
__version__ = "0.1.0"
