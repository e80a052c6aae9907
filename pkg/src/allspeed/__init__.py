"""All-speed well-balanced finite-volume solver for the Euler equations with gravity."""

from .equilibrium import (EquilibriumField, isothermal_profile,
                          polytropic_profile, snap_to_eos,
                          well_prepared_residuals)
from .errors import (AllspeedError, ConfigurationError, DomainError,
                     PositivityError, SolverError, VacuumError)
from .integrator import Controls, RunResult, StepInfo, kinetic_energy, run, step
from .scenarios import SCENARIOS, Setup
from .state import (ExactSolution, Grid, HydrostaticBackground, Periodic,
                    References, Scaling, conserved, exact, hydrostatic,
                    periodic, pressure, split, velocity)

__version__ = "0.1.0"

__all__ = [
    "AllspeedError", "ConfigurationError", "Controls", "DomainError",
    "EquilibriumField", "ExactSolution", "Grid", "HydrostaticBackground",
    "Periodic", "PositivityError", "References", "RunResult", "SCENARIOS",
    "Scaling", "Setup", "SolverError", "StepInfo", "VacuumError", "conserved",
    "exact", "hydrostatic", "isothermal_profile", "kinetic_energy",
    "periodic", "polytropic_profile", "pressure", "run", "snap_to_eos",
    "split", "step", "velocity", "well_prepared_residuals",
]
