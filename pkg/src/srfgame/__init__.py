"""Equilibria of resource-allocation games with smallest-request-first granting."""
from .errors import (
    AssumptionViolation, ConfigError, MarginalViolated, NoProgress, NonIncreasing,
    NoSignChange, OutOfDomain, ParseError,
)
from .fluid import FluidSolution, solve_fluid
from .gaussian import GaussianGame, RegimeTrace, solve_gaussian
from .model import CostFunction, DemandModel, validate_assumptions
from .numerics import Tolerances
from .sim import SimGame, allocate, certify_equilibrium, empirical_success
from .strategy import AifStrategy, ChatteringStrategy, EquilibriumStrategy
from .two_player import TwoPlayerGame, solve

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolation", "ConfigError", "MarginalViolated", "NoProgress", "NonIncreasing", "NoSignChange",
    "OutOfDomain", "ParseError", "FluidSolution", "solve_fluid", "GaussianGame", "RegimeTrace", "solve_gaussian",
    "CostFunction", "DemandModel", "validate_assumptions", "Tolerances", "SimGame", "allocate",
    "certify_equilibrium", "empirical_success", "AifStrategy", "ChatteringStrategy", "EquilibriumStrategy",
    "TwoPlayerGame", "solve",
]
