"""Fast transport of two Coulomb-coupled ions in an anharmonic trap."""
from .core import (
    BE9_PAIR_MASS,
    COULOMB,
    HBAR,
    EquilibriumError,
    EquilibriumInfo,
    TrapParams,
    effective_frequency,
    equilibrium,
    equilibrium_distance,
    fig1_params,
    fig5_params,
)
from .trajectory import TransportPlan, Variant, compensating_force, design

__version__ = "0.1.0"
__all__ = [
    "BE9_PAIR_MASS", "COULOMB", "HBAR", "EquilibriumError", "EquilibriumInfo", "TrapParams",
    "TransportPlan", "Variant", "compensating_force", "design", "effective_frequency",
    "equilibrium", "equilibrium_distance", "fig1_params", "fig5_params",
]
