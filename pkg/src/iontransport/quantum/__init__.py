"""Grid quantum dynamics for the 1D effective and full 2D two-ion models."""
from .grid import Grid, GridMismatchError
from .groundstate import GroundState, GroundStateError, ground_state_imaginary_time
from .models import Model1D, Model2D, make_model, rest_potential
from .observables import (
    FidelityReport,
    TransportRun,
    energy_ratio_report,
    ground_state,
    relative_ground_energy,
    simulate_transport,
    translated,
)
from .propagate import (
    LeakageError,
    NormDriftError,
    lab_energy,
    propagate_split_operator,
    write_trace_csv,
)
from .wavefunction import (
    WaveFunction,
    fidelity,
    load_checkpoint,
    overlap,
    rebase,
    save_checkpoint,
)

__all__ = [
    "FidelityReport", "Grid", "GridMismatchError", "GroundState", "GroundStateError",
    "LeakageError", "Model1D", "Model2D", "NormDriftError", "TransportRun", "WaveFunction",
    "energy_ratio_report", "fidelity", "ground_state", "ground_state_imaginary_time",
    "lab_energy", "load_checkpoint", "make_model", "overlap", "propagate_split_operator",
    "rebase", "relative_ground_energy", "rest_potential", "save_checkpoint",
    "simulate_transport", "translated", "write_trace_csv",
]
