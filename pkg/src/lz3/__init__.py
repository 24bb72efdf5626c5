"""Detuned three-level avoided-crossing sweeps.

Numerically exact propagation (Hermitian, non-Hermitian, and Lindblad with
an aggregated sink), closed-form instantaneous spectra with minimum-gap
search, independent-crossing composition estimates, and a deterministic
parameter-sweep engine with figure presets.
"""

from ._version import __version__
from .ica import (
    CrossingEvent,
    IcaPrediction,
    crossing_schedule,
    ica_predict,
    lz_probability,
)
from .model import (
    ComplexMatrix3,
    SystemParams,
    char_poly_coeffs,
    dissipative_hamiltonian_at,
    hamiltonian_at,
)
from .propagate import (
    DensityMatrix4,
    IntegrationError,
    PropagationResult,
    StateVector,
    propagate_lindblad,
    propagate_nonhermitian,
    propagate_schrodinger,
    transfer_efficiency,
)
from .spectrum import (
    GapResult,
    SpectrumPoint,
    eigenvalues_sorted,
    gap_top,
    min_gap,
    min_gap_reverse,
    model_eigenvalues,
    spectrum_at,
)
from .sweep import (
    PRESET_NAMES,
    SweepAxis,
    SweepSpec,
    SweepTable,
    figure_preset,
    run_sweep,
    spec_from_metadata,
)

__all__ = [
    "__version__",
    "ComplexMatrix3",
    "CrossingEvent",
    "DensityMatrix4",
    "GapResult",
    "IcaPrediction",
    "IntegrationError",
    "PRESET_NAMES",
    "PropagationResult",
    "SpectrumPoint",
    "StateVector",
    "SweepAxis",
    "SweepSpec",
    "SweepTable",
    "SystemParams",
    "char_poly_coeffs",
    "crossing_schedule",
    "dissipative_hamiltonian_at",
    "eigenvalues_sorted",
    "figure_preset",
    "gap_top",
    "hamiltonian_at",
    "ica_predict",
    "lz_probability",
    "min_gap",
    "min_gap_reverse",
    "model_eigenvalues",
    "propagate_lindblad",
    "propagate_nonhermitian",
    "propagate_schrodinger",
    "run_sweep",
    "spec_from_metadata",
    "spectrum_at",
    "transfer_efficiency",
]
