"""Effective two-qubit Hamiltonians for tunable-coupler transmon devices."""

from ._core import (
    DegenerateSelectionError,
    DomainError,
    ETA_NAMES,
    FRAME_OMEGA0,
    MetadataMismatchError,
    ResonanceError,
    SchemaError,
    Surrogate,
    TERMS,
    expectation,
    full_hamiltonian,
    hybridization_ratios,
    mode_frequency,
    reduce,
    run,
    sample_ensemble,
    swpt,
)

__version__ = "0.1.0"
