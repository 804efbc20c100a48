"""Teleportation and superdense coding through an asymmetric five-qubit state."""
from .entanglement import Bipartition, bipartition_entropy, entropy, mixedness_scan, negativity
from .qcore import (
    DensityOperator,
    Ket,
    MeasurementBasis,
    PauliWord,
    apply_word,
    inner,
    kron,
    measure,
    partial_trace,
)
from .sdc import audit_printed_codewords, build_codeword_table, capacity, decode, encode
from .states import bell, derive_single_basis, derive_two_qubit_basis, diff_against_printed, psi5
from .teleport import teleport_single, teleport_two, verify_correction_table

__version__ = "0.1.0"
