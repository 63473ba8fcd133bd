"""Rotated-frame treatment of the two-level system coupled to an oscillator.

Dressed two-level energies, resonance couplings and exact
Fock-basis diagonalization of the spin-boson (Rabi) Hamiltonian.
"""

from dressed_rabi.core import Coupling, ModelParams, coupling_g, load_params, params_with_g
from dressed_rabi.dressed import (
    DressedCurve,
    SeriesCoefficients,
    ahmad_bullough_coefficients,
    dressed_curve,
    dressed_gap_operator,
    dressed_gap_quadrature,
    dressed_gap_series,
    dressed_gap_wkb,
    literature_gap,
    ostrovsky_coefficients,
    variational_coefficients,
)
from dressed_rabi.hamiltonians import (
    RotatedParts,
    SpinFockBasis,
    build_full_hamiltonian,
    build_rotated_parts,
    parity_index,
    spectrum_of,
)
from dressed_rabi.resonance import (
    AnticrossingPoint,
    ResonanceSolution,
    anticrossing_scan,
    resonance_coupling,
    resonance_report,
)

__version__ = "0.1.0"

__all__ = [
    "AnticrossingPoint",
    "Coupling",
    "DressedCurve",
    "ModelParams",
    "ResonanceSolution",
    "RotatedParts",
    "SeriesCoefficients",
    "SpinFockBasis",
    "ahmad_bullough_coefficients",
    "anticrossing_scan",
    "build_full_hamiltonian",
    "build_rotated_parts",
    "coupling_g",
    "dressed_curve",
    "dressed_gap_operator",
    "dressed_gap_quadrature",
    "dressed_gap_series",
    "dressed_gap_wkb",
    "literature_gap",
    "load_params",
    "ostrovsky_coefficients",
    "parity_index",
    "params_with_g",
    "resonance_coupling",
    "resonance_report",
    "spectrum_of",
    "variational_coefficients",
]
