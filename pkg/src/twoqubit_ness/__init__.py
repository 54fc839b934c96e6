"""Non-equilibrium steady states of two coupled qubits, each in its own boson or fermion reservoir.

The numerical engine builds the non-secular Bloch-Redfield generator in the
coupled-qubit eigen basis; closed forms for flat, balanced reservoirs serve as
an independent oracle.
"""

from .analytic import (
    AnalyticSteadyState,
    boson_witness,
    effective_parameters,
    equilibrium_boson,
    equilibrium_fermion,
    fermion_witness,
    general_steady_state,
    thresholds,
)
from .errors import (
    BasisMismatchError,
    DegenerateGeneratorError,
    MarkovianValidityWarning,
    NotSteadyStateError,
    NotXStateError,
    OccupationError,
    RotatingWaveError,
    UnsupportedClosedFormError,
)
from .observables import ObservableSet, coherences, concurrence, energy_current, evaluate, wootters_concurrence
from .redfield import Liouvillian, build_generator, null_space_steady_state, positivity_scan, propagate, steady_state
from .reservoirs import BathSpec, Flat, Ohmic, Statistics, occupation, rates, spectral_density
from .system import Basis, DensityMatrix, EigenSystem, QubitPairParams, diagonalize, to_bare, to_eigen

__version__ = "0.1.0"

__all__ = [
    "AnalyticSteadyState", "boson_witness", "effective_parameters", "equilibrium_boson",
    "equilibrium_fermion", "fermion_witness", "general_steady_state", "thresholds",
    "BasisMismatchError", "DegenerateGeneratorError", "MarkovianValidityWarning", "NotSteadyStateError",
    "NotXStateError", "OccupationError", "RotatingWaveError", "UnsupportedClosedFormError",
    "ObservableSet", "coherences", "concurrence", "energy_current", "evaluate", "wootters_concurrence",
    "Liouvillian", "build_generator", "null_space_steady_state", "positivity_scan", "propagate", "steady_state",
    "BathSpec", "Flat", "Ohmic", "Statistics", "occupation", "rates", "spectral_density",
    "Basis", "DensityMatrix", "EigenSystem", "QubitPairParams", "diagonalize", "to_bare", "to_eigen",
]  # fmt: skip
