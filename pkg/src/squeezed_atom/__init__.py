"""Two-level atom coupled to a squeezed-vacuum or thermal reservoir.

Master-equation dynamics, steady-state dipole correlators via the quantum
regression theorem, fluorescence spectra and Lorentzian fitting.
"""

from .algebra import IDENTITY, SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, commutator, dagger, expectation
from .correlation import (
    bloch_coefficients,
    coherence_evolve,
    correlator_exact,
    correlator_numeric,
    correlator_paper,
)
from .master import (
    ReservoirParams,
    build_liouvillian,
    evolve,
    evolve_rk4,
    lindblad_rhs,
    max_squeeze,
    steady_state,
    upper_population,
    validate_params,
)
from .spectrum import (
    DetuningGrid,
    LorentzianFit,
    SpectrumSeries,
    lorentzian_fit,
    peak_and_hwhm,
    spectrum_consistent,
    spectrum_exact,
    spectrum_numeric,
    spectrum_paper,
    spectrum_series,
    spectrum_thermal,
)

__version__ = "0.1.0"
