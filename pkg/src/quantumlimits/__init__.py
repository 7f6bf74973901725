"""Quantum-noise budgets for interferometric position measurement.

Computes photon-counting and radiation-pressure noise for arbitrary
dark-port quadrature spectra, band-averages it through a detection filter,
and finds the minimum noise under intensity tuning, static squeezing and
frequency-dependent correlated squeezing.
"""
from ._core import HAVE_COMPILED
from .bandavg import (Delta, Gaussian, Lorentzian, Rect, band_average, band_moments,
                      bandwidth, filtered_noise)
from .errors import (ConfigError, ConstraintError, DomainError, NumericalError,
                     QuadratureError, QuantumLimitsError, SingularityError)
from .mechanics import (DampedHarmonic, FreeMass, TabulatedSusceptibility,
                        recoil_damping_min, signal_fidelity_check)
from .noise import (ConstantForce, LaserParams, TabulatedForce, ZeroForce,
                    interferometer_noise_spectrum, linearized_intensity_phase,
                    signal_transfer, single_mirror_noise_spectrum)
from .optimize import (broadband_optimum, caves, equivalent_tau, minimize_quadratic_form,
                       per_frequency_optimum, sql)
from .spectra import (FrequencySqueezed, StaticSqueezed, TabulatedSpectra, Vacuum,
                      heisenberg_margin, squeeze_spectra)

__version__ = "0.1.0"
