"""Two quantizations of the harmonic oscillator with linear position-dependent mass.

Modules
-------
model      parameters, derived constants, classical K and H
fock       truncated ladder-operator matrices
quantize   Weyl-ordered perturbations W_H, W_K and printed ladder forms
perturb    second-order energies, numeric and closed form
oracle     exact diagonalization, lambda fits, adjudication
classical  RK4 dynamics and conservation of K
cli        command-line front end
"""
from .errors import (DomainError, FitError, NotConverged, NotFound, NotHermitian, PdmoscError,
                     SizeError, StepError, TruncationError)
from .model import DerivedConstants, ModelParams, Units, derive_constants, mass_at
from .quantize import H, K, WhichPerturbation, build_W_H, build_W_K
from .perturb import closed_form_E1, closed_form_E2, delta_E, total_energy
from .oracle import adjudicate, eigen_spectrum, extract_pt_orders

__version__ = "0.1.0"
