"""Encode complex scalar fields as binary DMD holograms and verify them numerically."""
from .fieldgen import (ANG, DEFAULT_GRID, LG, ComplexField, DomainError, GridSpec, Vortex,
                       ang_mode, inner_product, lg_mode, make_field, normalize_peak,
                       phase_circulation, vortex_mode)
from .hologram import (BinaryHologram, GratingConfig, PulseParams, analytic_coefficient,
                       encode_amplitude, encode_phase, predicted_first_order, synthesize)
from .propagate import (ApertureSpec, diffraction_efficiency, extract_first_order,
                        forward_spectrum, simulate_reconstruction)
from .analysis import (crosstalk_matrix, decompose, fidelity, interferogram, mub_matrix,
                       orthonormalize, switching_timeline)

__version__ = "0.1.0"
