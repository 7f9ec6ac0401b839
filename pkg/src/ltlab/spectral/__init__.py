"""Bound states of one-dimensional and radial Schrodinger operators."""

from .engine import (SchrodingerSpectrum, SpectrumSummary, TridiagonalOperator, TruncationWarning,
                     channel_multiplicity, check_resolution, discretize_1d, discretize_radial,
                     eigenvalues_below, radial_channels, resolution, richardson, spectrum)
from .potentials import Family, PotentialSpec, parse_potential, two_bump_integrals
