"""Finite-element spectra of planar domains: Dirichlet, clamped-plate buckling and Stokes."""

from .geometry import DomainSpec, build_mesh, normalize_area
from .spectra import buckling_eig, dirichlet_eigs, stokes_eig

__version__ = "0.1.0"

__all__ = ["DomainSpec", "build_mesh", "normalize_area", "dirichlet_eigs", "buckling_eig", "stokes_eig"]
