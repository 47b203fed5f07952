"""Spectral decimation for the Laplacians of m-branch tree graphs."""

from .analysis import dimension_report, hausdorff_dimension, julia_backward_orbit, limit_density, spectral_measure
from .decimation import EigNode, R, classify, inverse_R, multiplicity, phi, spectrum, spectrum_closed_form
from .errors import DomainError, PoleError, ResourceError, SingularityError, SpecDecError
from .eigenfunctions import extend_eigenvector, extension_matrix
from .graph import TreeGraph, build_graph
from .laplacian import block_partition, laplacian, symmetrize
from .oracle import dense_spectrum, effective_resistance, oracle_check
from .schur import projectors, schur_complement, sigma_D

__all__ = [
    "DomainError",
    "EigNode",
    "PoleError",
    "R",
    "ResourceError",
    "SingularityError",
    "SpecDecError",
    "TreeGraph",
    "block_partition",
    "build_graph",
    "classify",
    "dense_spectrum",
    "dimension_report",
    "effective_resistance",
    "extend_eigenvector",
    "extension_matrix",
    "hausdorff_dimension",
    "inverse_R",
    "julia_backward_orbit",
    "laplacian",
    "limit_density",
    "multiplicity",
    "oracle_check",
    "phi",
    "projectors",
    "schur_complement",
    "sigma_D",
    "spectral_measure",
    "spectrum",
    "spectrum_closed_form",
    "symmetrize",
]
