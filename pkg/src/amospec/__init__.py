"""Spectra of the critical almost Mathieu operator at rational frequencies.

Band edges, measures and the identities around them, computed in both the
standard and the chiral representation.
"""
from .rational_core import Frequency, ParityCase, frequencies_up_to, reduce
from .floquet import PeriodicJacobi, build_chiral, build_standard
from .eigen_oracle import EigenList, lidskii_verify, symmetric_eigs
from .discriminant import (
    chambers_rhs,
    det_eval,
    determinant_roots,
    discriminant_chiral,
    discriminant_standard,
    lemma3_check,
)
from .spectrum import (
    BandSet,
    SpectrumReport,
    band_edges_chiral,
    band_edges_standard,
    bounds_report,
    measure,
    per_theta_bound,
    theta_spectrum,
    thouless_constant,
    thouless_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BandSet",
    "EigenList",
    "Frequency",
    "ParityCase",
    "PeriodicJacobi",
    "SpectrumReport",
    "band_edges_chiral",
    "band_edges_standard",
    "bounds_report",
    "build_chiral",
    "build_standard",
    "chambers_rhs",
    "det_eval",
    "determinant_roots",
    "discriminant_chiral",
    "discriminant_standard",
    "frequencies_up_to",
    "lemma3_check",
    "lidskii_verify",
    "measure",
    "per_theta_bound",
    "reduce",
    "symmetric_eigs",
    "theta_spectrum",
    "thouless_constant",
    "thouless_sweep",
]
