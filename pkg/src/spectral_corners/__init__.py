"""Finite truncations of the A, B and C matrix families.

Modules: ``ntheory`` (arithmetic functions and zeta), ``families`` (entries
and dense truncations), ``fastops`` (structured products), ``spectra``
(Jacobi and Lanczos), ``identities`` (two-sided checks), ``classify``
(analytic and empirical boundedness) and ``cli``.
"""
from ._accel import BACKEND
from .classify import ClassVerdict, RegionVerdict, analytic_classification, empirical_scan, \
    figure1_dataset, unboundedness_witness
from .families import DenseSymMatrix, EntryRangeError, FamilyParams, IndexOriginError, \
    dense_truncation, entry
from .fastops import LinearOperatorHandle, make_handle, matvec
from .report import IdentityReport, emit
from .spectra import SpectralSummary, eig_dense, inertia, lanczos_extremes

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ClassVerdict", "DenseSymMatrix", "EntryRangeError", "FamilyParams",
    "IdentityReport", "IndexOriginError", "LinearOperatorHandle", "RegionVerdict",
    "SpectralSummary", "analytic_classification", "dense_truncation", "eig_dense", "emit",
    "empirical_scan", "entry", "figure1_dataset", "inertia", "lanczos_extremes",
    "make_handle", "matvec", "unboundedness_witness",
]
