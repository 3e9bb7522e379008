"""spirkit: linear SPIR, non-perfect secret sharing and monotone span programs over F_q."""

from .access import AccessStructure, Classification, classify, delta, rate_bound, threshold
from .audit import AuditReport, audit_nss, audit_spir, xi_bound
from .gf import FieldMatrix, rank, solve_left, vandermonde
from .mmsp import Mmsp, MmspVerdict, search_mmsp, vandermonde_mmsp, verify
from .nss import LinearNss, nss_to_mmsp, reconstruct, share
from .spir import (
    GenericSpir,
    LinearSpir,
    ProjectedLinearSpir,
    mmsp_to_spir,
    project,
    spir_to_nss,
)

__version__ = "0.1.0"

__all__ = [
    "AccessStructure",
    "AuditReport",
    "Classification",
    "FieldMatrix",
    "GenericSpir",
    "LinearNss",
    "LinearSpir",
    "Mmsp",
    "MmspVerdict",
    "ProjectedLinearSpir",
    "audit_nss",
    "audit_spir",
    "classify",
    "delta",
    "mmsp_to_spir",
    "nss_to_mmsp",
    "project",
    "rank",
    "rate_bound",
    "reconstruct",
    "search_mmsp",
    "share",
    "solve_left",
    "spir_to_nss",
    "threshold",
    "vandermonde",
    "vandermonde_mmsp",
    "verify",
    "xi_bound",
]
