"""Secant defectivity of Segre-Veronese varieties.

Terracini rank checks over prime fields, the integer inequalities behind
the product induction, and a certificate-producing derivation engine.
"""

from .space import CriticalRanks, SegreVeronesePair, critical_z, expected_secant_dim, h0
from .scheme import (FIXED_POINT, FULL, HYPERPLANE, FactorConstraint, SchemeComponent,
                     SchemeSpec, double_points, make_scheme, parse_descriptor, split_degree)
from .linalg import DEFAULT_PRIMES, DEFAULT_SEED, PrimeField, rank, sample_points
from .terracini import (CohomologyReport, DefectivityVerdict, Policy, Status, build_matrix,
                        cohomology, defect_scan, lo2_check, verify_lemma_instance)
from .engine import Certificate, Verdict, derive, lookup, validate_certificate
from .cache import RankStore

__version__ = "0.1.0"

__all__ = [
    "CriticalRanks", "SegreVeronesePair", "critical_z", "expected_secant_dim", "h0",
    "FIXED_POINT", "FULL", "HYPERPLANE", "FactorConstraint", "SchemeComponent",
    "SchemeSpec", "double_points", "make_scheme", "parse_descriptor", "split_degree",
    "DEFAULT_PRIMES", "DEFAULT_SEED", "PrimeField", "rank", "sample_points",
    "CohomologyReport", "DefectivityVerdict", "Policy", "Status", "build_matrix",
    "cohomology", "defect_scan", "lo2_check", "verify_lemma_instance",
    "Certificate", "Verdict", "derive", "lookup", "validate_certificate", "RankStore",
]
