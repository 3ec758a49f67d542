"""Private information retrieval over coded storage with arbitrary collusion patterns."""

from pirlab.field import FieldElement, PrimeField
from pirlab.matrix import Matrix
from pirlab.codes import GrsSpec, LinearCode, grs_code, repetition
from pirlab.collusion import CollusionPattern, RatePlan, pattern_from_maximal, plan_rate
from pirlab.schemes import (
    RetrievalScheme,
    RoundPlan,
    build_infoset_scheme,
    build_partition_scheme,
    build_striped_partition_scheme,
    build_tpir_scheme,
)
from pirlab.simulator import StorageSystem, Transcript, encode_storage, run_retrieval
from pirlab.verifier import PrivacyReport, algebraic_check, verify_scheme

__version__ = "0.1.0"

__all__ = [
    "FieldElement",
    "PrimeField",
    "Matrix",
    "GrsSpec",
    "LinearCode",
    "grs_code",
    "repetition",
    "CollusionPattern",
    "RatePlan",
    "pattern_from_maximal",
    "plan_rate",
    "RetrievalScheme",
    "RoundPlan",
    "build_tpir_scheme",
    "build_infoset_scheme",
    "build_partition_scheme",
    "build_striped_partition_scheme",
    "StorageSystem",
    "Transcript",
    "encode_storage",
    "run_retrieval",
    "PrivacyReport",
    "algebraic_check",
    "verify_scheme",
]
