"""Disk engine: cellular sheaf complexes on fans, supports, extraction and transport."""

from .cells import VERTEX, FanDecomposition, FanError, Incidence
from .complex import FanComplex, constant_sheaf, cousin_complex, refine
from .extract import (
    EngineConsistencyError,
    Extraction,
    beta_one,
    beta_power,
    cousin_identification,
    extract,
    extract_quiver,
    monodromy_endomorphism,
    skeleton_rotation,
    transport,
)
from .nerve import GlobalSections, NerveComplex, global_sections, nerve
from .support import (
    PerversityVerdict,
    SupportCohomology,
    check_perversity,
    support_cohomology,
)

__all__ = [
    "VERTEX",
    "EngineConsistencyError",
    "Extraction",
    "FanComplex",
    "FanDecomposition",
    "FanError",
    "GlobalSections",
    "Incidence",
    "NerveComplex",
    "PerversityVerdict",
    "SupportCohomology",
    "beta_one",
    "beta_power",
    "check_perversity",
    "constant_sheaf",
    "cousin_complex",
    "cousin_identification",
    "extract",
    "extract_quiver",
    "global_sections",
    "monodromy_endomorphism",
    "nerve",
    "refine",
    "skeleton_rotation",
    "support_cohomology",
    "transport",
]
