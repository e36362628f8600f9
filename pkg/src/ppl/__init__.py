"""Partitions of the naturals with p-adic denseness scanning.

Core layers: exact p-adic primitives (`padic`), partition constructions
(`partitions`), finite-precision denseness oracles (`density`), prime
sweeps with bound checks (`scanner`).  `service` wraps them in an HTTP
app and `cli` is a thin client of it.
"""

__version__ = "0.1.0"

from .padic import (
    Cell,
    PrimePower,
    ResidueClass,
    cell_of,
    intersect_classes,
    legendre,
    unit_part,
    valuation,
)
from .partitions import (
    Partition,
    build_legendre,
    build_modular,
    build_valuation_parity,
    partition_from_doc,
    partition_to_doc,
)
from .density import (
    AvoidanceCertificate,
    CellHitSet,
    CoverageReport,
    Window,
    cell_hits,
    find_avoided_cell,
    find_avoided_class,
    ratio_cell_hit,
    run_counting_suite,
    verify_counting_lemma,
    zp_coverage,
)
from .scanner import (
    ScanConfig,
    ScanReport,
    check_single_part_bound,
    empirical_min_exceptions,
    scan,
    scan_qp_ratio,
    scan_zp,
)

__all__ = [
    "__version__",
    "Cell",
    "PrimePower",
    "ResidueClass",
    "cell_of",
    "intersect_classes",
    "legendre",
    "unit_part",
    "valuation",
    "Partition",
    "build_legendre",
    "build_modular",
    "build_valuation_parity",
    "partition_from_doc",
    "partition_to_doc",
    "AvoidanceCertificate",
    "CellHitSet",
    "CoverageReport",
    "Window",
    "cell_hits",
    "find_avoided_cell",
    "find_avoided_class",
    "ratio_cell_hit",
    "run_counting_suite",
    "verify_counting_lemma",
    "zp_coverage",
    "ScanConfig",
    "ScanReport",
    "check_single_part_bound",
    "empirical_min_exceptions",
    "scan",
    "scan_qp_ratio",
    "scan_zp",
]
