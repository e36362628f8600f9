"""Session fixtures for the full-scale acceptance runs.

Everything here is computed once per session at the acceptance scale
(window 10**5, primes up to 50) and shared across criteria so the
determinism check can re-run the same inputs and diff the bytes.
"""

import pytest

from ppl.density import Window, run_counting_suite
from ppl.partitions import build_legendre, build_modular, build_valuation_parity
from ppl.scanner import ScanConfig, scan_qp_ratio, scan_zp

ACCEPTANCE_WINDOW = 100_000
PRIME_BOUND = 50
SUITE_TRIALS = 10_000
SUITE_SEED = 60601

MODULAR_HANDLES = ("modular-2", "modular-3", "modular-4")
PARITY_HANDLES = ("vp-2", "vp-4", "leg-2", "leg-4")


def make_handles():
    return {
        "modular-2": build_modular(2, (2,)),
        "modular-3": build_modular(3, (2, 3)),
        "modular-4": build_modular(4, (2, 3, 5)),
        "vp-2": build_valuation_parity(2, (2,)),
        "vp-4": build_valuation_parity(4, (2, 3)),
        "leg-2": build_legendre(2, (2,)),
        "leg-4": build_legendre(4, (2, 3)),
    }


@pytest.fixture(scope="session")
def handles():
    return make_handles()


@pytest.fixture(scope="session")
def zp_config():
    return ScanConfig("zp", prime_bound=PRIME_BOUND, window=ACCEPTANCE_WINDOW, depth=2)


@pytest.fixture(scope="session")
def qp_config():
    return ScanConfig(
        "qp-ratio", prime_bound=PRIME_BOUND, window=ACCEPTANCE_WINDOW, w=2, s_lo=-2, s_hi=2
    )


@pytest.fixture(scope="session")
def zp_reports(handles, zp_config):
    return {name: scan_zp(part, zp_config) for name, part in handles.items()}


@pytest.fixture(scope="session")
def qp_reports(handles, qp_config):
    return {name: scan_qp_ratio(part, qp_config) for name, part in handles.items()}


@pytest.fixture(scope="session")
def suite_report():
    return run_counting_suite(SUITE_TRIALS, SUITE_SEED)


@pytest.fixture(scope="session")
def part_windows(handles):
    # One classify_range pass per handle; Window.of_part would redo it per part.
    out = {}
    for name, partition in handles.items():
        parts = partition.classify_range(ACCEPTANCE_WINDOW)
        members = {j: [] for j in partition.part_indices()}
        for n in range(1, ACCEPTANCE_WINDOW + 1):
            members[parts[n]].append(n)
        out[name] = {
            j: Window.from_iterable(xs, bound=ACCEPTANCE_WINDOW, label=f"{name} part {j}")
            for j, xs in members.items()
            if xs
        }
    return out
