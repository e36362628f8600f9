"""Prime sweeps: per-part denseness verdicts and exceptional-prime bounds.

A scan walks every prime p <= prime_bound, classifies the window 1..N
once, and issues one verdict per part per prime:

* ``covered-to-depth``: the part hits every residue mod p**depth (Z_p
  mode) or its ratio set hits every cell with unit mod p**w and valuation
  in [s_lo, s_hi] (Q_p mode), within the window.
* ``avoids``: a symbolic certificate shows the part (or its ratio set)
  misses a region at every window size; this outranks finite coverage,
  which can look complete at shallow depth.
* ``undetermined-missing``: something is missed but no certificate is
  known; could be window truncation.

A prime is exceptional when no part is covered.  The exceptional count is
checked against k-1 (Z_p) or floor(log2 k) (Q_p) as an expectation, not
an axiom: violations are reported, and primes whose verdicts are all
undetermined are flagged window-limited for triage.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .density import (
    AvoidanceCertificate,
    coverage_from_residues,
    find_avoided_cell,
    find_avoided_class,
    ratio_missing_units,
)
from .padic import Cell, ResidueClass, valuations_upto
from .partitions import Partition, floor_log2

MODES = ("zp", "qp-ratio")

VERDICT_COVERED = "covered-to-depth"
VERDICT_AVOIDS = "avoids"
VERDICT_UNDETERMINED = "undetermined-missing"

EMPIRICAL_DISCLAIMER = (
    "exception count over the scanned primes only; no claim is made about "
    "the least possible count over all partitions into k parts"
)


@dataclass(frozen=True)
class ScanConfig:
    mode: str
    prime_bound: int = 50
    window: int = 100_000
    depth: int = 2
    w: int = 2
    s_lo: int = -2
    s_hi: int = 2

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.prime_bound < 2:
            raise ValueError(f"prime_bound must be >= 2, got {self.prime_bound}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.w < 1:
            raise ValueError(f"w must be >= 1, got {self.w}")
        if self.s_lo > self.s_hi:
            raise ValueError(f"empty valuation range [{self.s_lo}, {self.s_hi}]")

    def to_doc(self) -> dict:
        doc: dict = {"mode": self.mode, "prime_bound": self.prime_bound, "window": self.window}
        if self.mode == "zp":
            doc["depth"] = self.depth
        else:
            doc["w"] = self.w
            doc["s_range"] = [self.s_lo, self.s_hi]
        return doc


@dataclass(frozen=True)
class PartVerdict:
    part: int
    verdict: str
    certificate: AvoidanceCertificate | None = None
    missed_count: int = 0
    missed_class: ResidueClass | None = None
    missed_cell: Cell | None = None

    def to_doc(self) -> dict:
        doc: dict = {"part": self.part, "verdict": self.verdict}
        if self.certificate is not None:
            doc["certificate"] = self.certificate.to_doc()
        if self.verdict == VERDICT_UNDETERMINED:
            doc["missed_count"] = self.missed_count
            if self.missed_class is not None:
                doc["first_missed"] = {"rem": self.missed_class.rem, "mod": self.missed_class.mod}
            if self.missed_cell is not None:
                cell = self.missed_cell
                doc["first_missed"] = {"p": cell.p, "w": cell.w, "unit": cell.unit, "val": cell.val}
        return doc


@dataclass(frozen=True)
class PrimeResult:
    p: int
    parts: tuple[PartVerdict, ...]

    @property
    def covered_parts(self) -> tuple[int, ...]:
        return tuple(v.part for v in self.parts if v.verdict == VERDICT_COVERED)

    @property
    def exceptional(self) -> bool:
        return not self.covered_parts

    @property
    def window_limited(self) -> bool:
        """Exceptional purely on missing data: no coverage, but no certificate either."""
        return self.exceptional and all(v.verdict == VERDICT_UNDETERMINED for v in self.parts)

    def to_doc(self) -> dict:
        return {
            "p": self.p,
            "exceptional": self.exceptional,
            "window_limited": self.window_limited,
            "parts": [v.to_doc() for v in self.parts],
        }


@dataclass(frozen=True)
class ScanReport:
    partition: Partition
    config: ScanConfig
    results: tuple[PrimeResult, ...]

    @property
    def exceptional(self) -> tuple[int, ...]:
        return tuple(r.p for r in self.results if r.exceptional)

    @property
    def window_limited(self) -> tuple[int, ...]:
        return tuple(r.p for r in self.results if r.window_limited)

    @property
    def bound_kind(self) -> str:
        return "k-1" if self.config.mode == "zp" else "floor-log2-k"

    @property
    def bound(self) -> int:
        k = self.partition.k
        return k - 1 if self.config.mode == "zp" else floor_log2(k)

    @property
    def bound_holds(self) -> bool:
        return len(self.exceptional) <= self.bound

    def part_exception_counts(self) -> dict[int, int]:
        """Per part: at how many scanned primes it failed to cover."""
        counts = {part: 0 for part in self.partition.part_indices()}
        for r in self.results:
            for v in r.parts:
                if v.verdict != VERDICT_COVERED:
                    counts[v.part] += 1
        return counts

    def to_doc(self) -> dict:
        doc = {
            "config": self.config.to_doc(),
            "partition": self.partition.describe(),
            "bound_kind": self.bound_kind,
            "bound": self.bound,
            "exceptional": list(self.exceptional),
            "bound_holds": self.bound_holds,
            "window_limited": list(self.window_limited),
        }
        if self.config.mode == "zp":
            doc["single_part"] = check_single_part_bound(self).to_doc()
        else:
            doc["empirical_min_exceptions"] = {
                "value": empirical_min_exceptions(self),
                "disclaimer": EMPIRICAL_DISCLAIMER,
            }
        doc["primes"] = [r.to_doc() for r in self.results]
        return doc

    def csv_lines(self) -> list[str]:
        lines = ["prime,part,verdict,certificate"]
        for r in self.results:
            for v in r.parts:
                cert = v.certificate.reason if v.certificate is not None else ""
                lines.append(f"{r.p},{v.part},{v.verdict},{cert}")
        return lines


def primes_upto(bound: int) -> list[int]:
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, int(bound**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [n for n in range(2, bound + 1) if sieve[n]]


def thread_count() -> int:
    """Worker cap from PPL_THREADS; 1 (serial) when unset."""
    raw = os.environ.get("PPL_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"PPL_THREADS must be an integer >= 1, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"PPL_THREADS must be an integer >= 1, got {raw!r}")
    return n


def _check_scannable(partition: Partition, cfg: ScanConfig) -> None:
    if partition.primes and max(partition.primes) > cfg.prime_bound:
        raise ValueError(
            f"prime_bound {cfg.prime_bound} is below the largest construction prime "
            f"{max(partition.primes)}"
        )


def _zp_prime_result(partition: Partition, parts_arr: list[int], p: int, cfg: ScanConfig) -> PrimeResult:
    mod = p**cfg.depth
    seen: list[set[int]] = [set() for _ in range(partition.k + 1)]
    for n in range(1, cfg.window + 1):
        seen[parts_arr[n]].add(n % mod)
    verdicts = []
    for part in partition.part_indices():
        cert = find_avoided_class(partition, part, p) if partition.construction == "modular" else None
        if cert is not None:
            verdicts.append(PartVerdict(part, VERDICT_AVOIDS, certificate=cert))
            continue
        report = coverage_from_residues(seen[part], p, cfg.depth, cfg.window)
        if report.full:
            verdicts.append(PartVerdict(part, VERDICT_COVERED))
        else:
            verdicts.append(
                PartVerdict(
                    part,
                    VERDICT_UNDETERMINED,
                    missed_count=len(report.missed),
                    missed_class=report.first_missed(),
                )
            )
    return PrimeResult(p, tuple(verdicts))


def _qp_prime_result(partition: Partition, parts_arr: list[int], p: int, cfg: ScanConfig) -> PrimeResult:
    mod = p**cfg.w
    vals = valuations_upto(cfg.window, p)
    powers = [p**e for e in range(max(vals) + 1)]
    cells: list[dict[int, set[int]]] = [{} for _ in range(partition.k + 1)]
    for n in range(1, cfg.window + 1):
        s = vals[n]
        u = (n // powers[s]) % mod if s else n % mod
        cells[parts_arr[n]].setdefault(s, set()).add(u)
    verdicts = []
    for part in partition.part_indices():
        cert = find_avoided_cell(partition, part, p)
        if cert is not None:
            verdicts.append(PartVerdict(part, VERDICT_AVOIDS, certificate=cert))
            continue
        missed_count = 0
        first_cell = None
        for s0 in range(cfg.s_lo, cfg.s_hi + 1):
            missing = ratio_missing_units(cells[part], p, cfg.w, s0)
            if missing:
                missed_count += len(missing)
                if first_cell is None:
                    first_cell = Cell(p, cfg.w, min(missing), s0)
        if missed_count == 0:
            verdicts.append(PartVerdict(part, VERDICT_COVERED))
        else:
            verdicts.append(
                PartVerdict(part, VERDICT_UNDETERMINED, missed_count=missed_count, missed_cell=first_cell)
            )
    return PrimeResult(p, tuple(verdicts))


def _prime_worker(args) -> PrimeResult:
    partition, parts_arr, p, cfg = args
    if cfg.mode == "zp":
        return _zp_prime_result(partition, parts_arr, p, cfg)
    return _qp_prime_result(partition, parts_arr, p, cfg)


def _run_scan(partition: Partition, cfg: ScanConfig) -> ScanReport:
    _check_scannable(partition, cfg)
    parts_arr = partition.classify_range(cfg.window)
    primes = primes_upto(cfg.prime_bound)
    jobs = [(partition, parts_arr, p, cfg) for p in primes]
    workers = thread_count()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = tuple(pool.map(_prime_worker, jobs))
    else:
        results = tuple(_prime_worker(job) for job in jobs)
    return ScanReport(partition, cfg, results)


def scan_zp(partition: Partition, cfg: ScanConfig) -> ScanReport:
    """Residue-coverage sweep; exceptional primes checked against k-1."""
    if cfg.mode != "zp":
        raise ValueError(f"scan_zp requires mode 'zp', got {cfg.mode!r}")
    return _run_scan(partition, cfg)


def scan_qp_ratio(partition: Partition, cfg: ScanConfig) -> ScanReport:
    """Ratio-set cell-coverage sweep; exceptional primes checked against floor(log2 k)."""
    if cfg.mode != "qp-ratio":
        raise ValueError(f"scan_qp_ratio requires mode 'qp-ratio', got {cfg.mode!r}")
    return _run_scan(partition, cfg)


def scan(partition: Partition, cfg: ScanConfig) -> ScanReport:
    return scan_zp(partition, cfg) if cfg.mode == "zp" else scan_qp_ratio(partition, cfg)


@dataclass(frozen=True)
class SinglePartCheck:
    """Whether one part alone covers all scanned primes with few exceptions.

    The expectation, on any partition, is that some single part fails at
    no more than k-1 of the scanned primes.
    """

    allowed: int
    exceptions_by_part: dict[int, int]
    qualifying: tuple[int, ...]

    @property
    def holds(self) -> bool:
        return bool(self.qualifying)

    def to_doc(self) -> dict:
        return {
            "allowed_exceptions": self.allowed,
            "exceptions_by_part": {str(part): n for part, n in sorted(self.exceptions_by_part.items())},
            "qualifying_parts": list(self.qualifying),
            "holds": self.holds,
        }


def check_single_part_bound(report: ScanReport) -> SinglePartCheck:
    if report.config.mode != "zp":
        raise ValueError("the single-part bound is a Z_p statement; scan with mode 'zp'")
    allowed = report.partition.k - 1
    counts = report.part_exception_counts()
    qualifying = tuple(part for part, n in sorted(counts.items()) if n <= allowed)
    return SinglePartCheck(allowed, counts, qualifying)


def empirical_min_exceptions(report: ScanReport) -> int:
    """Least per-part count of scanned primes where the part misses a cell.

    Exploratory data only (see EMPIRICAL_DISCLAIMER): the scan sees
    finitely many primes and one window.
    """
    if report.config.mode != "qp-ratio":
        raise ValueError("empirical exception counts come from mode 'qp-ratio' scans")
    return min(report.part_exception_counts().values())
