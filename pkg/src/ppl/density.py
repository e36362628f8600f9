"""Finite-precision denseness oracles.

Everything here is evidence at a chosen precision, never a denseness
claim: residue coverage of a finite window modulo p**j, coverage of the
multiplicative cells (unit a mod p**w, valuation s) by a window and by
its ratio set {x/y}, symbolic avoidance certificates, and a checker for
the counting criterion that turns cell counts into guaranteed ratio-set
hits.

Ratio-set hits are computed two independent ways (pairwise enumeration
and a group-quotient argument on the element cells); `ratio_cell_hit`
cross-checks them on small windows by default.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .padic import (
    MAX_MODULUS,
    Cell,
    ResidueClass,
    check_prime,
    legendre,
    totient_prime_power,
    unit_part,
    units_mod,
    valuation,
)
from .partitions import Partition

# Windows at or below this size get the pairwise cross-check for free.
DUAL_CHECK_MAX = 512

CERTIFICATE_REASONS = ("table-avoidance", "valuation-parity", "quadratic-character")


@dataclass(frozen=True)
class Window:
    """A finite set X ⊆ [1, bound], stored sorted, with a provenance label."""

    bound: int
    elements: tuple[int, ...]
    label: str = "explicit"

    def __post_init__(self) -> None:
        if self.bound < 1:
            raise ValueError(f"window bound must be >= 1, got {self.bound}")
        prev = 0
        for x in self.elements:
            if x <= prev:
                raise ValueError("window elements must be sorted, distinct, and >= 1")
            prev = x
        if prev > self.bound:
            raise ValueError(f"element {prev} exceeds window bound {self.bound}")

    @classmethod
    def from_iterable(cls, xs, bound: int | None = None, label: str = "explicit") -> "Window":
        elements = tuple(sorted(set(xs)))
        if bound is None:
            bound = elements[-1] if elements else 1
        return cls(bound, elements, label)

    @classmethod
    def full(cls, bound: int) -> "Window":
        return cls(bound, tuple(range(1, bound + 1)), f"1..{bound}")

    @classmethod
    def of_part(cls, partition: Partition, part: int, bound: int) -> "Window":
        if part not in partition.part_indices():
            raise ValueError(f"part {part} outside 1..{partition.k}")
        parts = partition.classify_range(bound)
        elements = tuple(n for n in range(1, bound + 1) if parts[n] == part)
        return cls(bound, elements, f"{partition.construction} k={partition.k} part {part}")

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


# --- residue coverage in Z_p ----------------------------------------------------


@dataclass(frozen=True)
class CoverageReport:
    """Which residues mod p**depth a window hits; missed set may be empty."""

    p: int
    depth: int
    bound: int
    hit: frozenset[int]
    missed: frozenset[int]

    @property
    def modulus(self) -> int:
        return self.p**self.depth

    @property
    def full(self) -> bool:
        return not self.missed

    def first_missed(self) -> ResidueClass | None:
        if self.full:
            return None
        return ResidueClass(min(self.missed), self.modulus)

    def to_doc(self) -> dict:
        return {
            "p": self.p,
            "depth": self.depth,
            "modulus": self.modulus,
            "bound": self.bound,
            "hit_count": len(self.hit),
            "missed": sorted(self.missed),
        }


def zp_coverage(X: Window, p: int, depth: int) -> CoverageReport:
    """Exact residue coverage of X mod p**depth."""
    check_prime(p)
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    m = p**depth
    if m > MAX_MODULUS:
        raise ValueError(f"modulus {p}**{depth} exceeds the resource cap {MAX_MODULUS}")
    return coverage_from_residues({x % m for x in X.elements}, p, depth, X.bound)


def coverage_from_residues(residues, p: int, depth: int, bound: int) -> CoverageReport:
    """Assemble a CoverageReport from residues already reduced mod p**depth."""
    m = p**depth
    hit = frozenset(residues)
    if hit and not all(0 <= r < m for r in hit):
        raise ValueError(f"residues must lie in [0, {m})")
    missed = frozenset(range(m)) - hit
    return CoverageReport(p, depth, bound, hit, missed)


# --- avoidance certificates -----------------------------------------------------


@dataclass(frozen=True)
class AvoidanceCertificate:
    """Symbolic witness that a part, or its ratio set, misses a region forever.

    kind "residue-class": no element of the part lies in `residue_class`.
    kind "qp-cell": no ratio of two part elements lies in `cell`.
    Both claims are window-independent; `holds_on` spot-checks one window.
    """

    kind: str
    reason: str
    p: int
    part: int
    residue_class: ResidueClass | None = None
    cell: Cell | None = None

    def __post_init__(self) -> None:
        if self.reason not in CERTIFICATE_REASONS:
            raise ValueError(f"unknown certificate reason {self.reason!r}")
        if self.kind == "residue-class":
            if self.residue_class is None or self.cell is not None:
                raise ValueError("residue-class certificates carry exactly a residue class")
        elif self.kind == "qp-cell":
            if self.cell is None or self.residue_class is not None:
                raise ValueError("qp-cell certificates carry exactly a cell")
        else:
            raise ValueError(f"unknown certificate kind {self.kind!r}")

    def holds_on(self, X: Window) -> bool:
        """Spot check on one window: no element (or ratio) meets the region."""
        if self.kind == "residue-class":
            cls = self.residue_class
            return all(x not in cls for x in X.elements)
        hit, _ = _hit_by_quotient(X.elements, self.cell)
        return not hit

    def to_doc(self) -> dict:
        doc: dict = {"kind": self.kind, "reason": self.reason, "p": self.p, "part": self.part}
        if self.residue_class is not None:
            doc["residue_class"] = {"rem": self.residue_class.rem, "mod": self.residue_class.mod}
        if self.cell is not None:
            doc["cell"] = cell_to_doc(self.cell)
        return doc


def cell_to_doc(cell: Cell) -> dict:
    return {"p": cell.p, "w": cell.w, "unit": cell.unit, "val": cell.val}


def find_avoided_class(partition: Partition, part: int, p: int) -> AvoidanceCertificate | None:
    """Residue class the given part provably avoids, if p is a table prime.

    Only modular tables admit this certificate: the table never assigns a
    vector containing part-1 to that part, so the part misses the class
    (part-1) mod p**e outright.
    """
    if partition.construction != "modular":
        raise ValueError("residue-class certificates exist only for modular tables")
    if part not in partition.part_indices():
        raise ValueError(f"part {part} outside 1..{partition.k}")
    check_prime(p)
    for q, e in zip(partition.primes, partition.exponents):
        if q == p:
            cls = ResidueClass(part - 1, q**e)
            return AvoidanceCertificate("residue-class", "table-avoidance", p, part, residue_class=cls)
    return None


def smallest_nonresidue(p: int) -> int:
    """Least quadratic nonresidue mod an odd prime p."""
    check_prime(p)
    if p == 2:
        raise ValueError("nonresidues mod 2 do not exist; the character at 2 lives mod 4")
    return next(a for a in range(2, p) if legendre(a, p) < 0)


def find_avoided_cell(partition: Partition, part: int, p: int) -> AvoidanceCertificate | None:
    """Cell the part's ratio set provably avoids, if p is a construction prime.

    Parts of the valuation-parity construction have a constant valuation
    parity at each construction prime, so ratios of two members have even
    valuation and every odd-valuation cell is missed.  Parts of the
    Legendre construction have constant quadratic character of the unit
    part, so ratios have character +1 and every nonresidue-unit cell is
    missed (mod 4 at p = 2).  Modular tables carry no certificate of this
    form.
    """
    if part not in partition.part_indices():
        raise ValueError(f"part {part} outside 1..{partition.k}")
    check_prime(p)
    if p not in partition.primes:
        return None
    if partition.construction == "valuation-parity":
        return AvoidanceCertificate("qp-cell", "valuation-parity", p, part, cell=Cell(p, 1, 1, 1))
    if partition.construction == "legendre":
        cell = Cell(2, 2, 3, 0) if p == 2 else Cell(p, 1, smallest_nonresidue(p), 0)
        return AvoidanceCertificate("qp-cell", "quadratic-character", p, part, cell=cell)
    return None


# --- cells hit by a window and by its ratio set ---------------------------------


@dataclass(frozen=True)
class CellHitSet:
    """Cells (unit a mod p**w, valuation s) with s in [t, m) hit by a window.

    The size bound (m - t) * phi(p**w) is enforced at construction; it can
    only fail through an implementation bug upstream.
    """

    p: int
    w: int
    t: int
    m: int
    hits: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.t >= self.m:
            raise ValueError(f"need t < m, got t={self.t}, m={self.m}")
        mod = self.p**self.w
        for a, s in self.hits:
            if not self.t <= s < self.m:
                raise ValueError(f"cell valuation {s} outside [{self.t}, {self.m})")
            if not 1 <= a < mod or a % self.p == 0:
                raise ValueError(f"{a} is not a unit mod {self.p}**{self.w}")
        if len(self.hits) > self.capacity:
            raise ValueError(
                f"{len(self.hits)} hit cells exceed the bound {self.capacity}"
            )

    @property
    def capacity(self) -> int:
        return (self.m - self.t) * totient_prime_power(self.p, self.w)

    def to_doc(self) -> dict:
        return {
            "p": self.p,
            "w": self.w,
            "t": self.t,
            "m": self.m,
            "count": len(self.hits),
            "capacity": self.capacity,
            "hits": sorted(self.hits, key=lambda pair: (pair[1], pair[0])),
        }


def cell_hits(X: Window, p: int, w: int, t: int, m: int) -> CellHitSet:
    """Exact set of cells with valuation in [t, m) hit by elements of X."""
    check_prime(p)
    if w < 1:
        raise ValueError(f"w must be >= 1, got {w}")
    mod = p**w
    if mod > MAX_MODULUS:
        raise ValueError(f"modulus {p}**{w} exceeds the resource cap {MAX_MODULUS}")
    hits = set()
    for x in X.elements:
        s = valuation(x, p)
        if t <= s < m:
            hits.add((unit_part(x, p) % mod, s))
    return CellHitSet(p, w, t, m, frozenset(hits))


def element_cells(X, p: int, w: int) -> dict[int, set[int]]:
    """Map valuation -> units mod p**w present among the elements.

    Accepts any iterable of positive integers; this is the shared input of
    the quotient-based ratio oracles below.
    """
    check_prime(p)
    mod = p**w
    cells: dict[int, set[int]] = {}
    for x in X:
        cells.setdefault(valuation(x, p), set()).add(unit_part(x, p) % mod)
    return cells


def ratio_missing_units(cells: dict[int, set[int]], p: int, w: int, s0: int) -> set[int]:
    """Units a for which no window ratio lands in the cell (a, s0).

    Empty result means every cell at valuation s0 is hit.  Works from the
    element cells alone: a ratio with valuation s0 and unit a exists iff
    units u1 at some level s2+s0 and u2 at level s2 satisfy u1 = a*u2.
    If two levels together carry more than phi(p**w) units the quotient
    set is the whole group, so the scan can stop early.
    """
    phi = totient_prime_power(p, w)
    mod = p**w
    missing = set(units_mod(p, w))
    for s2, units2 in cells.items():
        units1 = cells.get(s2 + s0)
        if not units1:
            continue
        if len(units1) + len(units2) > phi:
            return set()
        for u2 in units2:
            inv2 = pow(u2, -1, mod)
            for u1 in units1:
                missing.discard(u1 * inv2 % mod)
        if not missing:
            break
    return missing


def _hit_by_quotient(elements, cell: Cell) -> tuple[bool, tuple[int, int] | None]:
    mod = cell.modulus
    inv_unit = pow(cell.unit, -1, mod)
    first: dict[tuple[int, int], int] = {}
    for y in elements:
        key = (valuation(y, cell.p), unit_part(y, cell.p) % mod)
        if key not in first:
            first[key] = y
    for x in elements:
        s_x = valuation(x, cell.p)
        u_x = unit_part(x, cell.p) % mod
        y = first.get((s_x - cell.val, u_x * inv_unit % mod))
        if y is not None:
            return True, (x, y)
    return False, None


def _hit_by_pairs(elements, cell: Cell) -> tuple[bool, tuple[int, int] | None]:
    for x in elements:
        for y in elements:
            if Fraction(x, y) in cell:
                return True, (x, y)
    return False, None


def ratio_cell_hit(
    X: Window, cell: Cell, dual: bool | None = None
) -> tuple[bool, tuple[int, int] | None]:
    """Whether some x/y over the window lies in the cell, with a witness.

    The witness is the lexicographically smallest pair (x, y).  Two
    independent routes exist: pairwise enumeration of X x X and a
    group-quotient lookup on the element cells.  dual=None cross-checks
    them whenever len(X) <= DUAL_CHECK_MAX; dual=True forces the check;
    dual=False trusts the quotient route alone (large windows).
    """
    if dual is None:
        dual = len(X.elements) <= DUAL_CHECK_MAX
    answer = _hit_by_quotient(X.elements, cell)
    if dual:
        slow = _hit_by_pairs(X.elements, cell)
        if slow != answer:
            raise RuntimeError(
                f"ratio oracle disagreement on {cell}: pairs say {slow}, quotient says {answer}"
            )
    return answer


# --- the counting criterion -----------------------------------------------------


@dataclass(frozen=True)
class CountingVerdict:
    """Outcome of one counting-criterion check.

    hypothesis: the window hit at least c*m*phi(p**w) cells with s in [0, m).
    conclusion: every cell with s in [0, t) is hit by the ratio set; None
    when the hypothesis already failed (nothing is claimed then).
    A True/False pair is impossible for a correct implementation: the
    criterion is a theorem for finite sets.
    """

    p: int
    w: int
    t: int
    c: Fraction
    m: int
    v_count: int
    threshold: Fraction
    hypothesis: bool
    conclusion: bool | None
    counterexample: Cell | None

    @property
    def violated(self) -> bool:
        return self.hypothesis and self.conclusion is False

    def to_doc(self) -> dict:
        return {
            "p": self.p,
            "w": self.w,
            "t": self.t,
            "c": str(self.c),
            "m": self.m,
            "v_count": self.v_count,
            "threshold": str(self.threshold),
            "hypothesis": self.hypothesis,
            "conclusion": self.conclusion,
            "counterexample": None if self.counterexample is None else cell_to_doc(self.counterexample),
        }


def verify_counting_lemma(X: Window, p: int, w: int, t: int, c, m: int) -> CountingVerdict:
    """Check the cell-count hypothesis and, when it holds, the ratio conclusion.

    Preconditions (all checked): w >= 1, 0 <= t < m, c in (1/2, 1], and
    m > t / (2c - 1).  Arithmetic is exact throughout, so the verdict
    carries Fractions rather than floats.
    """
    check_prime(p)
    c = Fraction(c)
    if w < 1:
        raise ValueError(f"w must be >= 1, got {w}")
    if not 0 <= t < m:
        raise ValueError(f"need 0 <= t < m, got t={t}, m={m}")
    if not Fraction(1, 2) < c <= 1:
        raise ValueError(f"c must lie in (1/2, 1], got {c}")
    if m * (2 * c - 1) <= t:
        raise ValueError(f"m must exceed t/(2c-1) = {Fraction(t) / (2 * c - 1)}, got m = {m}")

    phi = totient_prime_power(p, w)
    cells = element_cells(X.elements, p, w)
    hits = frozenset((a, s) for s, units in cells.items() if 0 <= s < m for a in units)
    hit_set = CellHitSet(p, w, 0, m, hits)
    threshold = c * m * phi
    hypothesis = len(hit_set.hits) >= threshold
    if not hypothesis:
        return CountingVerdict(p, w, t, c, m, len(hits), threshold, False, None, None)
    for s0 in range(t):
        missing = ratio_missing_units(cells, p, w, s0)
        if missing:
            bad = Cell(p, w, min(missing), s0)
            return CountingVerdict(p, w, t, c, m, len(hits), threshold, True, False, bad)
    return CountingVerdict(p, w, t, c, m, len(hits), threshold, True, True, None)


@dataclass(frozen=True)
class SuiteReport:
    """Aggregate of a randomized counting-criterion run."""

    trials: int
    seed: int
    window: int
    hypothesis_true: int
    violations: tuple[CountingVerdict, ...]

    @property
    def clean(self) -> bool:
        return not self.violations

    def to_doc(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "window": self.window,
            "hypothesis_true": self.hypothesis_true,
            "violations": [v.to_doc() for v in self.violations],
        }


# Feasible m per prime so a fair share of trials satisfies the hypothesis
# inside a 10**4 window (p**m must stay near the window scale).
_SUITE_M_CAP = {2: 12, 3: 7, 5: 5}


def _sample_window(rng: random.Random, bound: int) -> Window:
    shape = rng.randrange(4)
    if shape == 0:
        lo = rng.randint(1, bound // 2)
        xs = range(lo, min(bound, lo + rng.randint(50, 1500)) + 1)
    elif shape == 1:
        d = rng.randint(4, 50)
        xs = range(d, bound + 1, d)
    elif shape == 2:
        xs = rng.sample(range(1, bound + 1), rng.randint(1, 300))
    else:
        a = rng.randint(1, bound - 700)
        b = rng.randint(1, bound - 700)
        xs = set(range(a, a + rng.randint(20, 600))) | set(range(b, b + rng.randint(20, 600)))
    return Window.from_iterable(xs, bound=bound, label="sampled")


def run_counting_suite(
    trials: int, seed: int, window: int = 10_000, primes=(2, 3, 5), ws=(1, 2), ts=(1, 2)
) -> SuiteReport:
    """Randomized search for counting-criterion violations; none should exist.

    Samples are drawn deterministically from the seed.  Parameters always
    satisfy the precondition by construction: after picking t and m > t,
    c is drawn from (max(1/2, (m+t)/2m), 1], which forces m > t/(2c-1).
    """
    rng = random.Random(seed)
    hypothesis_true = 0
    violations = []
    for _ in range(trials):
        p = rng.choice(list(primes))
        w = rng.choice(list(ws))
        t = rng.choice(list(ts))
        m = rng.randint(t + 1, max(t + 1, _SUITE_M_CAP.get(p, t + 3)))
        lo = Fraction(m + t, 2 * m)
        c = lo + (1 - lo) * Fraction(rng.randint(1, 16), 16)
        X = _sample_window(rng, window)
        verdict = verify_counting_lemma(X, p, w, t, c, m)
        if verdict.hypothesis:
            hypothesis_true += 1
        if verdict.violated:
            violations.append(verdict)
    return SuiteReport(trials, seed, window, hypothesis_true, tuple(violations))
