"""Constructions of partitions of the naturals and their JSON documents.

Three families are supported:

* ``modular``: k parts cut out by a table over residue vectors modulo
  prime powers p_i**e_i (i = 1..k-1), built so that part j+1 never meets
  the class j mod p_i**e_i.
* ``valuation-parity``: 2**l base parts keyed by the parities of the
  p_i-adic valuations, refined to k parts.
* ``legendre``: 2**l base parts keyed by the quadratic characters of the
  p_i-free unit parts (mod-4 character at p = 2), refined the same way.

A partition value is immutable after construction and classification is a
pure function of n, so instances are safe to share across threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .padic import PrimePower, check_prime, legendre, unit_part, valuation, valuations_upto

CONSTRUCTIONS = ("modular", "valuation-parity", "legendre")

# Cap on the number of residue vectors a modular table may enumerate.
DEFAULT_TABLE_CAP = 1_000_000


def floor_log2(k: int) -> int:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return k.bit_length() - 1


@dataclass(frozen=True)
class Partition:
    """A partition of {1, 2, 3, ...} into parts 1..k.

    ``table`` (modular only) maps each residue vector to its 1-based part.
    For the two parity-style constructions the last base part is split
    into k - 2**l + 1 pieces by n mod (k - 2**l + 1) whenever k exceeds
    the base part count.
    """

    construction: str
    k: int
    primes: tuple[int, ...]
    exponents: tuple[int, ...] = ()
    table: dict[tuple[int, ...], int] | None = None
    _moduli: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.construction not in CONSTRUCTIONS:
            raise ValueError(f"construction must be one of {CONSTRUCTIONS}")
        moduli = tuple(PrimePower(p, e).modulus for p, e in zip(self.primes, self.exponents))
        object.__setattr__(self, "_moduli", moduli)

    @property
    def base_parts(self) -> int:
        """Number of parts before refinement (2**l; table size k for modular)."""
        if self.construction == "modular":
            return self.k
        return 1 << len(self.primes)

    @property
    def refinement_pieces(self) -> int:
        """How many pieces the last base part is split into (1 = no split)."""
        return self.k - self.base_parts + 1

    def classify(self, n: int) -> int:
        """The 1-based part containing n; total and deterministic on n >= 1."""
        if n < 1:
            raise ValueError(f"classification requires n >= 1, got {n}")
        if self.construction == "modular":
            assert self.table is not None
            return self.table[tuple(n % m for m in self._moduli)]
        bits = 0
        if self.construction == "valuation-parity":
            for i, p in enumerate(self.primes):
                if valuation(n, p) & 1:
                    bits |= 1 << i
        else:
            for i, p in enumerate(self.primes):
                if legendre(unit_part(n, p), p) < 0:
                    bits |= 1 << i
        base = bits + 1
        h = self.base_parts
        if base < h or self.k == h:
            return base
        return h + n % self.refinement_pieces

    def classify_range(self, bound: int) -> list[int]:
        """Parts of 1..bound as a list indexed by n (index 0 unused).

        Equivalent to [classify(n) for n], but sieves valuations so whole
        windows classify in O(bound) instead of O(bound log bound).
        """
        if bound < 1:
            raise ValueError(f"bound must be >= 1, got {bound}")
        if self.construction == "modular":
            assert self.table is not None
            table = self.table
            moduli = self._moduli
            return [0] + [table[tuple(n % m for m in moduli)] for n in range(1, bound + 1)]

        bits = [0] * (bound + 1)
        for i, p in enumerate(self.primes):
            bit = 1 << i
            vals = valuations_upto(bound, p)
            if self.construction == "valuation-parity":
                for n in range(1, bound + 1):
                    if vals[n] & 1:
                        bits[n] |= bit
            else:
                nonresidue = _nonresidue_test(p)
                powers = [p**e for e in range(max(vals) + 1)]
                for n in range(1, bound + 1):
                    u = n if vals[n] == 0 else n // powers[vals[n]]
                    if nonresidue(u):
                        bits[n] |= bit
        h = self.base_parts
        pieces = self.refinement_pieces
        out = [0] * (bound + 1)
        for n in range(1, bound + 1):
            base = bits[n] + 1
            out[n] = base if (base < h or pieces == 1) else h + n % pieces
        return out

    def part_indices(self) -> range:
        return range(1, self.k + 1)

    def describe(self) -> dict:
        """Summary document (no table body) for reports and CLI output."""
        doc: dict = {"construction": self.construction, "k": self.k, "primes": list(self.primes)}
        if self.construction == "modular":
            doc["exponents"] = list(self.exponents)
            doc["table_size"] = len(self.table) if self.table else 0
        else:
            doc["base_parts"] = self.base_parts
            if self.refinement_pieces > 1:
                doc["refinement_pieces"] = self.refinement_pieces
        return doc


def _nonresidue_test(p: int):
    if p == 2:
        return lambda u: u % 4 == 3
    residues = {pow(x, 2, p) for x in range(1, p)}
    return lambda u: u % p not in residues


def _check_distinct_primes(primes, field_name: str) -> tuple[int, ...]:
    primes = tuple(primes)
    for p in primes:
        check_prime(p)
    if len(set(primes)) != len(primes):
        raise ValueError(f"{field_name} must be pairwise distinct, got {list(primes)}")
    return primes


def build_modular(k: int, primes, table_cap: int = DEFAULT_TABLE_CAP) -> Partition:
    """Modular-table partition on k-1 distinct primes.

    Exponents are minimal with p_i**e_i >= k.  Residue vectors are walked
    in lexicographic order and each goes to the smallest part value absent
    from its components, so part j+1 avoids the class j modulo every
    p_i**e_i and the table is reproducible.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    primes = _check_distinct_primes(primes, "primes")
    if len(primes) != k - 1:
        raise ValueError(f"modular construction needs k-1 = {k - 1} primes, got {len(primes)}")
    exponents = []
    for p in primes:
        e = 1
        while p**e < k:
            e += 1
        exponents.append(e)
    moduli = [p**e for p, e in zip(primes, exponents)]
    size = 1
    for m in moduli:
        size *= m
    if size > table_cap:
        raise ValueError(f"table size {size} exceeds cap {table_cap}")
    table: dict[tuple[int, ...], int] = {}
    for vec in itertools.product(*(range(m) for m in moduli)):
        used = set(vec)
        j = next(j for j in range(k) if j not in used)
        table[vec] = j + 1
    return Partition("modular", k, primes, tuple(exponents), table)


def _parity_style(construction: str, k: int, primes) -> Partition:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    primes = _check_distinct_primes(primes, "primes")
    ell = floor_log2(k)
    if len(primes) != ell:
        raise ValueError(
            f"{construction} construction needs floor(log2(k)) = {ell} primes, got {len(primes)}"
        )
    if list(primes) != sorted(primes):
        raise ValueError(f"primes must be strictly increasing, got {list(primes)}")
    return Partition(construction, k, primes)


def build_valuation_parity(k: int, primes) -> Partition:
    """Partition keyed by parities of the p_i-adic valuations, refined to k parts."""
    return _parity_style("valuation-parity", k, primes)


def build_legendre(k: int, primes) -> Partition:
    """Partition keyed by quadratic characters of the unit parts, refined to k parts."""
    return _parity_style("legendre", k, primes)


def trivial_partition() -> Partition:
    """The one-part partition (every n in part 1)."""
    return build_valuation_parity(1, ())


# --- JSON document round trip -------------------------------------------------

def partition_to_doc(partition: Partition) -> dict:
    """Serializable document; field order is fixed so writes are canonical."""
    doc: dict = {
        "construction": partition.construction,
        "k": partition.k,
        "primes": list(partition.primes),
    }
    if partition.construction == "modular":
        doc["exponents"] = list(partition.exponents)
        assert partition.table is not None
        doc["table"] = [
            {"vector": list(vec), "part": part} for vec, part in partition.table.items()
        ]
    elif partition.refinement_pieces > 1:
        doc["refinement"] = {
            "base_parts": partition.base_parts,
            "pieces": partition.refinement_pieces,
            "rule": "last base part split by n mod pieces",
        }
    return doc


def _require(doc: dict, name: str):
    if name not in doc:
        raise ValueError(f"partition document is missing field '{name}'")
    return doc[name]


def partition_from_doc(doc: dict, table_cap: int = DEFAULT_TABLE_CAP) -> Partition:
    """Parse and fully validate a partition document.

    Every invariant of the construction is re-checked so hand-edited
    documents cannot smuggle in a non-partition: the table must cover each
    residue vector exactly once, parts must lie in 1..k, and each table
    entry must avoid its part's residue.
    """
    if not isinstance(doc, dict):
        raise ValueError("partition document must be a JSON object")
    construction = _require(doc, "construction")
    if construction not in CONSTRUCTIONS:
        raise ValueError(f"field 'construction' must be one of {CONSTRUCTIONS}, got {construction!r}")
    k = _require(doc, "k")
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"field 'k' must be an integer >= 1, got {k!r}")
    primes = _require(doc, "primes")
    if not isinstance(primes, list) or not all(isinstance(p, int) for p in primes):
        raise ValueError("field 'primes' must be a list of integers")
    primes = _check_distinct_primes(primes, "field 'primes'")

    allowed = {"construction", "k", "primes", "exponents", "table", "refinement"}
    for name in doc:
        if name not in allowed:
            raise ValueError(f"unknown field '{name}' in partition document")

    if construction == "modular":
        if len(primes) != k - 1:
            raise ValueError(f"field 'primes' must list k-1 = {k - 1} primes, got {len(primes)}")
        exponents = _require(doc, "exponents")
        if (
            not isinstance(exponents, list)
            or len(exponents) != len(primes)
            or not all(isinstance(e, int) and e >= 1 for e in exponents)
        ):
            raise ValueError("field 'exponents' must list a positive exponent per prime")
        moduli = []
        for p, e in zip(primes, exponents):
            m = PrimePower(p, e).modulus
            if m < k:
                raise ValueError(f"field 'exponents': {p}**{e} = {m} is below k = {k}")
            moduli.append(m)
        size = 1
        for m in moduli:
            size *= m
        if size > table_cap:
            raise ValueError(f"field 'table': size {size} exceeds cap {table_cap}")
        entries = _require(doc, "table")
        if not isinstance(entries, list):
            raise ValueError("field 'table' must be a list of {vector, part} entries")
        table: dict[tuple[int, ...], int] = {}
        for entry in entries:
            vec = entry.get("vector")
            part = entry.get("part")
            if (
                not isinstance(vec, list)
                or len(vec) != len(moduli)
                or not all(isinstance(r, int) and 0 <= r < m for r, m in zip(vec, moduli))
            ):
                raise ValueError(f"field 'table': bad residue vector {vec!r}")
            if not isinstance(part, int) or not 1 <= part <= k:
                raise ValueError(f"field 'table': part {part!r} outside 1..{k}")
            if part - 1 in vec:
                raise ValueError(
                    f"field 'table': vector {vec} assigned to part {part} contains residue {part - 1}"
                )
            key = tuple(vec)
            if key in table:
                raise ValueError(f"field 'table': duplicate vector {vec}")
            table[key] = part
        if len(table) != size:
            raise ValueError(f"field 'table': {len(table)} entries, expected {size}")
        return Partition("modular", k, primes, tuple(exponents), table)

    if "exponents" in doc or "table" in doc:
        raise ValueError(f"fields 'exponents'/'table' are only valid for modular documents")
    built = _parity_style(construction, k, primes)
    refinement = doc.get("refinement")
    if refinement is not None:
        if built.refinement_pieces == 1:
            raise ValueError("field 'refinement' present but k equals the base part count")
        if refinement.get("base_parts") != built.base_parts or refinement.get("pieces") != built.refinement_pieces:
            raise ValueError("field 'refinement' disagrees with k and the prime count")
    return built
