"""Exact p-adic arithmetic primitives.

Everything here is pure integer / rational arithmetic: valuations, unit
parts, Legendre symbols (with the mod-4 convention at p = 2), residue
classes of the naturals, and the basic open cells of Q_p* keyed by a unit
residue and a valuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

# Witness set valid for every n < 2**64; larger inputs are rejected rather
# than silently falling back to a probabilistic answer.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_PRIME_LIMIT = 1 << 64

# Resource guard for moduli like p**e and p**w.  Python integers never
# overflow; the cap keeps accidental huge parameters from eating the machine.
MAX_MODULUS = 1 << 62


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for n < 2**64."""
    if n >= _PRIME_LIMIT:
        raise ValueError(f"primality test limited to n < 2**64, got {n}")
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d = n - 1
    r = (d & -d).bit_length() - 1
    d >>= r
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_prime(p: int) -> int:
    """Return p unchanged, raising ValueError if it is not prime."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return p


def _check_modulus(m: int, what: str) -> int:
    if m > MAX_MODULUS:
        raise ValueError(f"{what} = {m} exceeds the modulus budget 2**62")
    return m


def valuation(n: int, p: int) -> int:
    """Largest e with p**e dividing n, for n >= 1 and p prime.

    n = 0 is rejected (its valuation is infinite), as are non-prime p.
    """
    check_prime(p)
    if n < 1:
        raise ValueError(f"valuation requires n >= 1, got {n}")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def unit_part(n: int, p: int) -> int:
    """The p-free factor n / p**valuation(n, p); always coprime to p."""
    check_prime(p)
    if n < 1:
        raise ValueError(f"unit_part requires n >= 1, got {n}")
    while n % p == 0:
        n //= p
    return n


def valuations_upto(bound: int, p: int) -> list[int]:
    """Sieve of p-adic valuations for 1..bound; index 0 is unused (0).

    Costs about bound/(p-1) increments, much cheaper than per-element
    division when a whole window is needed.
    """
    check_prime(p)
    vals = [0] * (bound + 1)
    q = p
    while q <= bound:
        for m in range(q, bound + 1, q):
            vals[m] += 1
        q *= p
    return vals


def legendre(a: int, p: int) -> int:
    """Quadratic-character symbol of a modulo p, in {+1, -1, 0}.

    For odd p this is the Legendre symbol (0 when p divides a).  For
    p = 2 the symbol of an odd a is +1 when a = 1 (mod 4) and -1 when
    a = 3 (mod 4); even a is rejected since the mod-4 character is only
    defined on odd numbers.
    """
    check_prime(p)
    if p == 2:
        if a % 2 == 0:
            raise ValueError(f"mod-4 character undefined for even a = {a}")
        return 1 if a % 4 == 1 else -1
    a %= p
    if a == 0:
        return 0
    ls = pow(a, (p - 1) // 2, p)
    return -1 if ls == p - 1 else ls


def totient_prime_power(p: int, w: int) -> int:
    """Euler phi of p**w."""
    check_prime(p)
    if w < 1:
        raise ValueError(f"exponent must be >= 1, got {w}")
    return p ** (w - 1) * (p - 1)


def units_mod(p: int, w: int) -> list[int]:
    """All unit residues modulo p**w, as integers in [1, p**w)."""
    pw = _check_modulus(check_prime(p) ** w, f"{p}**{w}")
    return [a for a in range(1, pw) if a % p != 0]


@dataclass(frozen=True)
class PrimePower:
    """A prime p raised to a positive exponent e, with its modulus p**e."""

    p: int
    e: int

    def __post_init__(self) -> None:
        check_prime(self.p)
        if self.e < 1:
            raise ValueError(f"exponent must be >= 1, got {self.e}")
        _check_modulus(self.p**self.e, f"{self.p}**{self.e}")

    @property
    def modulus(self) -> int:
        return self.p**self.e


@dataclass(frozen=True)
class ResidueClass:
    """The arithmetic progression {rem + mod*t : t >= 0}.

    Membership requires n >= rem in addition to the congruence, matching
    progressions of naturals; normalization maps rem into [0, mod), which
    changes the set by at most finitely many elements and therefore never
    affects a density question.
    """

    rem: int
    mod: int

    def __post_init__(self) -> None:
        if self.mod < 1:
            raise ValueError(f"modulus must be >= 1, got {self.mod}")
        if self.rem < 0:
            raise ValueError(f"offset must be >= 0, got {self.rem}")

    def normalized(self) -> "ResidueClass":
        return ResidueClass(self.rem % self.mod, self.mod)

    def __contains__(self, n: int) -> bool:
        return n >= self.rem and (n - self.rem) % self.mod == 0

    def members_upto(self, bound: int):
        """Members of the progression that are <= bound, ascending."""
        return range(self.rem, bound + 1, self.mod)


def intersect_classes(c1: ResidueClass, c2: ResidueClass) -> ResidueClass | None:
    """Intersection of two residue classes, or None when it is empty.

    The result is the class modulo lcm(mod1, mod2) whose smallest member is
    the least integer lying in both inputs, so membership agrees exactly
    with `n in c1 and n in c2`.  It is None exactly when gcd(mod1, mod2)
    does not divide the offset difference.  Coprime moduli give the usual
    Chinese-Remainder modulus mod1*mod2.
    """
    g = math.gcd(c1.mod, c2.mod)
    if (c1.rem - c2.rem) % g != 0:
        return None
    lcm = c1.mod // g * c2.mod
    m2 = c2.mod // g
    t = (c2.rem - c1.rem) // g * pow(c1.mod // g, -1, m2) % m2
    base = (c1.rem + c1.mod * t) % lcm
    lo = max(c1.rem, c2.rem)
    if base < lo:
        base += lcm * ((lo - base + lcm - 1) // lcm)
    return ResidueClass(base, lcm)


@dataclass(frozen=True)
class Cell:
    """A basic open subset of Q_p*: valuation val and unit residue mod p**w.

    A positive rational x = u * p**s (u a p-adic unit) lies in the cell
    exactly when s == val and u == unit (mod p**w).  Cells at fixed (p, w)
    form a group under pointwise multiplication of representatives.
    """

    p: int
    w: int
    unit: int
    val: int

    def __post_init__(self) -> None:
        check_prime(self.p)
        if self.w < 1:
            raise ValueError(f"unit precision w must be >= 1, got {self.w}")
        pw = _check_modulus(self.p**self.w, f"{self.p}**{self.w}")
        unit = self.unit % pw
        if unit % self.p == 0:
            raise ValueError(f"unit residue {self.unit} is not a unit mod {pw}")
        object.__setattr__(self, "unit", unit)

    @property
    def modulus(self) -> int:
        return self.p**self.w

    def _compatible(self, other: "Cell") -> None:
        if (self.p, self.w) != (other.p, other.w):
            raise ValueError("cells live at different (p, w)")

    def __mul__(self, other: "Cell") -> "Cell":
        self._compatible(other)
        return Cell(self.p, self.w, self.unit * other.unit % self.modulus, self.val + other.val)

    def inverse(self) -> "Cell":
        return Cell(self.p, self.w, pow(self.unit, -1, self.modulus), -self.val)

    def __truediv__(self, other: "Cell") -> "Cell":
        return self * other.inverse()

    def __contains__(self, x) -> bool:
        return cell_of(x, self.p, self.w) == self


def cell_of(x: int | Fraction, p: int, w: int) -> Cell:
    """The unique cell at (p, w) containing the positive rational x.

    The valuation of x is val(num) - val(den) and the unit residue is
    unit(num) * unit(den)^-1 mod p**w, with num/den in lowest terms.
    """
    x = Fraction(x)
    if x <= 0:
        raise ValueError(f"cell classification requires x > 0, got {x}")
    check_prime(p)
    if w < 1:
        raise ValueError(f"unit precision w must be >= 1, got {w}")
    pw = _check_modulus(p**w, f"{p}**{w}")
    num, den = x.numerator, x.denominator
    s = valuation(num, p) - valuation(den, p)
    a = unit_part(num, p) * pow(unit_part(den, p), -1, pw) % pw
    return Cell(p, w, a, s)
