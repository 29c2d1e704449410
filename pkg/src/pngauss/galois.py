"""GF(2) polynomial arithmetic and small binary-field helpers.

Polynomials over GF(2) are plain ints: bit ``i`` is the coefficient of
``x^i``.  Field elements of GF(2^n) are ints below ``2^n``, understood as
residues modulo the field's defining polynomial.  This module exists as a
cross-validation oracle for the sequence generators, so primitivity
checking is deliberately capped at small degrees where factoring
``2^n - 1`` is trivial; the production degree-89 polynomials are accepted
through an explicit whitelist instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

FieldElement = int

#: Largest degree for which is_primitive() runs the full order check.
MAX_VERIFIED_DEGREE = 24

#: Exponents n for which 2^n - 1 is a (known) Mersenne prime.
MERSENNE_EXPONENTS = frozenset({
    2, 3, 5, 7, 13, 17, 19, 31, 61, 89, 107, 127, 521, 607, 1279, 2203,
    2281, 3217, 4253, 4423, 9689, 9941, 11213, 19937, 21701, 23209,
    44497, 86243, 110503, 132049, 216091, 756839, 859433, 1257787,
    1398269, 2976221, 3021377, 6972593, 13466917, 20996011, 24036583,
    25964951, 30402457, 32582657, 37156667, 42643801, 43112609,
    57885161, 74207281, 77232917, 82589933, 136279841,
})


class UnsupportedDegreeError(ValueError):
    """The operation needs a degree outside its supported range."""


class DegreeMismatchError(ValueError):
    """A field element does not fit the field it is used in."""


@dataclass(frozen=True)
class BinaryPolynomial:
    """Characteristic polynomial over GF(2), stored as a coefficient bitmask.

    Both the constant and the leading coefficient must be 1, which is the
    precondition for driving a feedback register at full length.
    """

    mask: int

    def __post_init__(self) -> None:
        if self.mask < 2:
            raise ValueError("polynomial must have positive degree")
        if not self.mask & 1:
            raise ValueError("constant coefficient b_0 must be 1")

    @property
    def degree(self) -> int:
        return self.mask.bit_length() - 1

    def coefficient(self, i: int) -> int:
        """Coefficient b_i, 0 for i outside [0, degree]."""
        if i < 0 or i > self.degree:
            return 0
        return (self.mask >> i) & 1

    def exponents(self) -> tuple[int, ...]:
        """Exponents of the nonzero terms, descending."""
        return tuple(i for i in range(self.degree, -1, -1) if self.coefficient(i))

    def to_hex(self) -> str:
        return hex(self.mask)

    def __str__(self) -> str:
        parts = []
        for e in self.exponents():
            if e == 0:
                parts.append("1")
            elif e == 1:
                parts.append("x")
            else:
                parts.append(f"x^{e}")
        return " + ".join(parts)


def parse_polynomial(text: str) -> BinaryPolynomial:
    """Parse either a hex coefficient mask ("0x25") or a term list ("x^5 + x^2 + 1")."""
    s = text.strip().lower()
    if not s:
        raise ValueError("empty polynomial")
    if s.startswith("0x"):
        return BinaryPolynomial(int(s, 16))
    mask = 0
    for term in s.replace(" ", "").split("+"):
        if not term:
            raise ValueError(f"malformed polynomial {text!r}")
        if term == "1":
            e = 0
        elif term == "x":
            e = 1
        elif term.startswith("x^"):
            e = int(term[2:])
            if e < 0:
                raise ValueError(f"negative exponent in {text!r}")
        else:
            raise ValueError(f"malformed polynomial term {term!r} in {text!r}")
        if mask >> e & 1:
            raise ValueError(f"repeated term x^{e} in {text!r}")
        mask |= 1 << e
    return BinaryPolynomial(mask)


# The two degree-89 production polynomials.  2^89 - 1 is a Mersenne prime,
# so the cheap order check x^(2^89-1) == 1 run by validate_primitive()
# already pins the multiplicative order to the full group size.
POLY_89_TRINOMIAL = BinaryPolynomial((1 << 89) | (1 << 38) | 1)
POLY_89_PENTANOMIAL = BinaryPolynomial(
    (1 << 89) | (1 << 72) | (1 << 55) | (1 << 38) | 1
)
PRIMITIVE_WHITELIST = frozenset({POLY_89_TRINOMIAL.mask, POLY_89_PENTANOMIAL.mask})


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2) polynomials."""
    acc = 0
    while a:
        if a & 1:
            acc ^= b
        a >>= 1
        b <<= 1
    return acc


def poly_mod(a: int, m: int) -> int:
    """Remainder of a modulo m in GF(2)[x]."""
    mb = m.bit_length()
    while a.bit_length() >= mb:
        a ^= m << (a.bit_length() - mb)
    return a


def _check_element(a: FieldElement, p: BinaryPolynomial) -> None:
    if a < 0 or a.bit_length() > p.degree:
        raise DegreeMismatchError(
            f"element {a:#x} is not reduced in a degree-{p.degree} field"
        )


def poly_mul_mod(a: FieldElement, b: FieldElement, p: BinaryPolynomial) -> FieldElement:
    """(a * b) mod p with XOR addition and carry-less multiplication."""
    _check_element(a, p)
    _check_element(b, p)
    return poly_mod(clmul(a, b), p.mask)


def field_pow(a: FieldElement, e: int, p: BinaryPolynomial) -> FieldElement:
    """a^e mod p by square-and-multiply; a^0 = 1."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    _check_element(a, p)
    result = 1
    base = a
    while e:
        if e & 1:
            result = poly_mul_mod(result, base, p)
        base = poly_mul_mod(base, base, p)
        e >>= 1
    return result


def trace(a: FieldElement, p: BinaryPolynomial) -> int:
    """GF(2)-valued trace of a, computed as the sum of a^(2^j) for j = 1..n.

    Because a^(2^n) = a in GF(2^n) this equals the usual j = 0..n-1 form;
    the equivalence is asserted in the test suite.
    """
    _check_element(a, p)
    acc = 0
    b = a
    for _ in range(p.degree):
        b = poly_mul_mod(b, b, p)
        acc ^= b
    if acc not in (0, 1):
        raise ValueError(f"trace landed outside GF(2); {p} is not primitive")
    return acc


@lru_cache(maxsize=None)
def _prime_factors(m: int) -> tuple[int, ...]:
    """Distinct prime factors by trial division (callers keep m <= 2^24)."""
    factors = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            factors.append(d)
            while m % d == 0:
                m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        factors.append(m)
    return tuple(factors)


def is_primitive(p: BinaryPolynomial) -> bool:
    """True iff x has multiplicative order 2^n - 1 modulo p.

    This single order condition is equivalent to primitivity: a reducible
    modulus has fewer than 2^n - 1 units, so no element can reach that
    order.  Degrees above MAX_VERIFIED_DEGREE raise; the degree-89
    production polynomials go through validate_primitive() instead.
    """
    n = p.degree
    if n > MAX_VERIFIED_DEGREE:
        raise UnsupportedDegreeError(
            f"primitivity check limited to degree {MAX_VERIFIED_DEGREE}; "
            f"got degree {n} (whitelist handles the production polynomials)"
        )
    if not p.coefficient(n):  # unreachable, mask encodes the leading term
        return False
    order = (1 << n) - 1
    x = poly_mod(2, p.mask)
    if field_pow(x, order, p) != 1:
        return False
    for r in _prime_factors(order):
        if field_pow(x, order // r, p) == 1:
            return False
    return True


@lru_cache(maxsize=None)
def _whitelist_order_check(mask: int) -> bool:
    p = BinaryPolynomial(mask)
    x = poly_mod(2, mask)
    return field_pow(x, (1 << p.degree) - 1, p) == 1


def validate_primitive(p: BinaryPolynomial) -> None:
    """Raise unless p is verified primitive or whitelisted.

    Whitelisted polynomials still get the x^(2^n - 1) == 1 sanity check;
    with 2^n - 1 prime that already forces the full order.
    """
    if p.degree <= MAX_VERIFIED_DEGREE:
        if not is_primitive(p):
            raise ValueError(f"{p} is not primitive")
        return
    if p.mask not in PRIMITIVE_WHITELIST:
        raise UnsupportedDegreeError(
            f"cannot verify primitivity of degree-{p.degree} polynomial {p}; "
            "not in the trusted whitelist"
        )
    if not _whitelist_order_check(p.mask):
        raise ValueError(f"whitelisted polynomial {p} failed the order sanity check")


def minimal_polynomial(beta: FieldElement, p: BinaryPolynomial) -> BinaryPolynomial:
    """Minimal polynomial over GF(2) of the residue beta in GF(2^n) mod p.

    Built as the product of (x + conjugate) over the Frobenius orbit of
    beta; the result must collapse to GF(2) coefficients.
    """
    _check_element(beta, p)
    if beta == 0:
        raise ValueError("zero has no characteristic-polynomial use here")
    conjugates = []
    b = beta
    while b not in conjugates:
        conjugates.append(b)
        b = poly_mul_mod(b, b, p)
    # coeffs[i] is the x^i coefficient, living in GF(2^n) during the product
    coeffs: list[int] = [1]
    for c in conjugates:
        nxt = [0] * (len(coeffs) + 1)
        for i, a in enumerate(coeffs):
            nxt[i + 1] ^= a
            nxt[i] ^= poly_mul_mod(a, c, p)
        coeffs = nxt
    if any(v not in (0, 1) for v in coeffs):
        raise ValueError("conjugate product did not collapse to GF(2)")
    mask = 0
    for i, bit in enumerate(coeffs):
        mask |= bit << i
    return BinaryPolynomial(mask)


@lru_cache(maxsize=None)
def find_primitive_polynomial(n: int) -> BinaryPolynomial:
    """Smallest-mask primitive polynomial of degree n (n <= MAX_VERIFIED_DEGREE)."""
    if n < 1 or n > MAX_VERIFIED_DEGREE:
        raise UnsupportedDegreeError(f"degree {n} outside verified range")
    for mask in range((1 << n) | 1, 1 << (n + 1), 2):
        p = BinaryPolynomial(mask)
        if is_primitive(p):
            return p
    raise RuntimeError(f"no primitive polynomial of degree {n}")  # cannot happen
