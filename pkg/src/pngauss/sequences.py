"""Bipolar pseudonoise sequences: m-sequences and Gold codes.

A BipolarSequence holds symbols s(i) in {-1, +1}, stored bit-packed with
0 mapping to +1 and 1 to -1.  Only ``length`` symbols are materialised;
when a full period is materialised the sequence extends periodically to
any index, otherwise reads past the end raise InsufficientSourceError.
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import galois, lfsr
from .galois import BinaryPolynomial
from .lfsr import LfsrState

PNSQ_MAGIC = b"PNSQ"
PNSQ_VERSION = 1
#: u64 sentinel in the file header for periods too large to represent.
PERIOD_UNREPRESENTABLE = 0


class InsufficientSourceError(RuntimeError):
    """A consumer asked for more symbols than the source can supply."""


@dataclass(frozen=True)
class BipolarSequence:
    """Periodic +-1 sequence with provenance.

    ``packed`` holds the underlying bits little-endian within bytes
    (bit b maps to the symbol (-1)^b).  ``period`` may exceed ``length``
    for long-period generators where only a prefix is materialised.
    """

    packed: np.ndarray
    length: int
    period: int
    family: str
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError("length must be positive")
        if self.period < 1:
            raise ValueError("period must be positive")
        if self.packed.dtype != np.uint8 or self.packed.ndim != 1:
            raise ValueError("packed must be a 1-d uint8 array")
        if self.packed.size * 8 < self.length:
            raise ValueError("packed buffer shorter than declared length")

    @property
    def wraps(self) -> bool:
        """Whether indices beyond ``length`` are served by periodic extension."""
        return self.length >= self.period

    def available(self) -> int | None:
        """Symbols on offer: None means unbounded (full period materialised)."""
        return None if self.wraps else self.length

    def bits(self, start: int, count: int) -> np.ndarray:
        """Underlying bits for indices [start, start+count) as uint8 {0,1}."""
        if count < 0 or start < 0:
            raise ValueError("start and count must be non-negative")
        if count == 0:
            return np.zeros(0, dtype=np.uint8)
        if self.wraps:
            start %= self.period
            if start + count > self.period:
                # stitch modular slices of one period; cost stays O(count)
                period_bits = self._unpack(0, self.period)
                parts = []
                pos, remaining = start, count
                while remaining:
                    take = min(self.period - pos, remaining)
                    parts.append(period_bits[pos:pos + take])
                    remaining -= take
                    pos = 0
                return np.concatenate(parts)
            return self._unpack(start, count)
        if start + count > self.length:
            raise InsufficientSourceError(
                f"need symbols up to {start + count} but only {self.length} "
                f"of period {self.period} are materialised"
            )
        return self._unpack(start, count)

    def _unpack(self, start: int, count: int) -> np.ndarray:
        b0 = start // 8
        b1 = (start + count + 7) // 8
        bits = np.unpackbits(self.packed[b0:b1], bitorder="little")
        return bits[start - 8 * b0:start - 8 * b0 + count]

    def values(self, start: int = 0, count: int | None = None) -> np.ndarray:
        """Symbols s(start..start+count-1) as int8 in {-1, +1}."""
        if count is None:
            count = self.length
        bits = self.bits(start, count)
        return (1 - 2 * bits.astype(np.int8)).astype(np.int8)

    def symbol(self, i: int) -> int:
        return int(self.values(i, 1)[0])


def _pack(bits: np.ndarray) -> np.ndarray:
    return np.packbits(bits, bitorder="little")


def from_values(values, period: int | None = None, family: str = "external",
                provenance: dict | None = None) -> BipolarSequence:
    """Build a sequence from explicit +-1 symbols (period defaults to their count)."""
    arr = np.asarray(values)
    if arr.size == 0:
        raise ValueError("empty sequence")
    if not np.all(np.abs(arr) == 1):
        raise ValueError("symbols must be exactly -1 or +1")
    bits = ((1 - arr.astype(np.int64)) // 2).astype(np.uint8)
    return BipolarSequence(
        packed=_pack(bits),
        length=int(arr.size),
        period=int(period if period is not None else arr.size),
        family=family,
        provenance=provenance or {},
    )


def _mersenne_warning(n: int) -> None:
    if n not in galois.MERSENNE_EXPONENTS:
        warnings.warn(
            f"2^{n} - 1 is not a Mersenne prime; the Gold-code correlation "
            "bound is not guaranteed at this degree",
            stacklevel=3,
        )


def m_sequence(p: BinaryPolynomial, seed: LfsrState | None = None,
               length: int | None = None) -> BipolarSequence:
    """Maximum-length sequence of the primitive polynomial p, mapped 0 -> +1, 1 -> -1."""
    galois.validate_primitive(p)
    if seed is None:
        seed = lfsr.default_state(p)
    if seed.poly != p:
        raise ValueError("seed built for a different polynomial")
    if seed.registers == 0:
        raise lfsr.DegenerateSeedError("all-zero seed")
    period = (1 << p.degree) - 1
    if length is None:
        length = period
    if length < 1:
        raise ValueError("length must be positive")
    # materialising beyond one period is never needed; wrap handles the rest
    stored = min(length, period)
    bits = lfsr.run(seed, stored)
    return BipolarSequence(
        packed=_pack(bits[:stored]),
        length=stored,
        period=period,
        family="m-sequence",
        provenance={"poly": str(p), "poly_hex": p.to_hex(), "seed": seed.to_hex()},
    )


def gold_code(p1: BinaryPolynomial, p2: BinaryPolynomial,
              seed1: LfsrState | None = None, seed2: LfsrState | None = None,
              length: int | None = None) -> BipolarSequence:
    """XOR of two same-degree LFSR streams, as a +-1 sequence.

    Equivalently the elementwise product of the two constituent +-1
    m-sequences.  The degenerate identical-generator case would emit the
    constant +1 sequence and is rejected.
    """
    if p1.degree != p2.degree:
        raise galois.DegreeMismatchError(
            f"degree mismatch: {p1.degree} vs {p2.degree}"
        )
    galois.validate_primitive(p1)
    galois.validate_primitive(p2)
    if seed1 is None:
        seed1 = lfsr.default_state(p1)
    if seed2 is None:
        seed2 = lfsr.default_state(p2)
    if seed1.registers == 0 or seed2.registers == 0:
        raise lfsr.DegenerateSeedError("all-zero seed")
    if p1 == p2 and seed1.registers == seed2.registers:
        raise ValueError(
            "identical polynomials and seeds give the constant +1 sequence"
        )
    n = p1.degree
    _mersenne_warning(n)
    period = (1 << n) - 1
    if length is None:
        length = period
    if length < 1:
        raise ValueError("length must be positive")
    stored = min(length, period)
    packed1 = _pack(lfsr.run(seed1, stored))
    packed2 = _pack(lfsr.run(seed2, stored))
    return BipolarSequence(
        packed=np.bitwise_xor(packed1, packed2),
        length=stored,
        period=period,
        family="gold",
        provenance={
            "poly1": str(p1), "poly2": str(p2),
            "poly1_hex": p1.to_hex(), "poly2_hex": p2.to_hex(),
            "seed1": seed1.to_hex(), "seed2": seed2.to_hex(),
        },
    )


MAX_ORACLE_DEGREE = 16


def gold_code_trace_oracle(p: BinaryPolynomial, r: int,
                           length: int | None = None) -> BipolarSequence:
    """Trace-function construction of the Gold code: s(i) = (-1)^Tr(a^i + a^(i(2^r+1))).

    Field-arithmetic oracle for cross-validating the two-LFSR construction;
    capped at degree 16 because it is slow on purpose.
    """
    n = p.degree
    if n > MAX_ORACLE_DEGREE:
        raise galois.UnsupportedDegreeError(
            f"trace oracle supports degree <= {MAX_ORACLE_DEGREE}, got {n}"
        )
    if math.gcd(r, n) != 1:
        raise ValueError(f"r = {r} must be coprime to the degree {n}")
    galois.validate_primitive(p)
    _mersenne_warning(n)
    period = (1 << n) - 1
    if length is None:
        length = period
    if length < 1:
        raise ValueError("length must be positive")
    alpha = galois.poly_mod(2, p.mask)
    beta = galois.field_pow(alpha, (1 << r) + 1, p)
    stored = min(length, period)
    bits = np.empty(stored, dtype=np.uint8)
    a = 1
    c = 1
    for i in range(stored):
        bits[i] = galois.trace(a ^ c, p)
        a = galois.poly_mul_mod(a, alpha, p)
        c = galois.poly_mul_mod(c, beta, p)
    return BipolarSequence(
        packed=_pack(bits),
        length=stored,
        period=period,
        family="gold",
        provenance={"poly": str(p), "r": r, "construction": "trace"},
    )


def preferred_partner(p: BinaryPolynomial, r: int = 1) -> BinaryPolynomial:
    """Companion polynomial for the Gold pair: minimal polynomial of alpha^(2^r+1)."""
    n = p.degree
    if math.gcd(r, n) != 1:
        raise ValueError(f"r = {r} must be coprime to the degree {n}")
    alpha = galois.poly_mod(2, p.mask)
    beta = galois.field_pow(alpha, (1 << r) + 1, p)
    partner = galois.minimal_polynomial(beta, p)
    if partner.degree != n or not galois.is_primitive(partner):
        raise ValueError(
            f"alpha^(2^{r}+1) is not primitive at (n={n}, r={r}); "
            "no preferred pair here"
        )
    return partner


def cyclic_shift(s: BipolarSequence, d: int) -> BipolarSequence:
    """Sequence t with t(i) = s(i + d)."""
    if s.wraps:
        d %= s.period
        if d == 0:
            return s
        bits = s.bits(0, s.period)
        shifted = np.concatenate([bits[d:], bits[:d]])
        return BipolarSequence(
            packed=_pack(shifted),
            length=s.period,
            period=s.period,
            family=s.family,
            provenance={**s.provenance, "shift": s.provenance.get("shift", 0) + d},
        )
    if d == 0:
        return s
    if d < 0 or d >= s.length:
        raise InsufficientSourceError(
            "cannot shift a partially materialised sequence outside its window"
        )
    bits = s.bits(d, s.length - d)
    return BipolarSequence(
        packed=_pack(bits),
        length=s.length - d,
        period=s.period,
        family=s.family,
        provenance={**s.provenance, "shift": s.provenance.get("shift", 0) + d},
    )


# ---------------------------------------------------------------------------
# file formats

def write_packed(seq: BipolarSequence, path, length: int | None = None) -> None:
    """Packed-bit export: header (magic, version u32, period u64, length u64), then bits.

    Bits are little-endian within bytes, 0 -> +1 and 1 -> -1.  Periods that
    do not fit in u64 are stored as the sentinel 0.
    """
    if length is None:
        length = seq.length
    bits = seq.bits(0, length)
    period_field = seq.period if seq.period < (1 << 64) else PERIOD_UNREPRESENTABLE
    header = PNSQ_MAGIC + struct.pack("<IQQ", PNSQ_VERSION, period_field, length)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(_pack(bits).tobytes())


def read_packed(path) -> BipolarSequence:
    with open(path, "rb") as fh:
        header = fh.read(24)
        if len(header) < 24 or header[:4] != PNSQ_MAGIC:
            raise ValueError(f"{path}: not a packed sequence file (bad header at byte 0)")
        version, period, length = struct.unpack("<IQQ", header[4:])
        if version != PNSQ_VERSION:
            raise ValueError(f"{path}: unsupported version {version} at byte 4")
        payload = fh.read()
    need = (length + 7) // 8
    if len(payload) < need:
        raise ValueError(
            f"{path}: truncated payload at byte {24 + len(payload)} "
            f"(need {need} bytes for {length} symbols)"
        )
    packed = np.frombuffer(payload[:need], dtype=np.uint8).copy()
    if period == PERIOD_UNREPRESENTABLE:
        # period unknown/oversized: serve exactly the stored window
        period = length + 1  # ensures wraps is False
    return BipolarSequence(
        packed=packed,
        length=int(length),
        period=int(period),
        family="external",
        provenance={"source": str(path)},
    )


def write_csv(seq: BipolarSequence, path, length: int | None = None) -> None:
    """Plain-text +-1 export, one symbol per line."""
    if length is None:
        length = seq.length
    values = seq.values(0, length)
    with open(path, "w") as fh:
        for v in values:
            fh.write(f"{int(v)}\n")


def read_csv(path) -> BipolarSequence:
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                v = int(text)
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: not a symbol: {text!r}")
            if v not in (-1, 1):
                raise ValueError(f"{path}: line {lineno}: symbol must be -1 or +1")
            values.append(v)
    if not values:
        raise ValueError(f"{path}: no symbols")
    return from_values(values, provenance={"source": str(path)})
