"""Gaussian sample generation from binary sequences.

Two models:

* binary block sums -- S(i) = M^(-1/2) * sum of M consecutive +-1 symbols,
  disjoint blocks (stride exactly M, no reuse);
* Tausworthe sums -- consecutive B-bit windows of the bit stream map to
  uniforms in [0,1) via their binary expansion, and ``terms`` consecutive
  uniforms are summed and standardised.

Both are pure functions of (config, range), so disjoint sample ranges can
be produced independently and concatenated.
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass, field

import numpy as np

from .sequences import BipolarSequence, InsufficientSourceError

#: symbols consumed per vectorised pass; keeps the working set small
_CHUNK_BITS = 1 << 22


@dataclass(frozen=True)
class BlockSumConfig:
    """Block-sum model parameters: block length M over a +-1 source."""

    M: int
    source: BipolarSequence
    start_offset: int = 0

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ValueError("M must be positive")
        if self.start_offset < 0:
            raise ValueError("start_offset must be non-negative")
        n = self.source.period
        if self.M * 4 > n:
            raise ValueError(
                f"M = {self.M} too large for period {n}; need M <= period/4"
            )
        if self.M * 100 > n:
            warnings.warn(
                f"M = {self.M} above period/100; block sums reuse structure "
                "of the short source",
                stacklevel=2,
            )


@dataclass(frozen=True)
class TauswortheConfig:
    """Uniform-sum model parameters: bit depth B, uniforms summed per output."""

    B: int
    terms: int
    source: BipolarSequence

    def __post_init__(self) -> None:
        if self.B < 1:
            raise ValueError("bit depth B must be positive")
        if self.B > 64:
            raise ValueError("bit depth B above 64 is not supported")
        if self.terms < 1:
            raise ValueError("terms must be positive")


@dataclass(frozen=True)
class GaussianSampleBlock:
    """Generated samples plus a JSON-able snapshot of how they were made."""

    samples: np.ndarray
    model: str
    config: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.samples.size)


def _source_snapshot(source: BipolarSequence) -> dict:
    return {"family": source.family, **source.provenance}


def _check_supply(source: BipolarSequence, needed: int) -> None:
    avail = source.available()
    if avail is not None and needed > avail:
        raise InsufficientSourceError(
            f"model needs {needed} symbols but the source supplies {avail}"
        )


def block_sum_gaussian(cfg: BlockSumConfig, count: int, start_block: int = 0,
                       overlapping: bool = False) -> GaussianSampleBlock:
    """Samples S(start_block .. start_block+count-1) of the block-sum model.

    Block i consumes source symbols [offset + i*M, offset + (i+1)*M); with
    ``overlapping=True`` the stride drops to 1 (windows share symbols),
    which is off the default path on purpose.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if start_block < 0:
        raise ValueError("start_block must be non-negative")
    M = cfg.M
    src = cfg.source
    scale = 1.0 / math.sqrt(M)
    if overlapping:
        first = cfg.start_offset + start_block
        _check_supply(src, first + count + M - 1)
        vals = src.values(first, count + M - 1).astype(np.int64)
        csum = np.concatenate([[0], np.cumsum(vals)])
        sums = csum[M:] - csum[:-M]
        samples = sums * scale
    else:
        first = cfg.start_offset + start_block * M
        _check_supply(src, first + count * M)
        samples = np.empty(count, dtype=np.float64)
        done = 0
        blocks_per_chunk = max(1, _CHUNK_BITS // M)
        while done < count:
            c = min(blocks_per_chunk, count - done)
            bits = src.bits(first + done * M, c * M)
            ones = bits.reshape(c, M).sum(axis=1, dtype=np.int64)
            # block sum of +-1 symbols = M - 2 * (number of 1 bits)
            samples[done:done + c] = (M - 2 * ones) * scale
            done += c
    return GaussianSampleBlock(
        samples=samples,
        model="binary-block-sum",
        config={
            "M": M,
            "start_offset": cfg.start_offset,
            "start_block": start_block,
            "count": count,
            "overlapping": overlapping,
            "source": _source_snapshot(src),
        },
    )


def tausworthe_uniform(cfg: TauswortheConfig, count: int,
                       start_window: int = 0) -> np.ndarray:
    """Uniforms from consecutive non-overlapping B-bit windows of the bit stream.

    Window bits (e_1 .. e_B) map to sum e_i 2^(-i), e_1 most significant.
    Exact for B <= 53; larger depths round to the nearest double.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if start_window < 0:
        raise ValueError("start_window must be non-negative")
    B = cfg.B
    src = cfg.source
    _check_supply(src, (start_window + count) * B)
    weights = (np.uint64(1) << np.arange(B - 1, -1, -1, dtype=np.uint64))
    scale = 2.0 ** -B
    out = np.empty(count, dtype=np.float64)
    done = 0
    windows_per_chunk = max(1, _CHUNK_BITS // B)
    while done < count:
        c = min(windows_per_chunk, count - done)
        bits = src.bits((start_window + done) * B, c * B)
        ints = bits.reshape(c, B).astype(np.uint64) @ weights
        out[done:done + c] = ints.astype(np.float64) * scale
        done += c
    return out


def tausworthe_gaussian(cfg: TauswortheConfig, count: int,
                        start_sample: int = 0) -> GaussianSampleBlock:
    """Standardised sums of ``terms`` consecutive uniforms.

    G(i) = (sum of uniforms - terms/2) / sqrt(terms/12): zero mean and unit
    variance, which is what makes the measured second moments comparable.
    """
    if count < 1:
        raise ValueError("count must be positive")
    u = tausworthe_uniform(cfg, count * cfg.terms, start_window=start_sample * cfg.terms)
    sums = u.reshape(count, cfg.terms).sum(axis=1)
    samples = (sums - cfg.terms / 2.0) / math.sqrt(cfg.terms / 12.0)
    return GaussianSampleBlock(
        samples=samples,
        model="tausworthe-clt",
        config={
            "B": cfg.B,
            "terms": cfg.terms,
            "start_sample": start_sample,
            "count": count,
            "source": _source_snapshot(cfg.source),
        },
    )


def standardized_fourth_moment(terms: int) -> float:
    """Fourth moment of the standardised sum of ``terms`` uniforms: 3 - 6/(5*terms)."""
    if terms < 1:
        raise ValueError("terms must be positive")
    return 3.0 - 6.0 / (5.0 * terms)


# ---------------------------------------------------------------------------
# sample files

def write_samples_csv(samples: np.ndarray, path) -> None:
    """One value per line, 17 significant digits (round-trips float64)."""
    with open(path, "w") as fh:
        for v in samples:
            fh.write(f"{v:.17g}\n")


def read_samples_csv(path) -> np.ndarray:
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: not a number: {text!r}")
    if not values:
        raise ValueError(f"{path}: no samples")
    return np.asarray(values, dtype=np.float64)


def write_samples_bin(samples: np.ndarray, path) -> None:
    """Little-endian float64 payload behind an 8-byte little-endian count."""
    arr = np.ascontiguousarray(samples, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", arr.size))
        fh.write(arr.tobytes())


def read_samples_bin(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(8)
        if len(header) < 8:
            raise ValueError(f"{path}: truncated count header at byte {len(header)}")
        (count,) = struct.unpack("<Q", header)
        payload = fh.read()
    if len(payload) < 8 * count:
        raise ValueError(
            f"{path}: truncated payload at byte {8 + len(payload)} "
            f"(need {8 * count} bytes for {count} samples)"
        )
    return np.frombuffer(payload[:8 * count], dtype="<f8").astype(np.float64)
