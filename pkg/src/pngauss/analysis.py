"""Statistical verification: moments, correlation measures, product moments.

The combined correlation measure of order k of a +-1 sequence s of period N
is the maximum of |sum_{i=1..T} s(L*i + d_1) ... s(L*i + d_k)| over stride
L >= 1, strictly increasing delay tuples 0 <= d_1 < ... < d_k < N, and
truncations T such that every index L*i + d_j stays inside {1, ..., N}.
``correlation_measure_exact`` enumerates that whole space; the cost grows
like C(N, k) * N, hence the hard size caps.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .grng import GaussianSampleBlock
from .sequences import BipolarSequence

#: |grid cell| below NOISE_FACTOR / sqrt(T) counts as "no peak";
#: above PEAK_FACTOR / sqrt(T) counts as a structural peak.
NOISE_FACTOR = 5.0
PEAK_FACTOR = 20.0

_EXACT_CAPS = {1: 64, 2: 64, 3: 64, 4: 32, 5: 32}


@dataclass(frozen=True)
class MomentReport:
    """Raw moments m_k = (1/T) sum x^k for k = 1..k_max."""

    k_max: int
    moments: tuple[float, ...]
    T: int

    def moment(self, k: int) -> float:
        return self.moments[k - 1]

    def to_json_dict(self) -> dict:
        return {"k_max": self.k_max, "moments": list(self.moments), "T": self.T}


@dataclass(frozen=True)
class Witness:
    """One (L, D, T) point of the correlation search space."""

    L: int
    delays: tuple[int, ...]
    T: int


@dataclass(frozen=True)
class CorrelationMeasureResult:
    k: int
    value: int
    argmax: Witness
    exact: bool
    #: witness whose sum hits its full admissible range, when one exists
    full_peak: Witness | None = None


@dataclass(frozen=True)
class TripleMomentGrid:
    """c(d1, d2) = (1/T) sum_i S(i) S(i+d1) S(i+d2) over a delay window."""

    values: np.ndarray
    window: tuple[int, int]
    T: int

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class Histogram:
    bin_count: int
    lo: float
    hi: float
    counts: np.ndarray
    underflow: int
    overflow: int
    total: int

    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.bin_count + 1)


def _as_samples(data) -> np.ndarray:
    if isinstance(data, GaussianSampleBlock):
        return data.samples
    return np.asarray(data, dtype=np.float64)


def raw_moments(samples, k_max: int = 4) -> MomentReport:
    """Raw moments via numpy's pairwise summation (order-stable to ~1e-12)."""
    x = _as_samples(samples)
    if x.size == 0:
        raise ValueError("empty sample set")
    if k_max < 1:
        raise ValueError("k_max must be positive")
    t = int(x.size)
    moments = []
    power = np.ones_like(x)
    for _ in range(k_max):
        power = power * x
        moments.append(float(np.sum(power)) / t)
    return MomentReport(k_max=k_max, moments=tuple(moments), T=t)


def _one_period_1based(seq: BipolarSequence) -> np.ndarray:
    """sm with sm[m] = s(m) for m = 1..N (index 0 unused)."""
    n = seq.period
    v = seq.values(0, n)
    sm = np.empty(n + 1, dtype=np.int8)
    sm[0] = 0
    sm[1:n] = v[1:n]
    sm[n] = v[0]
    return sm


def _check_exact_feasible(seq: BipolarSequence, k: int) -> None:
    if k < 1:
        raise ValueError("order k must be positive")
    cap = _EXACT_CAPS.get(k)
    n = seq.period
    if cap is None or n > cap:
        raise ValueError(
            f"exact search supports N <= {_EXACT_CAPS.get(k, 'n/a')} at k = {k} "
            f"(got N = {n}); use correlation_measure_restricted"
        )
    if k > n:
        raise ValueError(f"order {k} exceeds the period {n}")


class _ClassScanner:
    """Shared DFS over delay tuples (d_1 < ... < d_{k-1} < dk) for one (L, dk)."""

    def __init__(self, sm: np.ndarray, k: int):
        self.sm = sm
        self.k = k
        self.best_value = 0
        self.best_witness: Witness | None = None
        self.best_peak: Witness | None = None

    def scan(self, L: int, dk: int, i_max: int, track_value: bool) -> bool:
        base = np.arange(1, i_max + 1, dtype=np.intp) * L
        rows = self.sm[base[None, :] + np.arange(dk + 1, dtype=np.intp)[:, None]]
        found_peak = False

        def rec(start: int, depth: int, prod: np.ndarray, chosen: tuple[int, ...]):
            nonlocal found_peak
            if depth == 0:
                cs = np.cumsum(prod, dtype=np.int32)
                np.abs(cs, out=cs)
                t = int(np.argmax(cs))
                val = int(cs[t])
                if track_value and val > self.best_value:
                    self.best_value = val
                    self.best_witness = Witness(L=L, delays=chosen + (dk,), T=t + 1)
                if val == i_max:
                    found_peak = True
                    if self.best_peak is None or i_max > self.best_peak.T:
                        self.best_peak = Witness(L=L, delays=chosen + (dk,), T=i_max)
                return
            for d in range(start, dk - depth + 1):
                rec(d + 1, depth - 1, prod * rows[d], chosen + (d,))

        rec(0, self.k - 1, rows[dk], ())
        return found_peak


def correlation_measure_exact(seq: BipolarSequence, k: int) -> CorrelationMeasureResult:
    """Exhaustive combined correlation measure of order k.

    Searches every admissible (L, D, T); classes whose whole index range
    cannot beat the current best are pruned, which is what makes the k = 5
    search at N = 31 finish quickly once a large sum is on the board.
    ``full_peak`` records a witness whose sum fills its entire admissible
    range, when the value sweep runs into one (see ``find_full_peak`` for
    the dedicated search).
    """
    _check_exact_feasible(seq, k)
    n = seq.period
    scanner = _ClassScanner(_one_period_1based(seq), k)
    # L ascending, end delay ascending: the admissible range (and with it
    # the achievable sum) only shrinks, so the break conditions are sound
    for L in range(1, n + 1):
        if (n - (k - 1)) // L <= scanner.best_value:
            break
        for dk in range(k - 1, n):
            i_max = (n - dk) // L
            if i_max < 1 or i_max <= scanner.best_value:
                break
            scanner.scan(L, dk, i_max, track_value=True)
    assert scanner.best_witness is not None
    return CorrelationMeasureResult(
        k=k, value=scanner.best_value, argmax=scanner.best_witness,
        exact=True, full_peak=scanner.best_peak,
    )


def find_full_peak(seq: BipolarSequence, k: int, min_range: int = 2) -> Witness | None:
    """Largest-range witness whose correlation sum fills its admissible range.

    Scans (L, D) classes in descending range order and stops at the first
    hit, so sequences carrying a structural peak answer quickly.  Ranges
    below ``min_range`` are ignored (a single-term sum is trivially full).
    """
    _check_exact_feasible(seq, k)
    n = seq.period
    scanner = _ClassScanner(_one_period_1based(seq), k)
    classes = []
    for L in range(1, n + 1):
        for dk in range(k - 1, n):
            i_max = (n - dk) // L
            if i_max < min_range:
                break
            classes.append((i_max, L, dk))
    classes.sort(key=lambda c: -c[0])
    for i_max, L, dk in classes:
        if scanner.best_peak is not None:
            break
        scanner.scan(L, dk, i_max, track_value=False)
    return scanner.best_peak


def correlation_measure_restricted(seq: BipolarSequence, k: int, L_set, d_max: int,
                                   T_set) -> CorrelationMeasureResult:
    """Correlation sweep over user-supplied (L, D, T) sets, periodic indexing.

    Indices wrap around the period, so a full-period T recovers the classic
    periodic auto/cross-correlations.  Whenever every requested T fits the
    admissible range of Def-style index windows the result is a lower bound
    on the exact measure; it is flagged exact=False regardless.
    """
    if k < 1:
        raise ValueError("order k must be positive")
    L_set = sorted(set(int(x) for x in L_set))
    T_set = sorted(set(int(x) for x in T_set))
    if not L_set or not T_set:
        raise ValueError("empty search set")
    if d_max < k:
        raise ValueError(f"d_max = {d_max} cannot host {k} distinct delays")
    if L_set[0] < 1 or T_set[0] < 1:
        raise ValueError("strides and truncations must be positive")
    n = seq.period
    v = seq.values(0, n).astype(np.int8)
    t_max = T_set[-1]
    t_idx = np.asarray(T_set, dtype=np.intp) - 1

    best_value = -1
    best_witness: Witness | None = None
    for L in L_set:
        pos = (np.arange(1, t_max + 1, dtype=np.int64) * L) % n
        rows = np.empty((d_max, t_max), dtype=np.int8)
        for d in range(d_max):
            rows[d] = v[(pos + d) % n]
        for delays in combinations(range(d_max), k):
            prod = rows[delays[0]].copy()
            for d in delays[1:]:
                prod *= rows[d]
            cs = np.cumsum(prod, dtype=np.int32)
            picks = np.abs(cs[t_idx])
            j = int(np.argmax(picks))
            val = int(picks[j])
            if val > best_value:
                best_value = val
                best_witness = Witness(L=L, delays=tuple(delays), T=T_set[j])
    assert best_witness is not None
    return CorrelationMeasureResult(
        k=k, value=best_value, argmax=best_witness, exact=False, full_peak=None
    )


def naive_correlation_order1(seq: BipolarSequence) -> int:
    """O(N^3) direct enumeration of the order-1 measure (test oracle)."""
    n = seq.period
    sm = _one_period_1based(seq)
    best = 0
    for L in range(1, n + 1):
        for d in range(n):
            total = 0
            i = 1
            while L * i + d <= n:
                total += int(sm[L * i + d])
                best = max(best, abs(total))
                i += 1
    return best


def product_moment(block: GaussianSampleBlock, delays, T: int | None = None) -> float:
    """(1/T) sum_{i} S(i + d_1) ... S(i + d_k) over the first T start points.

    Delays must be strictly increasing and, when the block length M is
    known, stay below T - M so blocks at the largest delay still exist.
    """
    d = tuple(int(x) for x in delays)
    if len(d) == 0:
        raise ValueError("need at least one delay")
    if any(b <= a for a, b in zip(d, d[1:])):
        raise ValueError(f"delays must be strictly increasing, got {d}")
    if d[0] < 0:
        raise ValueError("delays must be non-negative")
    samples = block.samples
    if T is None:
        T = samples.size - d[-1]
    if T < 1:
        raise ValueError("not enough samples for these delays")
    if T + d[-1] > samples.size:
        raise ValueError(
            f"delays reach index {T + d[-1] - 1} but only {samples.size} samples exist"
        )
    m = block.config.get("M")
    if m is not None and d[-1] >= T - m:
        raise ValueError(f"largest delay {d[-1]} must stay below T - M = {T - m}")
    prod = samples[d[0]:d[0] + T].copy()
    for dj in d[1:]:
        prod *= samples[dj:dj + T]
    return float(np.sum(prod)) / T


def triple_moment_cells(samples, d1s, d2s, T: int) -> np.ndarray:
    """Triple product moments for the delay grid d1s x d2s (independent cells)."""
    x = _as_samples(samples)
    d1s = np.asarray(d1s, dtype=np.intp)
    d2s = np.asarray(d2s, dtype=np.intp)
    max_d = int(max(d1s.max(), d2s.max()))
    if T < 1:
        raise ValueError("T must be positive")
    if T + max_d > x.size:
        raise ValueError(
            f"need {T + max_d} samples for T = {T} and max delay {max_d}, "
            f"got {x.size}"
        )
    base = x[:T]
    # all shifted views share storage; the matvec below is the hot loop
    shifted = np.lib.stride_tricks.sliding_window_view(x, T)
    rows2 = shifted[d2s]
    out = np.empty((d1s.size, d2s.size), dtype=np.float64)
    for j, d1 in enumerate(d1s):
        out[j] = rows2 @ (base * x[d1:d1 + T])
    out /= T
    return out


def triple_moment_grid(samples, window: int | tuple[int, int] = (100, 100),
                       T: int | None = None) -> TripleMomentGrid:
    """Full (D1, D2) grid of triple product moments, delays starting at 0."""
    if isinstance(window, int):
        window = (window, window)
    d1, d2 = int(window[0]), int(window[1])
    if d1 < 1 or d2 < 1:
        raise ValueError("window extents must be positive")
    x = _as_samples(samples)
    max_d = max(d1, d2) - 1
    if T is None:
        T = x.size - max_d
    values = triple_moment_cells(x, np.arange(d1), np.arange(d2), T)
    return TripleMomentGrid(values=values, window=(d1, d2), T=int(T))


def histogram(samples, bins: int = 100, value_range: tuple[float, float] = (-5.0, 5.0)) -> Histogram:
    """Uniform-width histogram; out-of-range samples land in overflow tallies.

    Boundary samples go to the upper bin except at the final edge, which
    belongs to the last bin.
    """
    x = _as_samples(samples)
    if x.size == 0:
        raise ValueError("empty sample set")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    lo, hi = float(value_range[0]), float(value_range[1])
    if not lo < hi:
        raise ValueError("range must satisfy lo < hi")
    if bins < 1:
        raise ValueError("bins must be positive")
    inside = x[(x >= lo) & (x <= hi)]
    counts, _ = np.histogram(inside, bins=bins, range=(lo, hi))
    underflow = int(np.count_nonzero(x < lo))
    overflow = int(np.count_nonzero(x > hi))
    return Histogram(
        bin_count=bins, lo=lo, hi=hi, counts=counts.astype(np.int64),
        underflow=underflow, overflow=overflow, total=int(x.size),
    )


def sliding_block_moment(seq: BipolarSequence, M: int, k: int,
                         T: int | None = None) -> float:
    """(1/T) sum_{i=1..T} (sum of the M symbols after position i)^k.

    Windows slide by one and wrap periodically; with T = N (the default)
    this is the full-period k-th moment of the raw (unnormalised) block
    sums, the quantity the block-moment bound caps.
    """
    n = seq.period
    if T is None:
        T = n
    if T < 1:
        raise ValueError("T must be positive")
    if M < 1:
        raise ValueError("M must be positive")
    v = seq.values(0, n).astype(np.int64)
    ext = np.resize(v, T + M)
    csum = np.concatenate([[0], np.cumsum(ext)])
    w = csum[M:M + T] - csum[:T]
    return raw_moments(w.astype(np.float64), k_max=k).moment(k)


# ---------------------------------------------------------------------------
# delimited report formats

def histogram_to_csv(hist: Histogram, path) -> None:
    """Rows of (bin_lo, bin_hi, count); overflow tallies use infinite edges."""
    edges = hist.edges()
    with open(path, "w") as fh:
        fh.write("bin_lo,bin_hi,count\n")
        fh.write(f"-inf,{edges[0]:.17g},{hist.underflow}\n")
        for i in range(hist.bin_count):
            fh.write(f"{edges[i]:.17g},{edges[i + 1]:.17g},{hist.counts[i]}\n")
        fh.write(f"{edges[-1]:.17g},inf,{hist.overflow}\n")


def grid_to_csv(grid: TripleMomentGrid, path) -> None:
    """Matrix CSV: first delays as rows, second delays as columns (signed values)."""
    d1, d2 = grid.window
    with open(path, "w") as fh:
        fh.write("d1\\d2," + ",".join(str(j) for j in range(d2)) + "\n")
        for i in range(d1):
            row = ",".join(f"{v:.17g}" for v in grid.values[i])
            fh.write(f"{i},{row}\n")
