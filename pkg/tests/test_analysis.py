import numpy as np
import pytest

from pngauss import analysis, bounds, galois
from pngauss.analysis import (
    correlation_measure_exact,
    correlation_measure_restricted,
    histogram,
    naive_correlation_order1,
    product_moment,
    raw_moments,
    sliding_block_moment,
    triple_moment_cells,
    triple_moment_grid,
)
from pngauss.galois import parse_polynomial
from pngauss.grng import BlockSumConfig, block_sum_gaussian
from pngauss.sequences import from_values, m_sequence


def test_raw_moments_symmetric_pair():
    r = raw_moments(np.array([1.0, -1.0]))
    assert r.moments == (0.0, 1.0, 0.0, 1.0)
    assert r.T == 2


def test_raw_moments_constant():
    r = raw_moments(np.full(10, 2.5))
    assert r.moments == pytest.approx((2.5, 6.25, 15.625, 39.0625))


def test_raw_moments_empty_rejected():
    with pytest.raises(ValueError):
        raw_moments(np.array([]))


def test_raw_moments_shuffle_stability():
    rng = np.random.default_rng(7)
    x = rng.normal(size=100_000)
    a = raw_moments(x)
    y = x.copy()
    rng.shuffle(y)
    b = raw_moments(y)
    for ma, mb in zip(a.moments, b.moments):
        assert abs(ma - mb) <= 1e-12 * max(1.0, abs(ma))


def test_constant_sequence_hits_trivial_maximum():
    # all products are +1, so the sum fills the whole admissible range;
    # strictly increasing delays cap that range at N - k + 1
    seq = from_values([1] * 9)
    for k in (1, 2, 3):
        r = correlation_measure_exact(seq, k)
        assert r.value == 9 - k + 1
        assert r.argmax.L == 1 and r.argmax.T == 9 - k + 1
        assert r.full_peak is not None


def test_alternating_period_two():
    seq = from_values([1, -1])
    assert correlation_measure_exact(seq, 1).value == 1


@pytest.mark.parametrize("n_len", [5, 11, 23, 40])
def test_order1_matches_naive_triple_loop(n_len):
    rng = np.random.default_rng(n_len)
    seq = from_values(rng.choice([-1, 1], size=n_len))
    assert correlation_measure_exact(seq, 1).value == naive_correlation_order1(seq)


# golden fixtures: exhaustive searches frozen from this code base
MSEQ3_THETAS = {1: 2, 2: 3, 3: 4}
MSEQ4_THETA2 = 5
GOLD5_THETAS = {1: 7, 2: 9, 3: 12}
GOLD5_THETA5 = 18
GOLD5_PEAK_DELAYS = (0, 2, 7, 8, 13)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_msequence3_fixture(k):
    seq = bounds.standard_sequence("m-sequence", 3)
    assert correlation_measure_exact(seq, k).value == MSEQ3_THETAS[k]


def test_msequence3_order3_peak_is_the_trinomial_relation():
    # x^3+x+1 forces s(i) s(i+1) s(i+3) = +1 for every i
    seq = bounds.standard_sequence("m-sequence", 3)
    r = correlation_measure_exact(seq, 3)
    assert r.full_peak is not None
    assert r.full_peak.delays == (0, 1, 3)
    assert r.full_peak.T == 4


def test_msequence4_fixture():
    seq = bounds.standard_sequence("m-sequence", 4)
    assert correlation_measure_exact(seq, 2).value == MSEQ4_THETA2


def test_exact_caps_enforced():
    seq = m_sequence(parse_polynomial("x^7 + x^3 + 1"), length=127)
    with pytest.raises(ValueError):
        correlation_measure_exact(seq, 2)  # N = 127 > 64
    small = bounds.standard_sequence("m-sequence", 3)
    with pytest.raises(ValueError):
        correlation_measure_exact(small, 6)
    with pytest.raises(ValueError):
        correlation_measure_exact(small, 0)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_restricted_full_period_is_periodic_autocorrelation(n):
    # m-sequence two-valued autocorrelation: every nonzero lag sums to -1
    p = galois.find_primitive_polynomial(n)
    period = (1 << n) - 1
    seq = m_sequence(p, length=period)
    r = correlation_measure_restricted(seq, 2, L_set={1}, d_max=period,
                                       T_set={period})
    assert r.value == 1
    assert not r.exact


def test_restricted_gold_autocorrelation_bounded():
    p5 = parse_polynomial("x^5 + x^2 + 1")
    g = bounds.standard_sequence("gold", 5)
    r = correlation_measure_restricted(g, 2, L_set={1}, d_max=31, T_set={31})
    assert r.value <= 1 + (1 << ((5 + 2) // 2))  # 9


def test_restricted_is_lower_bound_on_admissible_sets():
    for fam, n in (("m-sequence", 3), ("m-sequence", 4), ("gold", 5)):
        seq = bounds.standard_sequence(fam, n)
        exact = correlation_measure_exact(seq, 2).value
        # T <= period - d_max keeps every term inside the exact search space
        restricted = correlation_measure_restricted(
            seq, 2, L_set={1, 2}, d_max=3,
            T_set=set(range(1, (seq.period - 3) // 2 + 1)),
        )
        assert restricted.value <= exact


def test_restricted_rejects_empty_sets():
    seq = bounds.standard_sequence("m-sequence", 3)
    with pytest.raises(ValueError):
        correlation_measure_restricted(seq, 2, L_set=set(), d_max=5, T_set={1})
    with pytest.raises(ValueError):
        correlation_measure_restricted(seq, 2, L_set={1}, d_max=5, T_set=set())
    with pytest.raises(ValueError):
        correlation_measure_restricted(seq, 3, L_set={1}, d_max=2, T_set={1})


def _sample_block(n=10, M=4, count=200):
    seq = m_sequence(galois.find_primitive_polynomial(n), length=(1 << n) - 1)
    return block_sum_gaussian(BlockSumConfig(M=M, source=seq), count)


def test_product_moment_order1_is_mean():
    block = _sample_block()
    assert product_moment(block, (0,), T=150) == pytest.approx(
        float(np.mean(block.samples[:150])))


def test_product_moment_rejects_duplicate_delays():
    block = _sample_block()
    with pytest.raises(ValueError):
        product_moment(block, (0, 0))


def test_product_moment_rejects_out_of_range_delays():
    block = _sample_block(count=50)
    with pytest.raises(ValueError):
        product_moment(block, (0, 49), T=40)
    with pytest.raises(ValueError):
        product_moment(block, (0, 45), T=48)  # d_k >= T - M


def test_product_moment_matches_direct_sum():
    block = _sample_block(count=120)
    s = block.samples
    t = 80
    expected = float(np.mean(s[:t] * s[7:7 + t] * s[20:20 + t]))
    assert product_moment(block, (0, 7, 20), T=t) == pytest.approx(expected)


def test_triple_grid_constant_input():
    grid = triple_moment_grid(np.ones(300), window=10)
    assert np.all(grid.values == 1.0)


def test_triple_grid_matches_naive_loops():
    rng = np.random.default_rng(3)
    x = rng.normal(size=400)
    grid = triple_moment_grid(x, window=6, T=300)
    for d1 in range(6):
        for d2 in range(6):
            direct = np.mean(x[:300] * x[d1:d1 + 300] * x[d2:d2 + 300])
            assert grid.values[d1, d2] == pytest.approx(direct, rel=1e-12)


def test_triple_grid_symmetry():
    rng = np.random.default_rng(4)
    x = rng.normal(size=2000)
    grid = triple_moment_grid(x, window=25)
    assert np.allclose(grid.values, grid.values.T, atol=1e-12)


def test_triple_grid_partitioned_cells_agree():
    rng = np.random.default_rng(5)
    x = rng.normal(size=1500)
    grid = triple_moment_grid(x, window=20, T=1400)
    top = triple_moment_cells(x, range(0, 10), range(20), T=1400)
    bottom = triple_moment_cells(x, range(10, 20), range(20), T=1400)
    assert np.array_equal(grid.values, np.vstack([top, bottom]))


def test_triple_grid_requires_enough_samples():
    with pytest.raises(ValueError):
        triple_moment_grid(np.ones(50), window=100)


def test_histogram_single_midpoint_sample():
    h = histogram(np.array([0.0]), bins=100, value_range=(-5, 5))
    assert h.counts.sum() == 1
    assert h.counts[50] == 1


def test_histogram_boundary_convention():
    # boundary samples go up, except the final edge stays in the last bin
    h = histogram(np.array([0.0, 1.0, 2.0]), bins=2, value_range=(0.0, 2.0))
    assert list(h.counts) == [1, 2]


def test_histogram_overflow_tallies():
    h = histogram(np.array([-7.0, 0.0, 9.0, 5.5]), bins=10, value_range=(-5, 5))
    assert h.underflow == 1 and h.overflow == 2
    assert h.counts.sum() + h.underflow + h.overflow == h.total == 4


def test_histogram_rejects_non_finite():
    with pytest.raises(ValueError):
        histogram(np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        histogram(np.array([np.inf]))


def test_histogram_rejects_bad_range():
    with pytest.raises(ValueError):
        histogram(np.array([1.0]), value_range=(2.0, 2.0))


def test_sliding_block_moment_matches_manual_windows():
    seq = bounds.standard_sequence("m-sequence", 3)
    v = seq.values(0, 7).astype(int)
    for M, k in ((2, 1), (3, 2), (8, 2), (4, 3)):
        windows = [sum(v[(i + j) % 7] for j in range(M)) for i in range(7)]
        manual = sum(w ** k for w in windows) / 7
        assert sliding_block_moment(seq, M, k) == pytest.approx(manual)


def test_histogram_csv_layout(tmp_path):
    h = histogram(np.array([-7.0, 0.0, 9.0]), bins=4, value_range=(-2, 2))
    path = tmp_path / "h.csv"
    analysis.histogram_to_csv(h, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "bin_lo,bin_hi,count"
    assert lines[1].startswith("-inf,") and lines[1].endswith(",1")
    assert lines[-1].endswith(",1") and ",inf," in lines[-1]
    assert len(lines) == 1 + 4 + 2


def test_grid_csv_layout(tmp_path):
    grid = triple_moment_grid(np.ones(50), window=3)
    path = tmp_path / "g.csv"
    analysis.grid_to_csv(grid, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "d1\\d2,0,1,2"
    assert lines[1].split(",")[0] == "0"
    assert len(lines) == 4


@pytest.mark.parametrize("family,n,k", [("m-sequence", 3, 2), ("m-sequence", 4, 3),
                                        ("gold", 5, 2), ("gold", 5, 3)])
def test_exact_witness_reproduces_value(family, n, k):
    # independent re-evaluation of the returned (L, D, T) witness
    seq = bounds.standard_sequence(family, n)
    r = correlation_measure_exact(seq, k)
    w = r.argmax
    total = 0
    for i in range(1, w.T + 1):
        prod = 1
        for d in w.delays:
            idx = w.L * i + d
            assert 1 <= idx <= seq.period
            prod *= seq.symbol(idx % seq.period)
        total += prod
    assert abs(total) == r.value


def _literal_measure(seq, k):
    # direct enumeration of the definition, no pruning or vectorisation
    from itertools import combinations
    n = seq.period
    vals = {m: seq.symbol(m % n) for m in range(1, n + 1)}
    best = 0
    for L in range(1, n + 1):
        for delays in combinations(range(n), k):
            total = 0
            i = 1
            while L * i + delays[-1] <= n:
                prod = 1
                for d in delays:
                    prod *= vals[L * i + d]
                total += prod
                best = max(best, abs(total))
                i += 1
    return best


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_exact_search_matches_literal_enumeration(seed, k):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(6, 13))
    seq = from_values(rng.choice([-1, 1], size=n))
    assert correlation_measure_exact(seq, k).value == _literal_measure(seq, k)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_exact_search_matches_literal_on_msequence(k):
    seq = bounds.standard_sequence("m-sequence", 3)
    assert correlation_measure_exact(seq, k).value == _literal_measure(seq, k)
