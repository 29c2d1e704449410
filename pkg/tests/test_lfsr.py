import numpy as np
import pytest

from pngauss import galois, lfsr
from pngauss.galois import parse_polynomial
from pngauss.lfsr import DegenerateSeedError, LfsrState

P3 = parse_polynomial("x^3 + x + 1")
P4 = parse_polynomial("x^4 + x + 1")


def state(bits, poly=P3):
    packed = 0
    for i, b in enumerate(bits):
        packed |= b << i
    return LfsrState(packed, poly)


def test_step_examples():
    assert lfsr.step(state((1, 0, 0))).register_bits() == (0, 0, 1)
    assert lfsr.step(state((1, 1, 1))).register_bits() == (1, 1, 0)
    assert lfsr.step(state((0, 0, 0))).register_bits() == (0, 0, 0)


def test_output_bit_is_first_register():
    assert lfsr.output_bit(state((1, 0, 0))) == 1
    assert lfsr.output_bit(state((0, 1, 1))) == 0


def test_output_stream_matches_iterated_step():
    s = state((1, 1, 0))
    for j, bit in zip(range(20), lfsr.iter_bits(s)):
        assert bit == lfsr.output_bit(lfsr.advance(s, j))


def test_run_seven_bits():
    # transition map simulated by hand for seed (1,0,0)
    assert list(lfsr.run(state((1, 0, 0)), 7)) == [1, 0, 0, 1, 0, 1, 1]


def test_run_repeats_with_period():
    out = list(lfsr.run(state((1, 0, 0)), 14))
    assert out == out[:7] * 2


def test_run_shifts_out_initial_registers():
    assert list(lfsr.run(state((0, 0, 1)), 3)) == [0, 0, 1]


def test_run_rejects_zero_seed():
    with pytest.raises(DegenerateSeedError):
        lfsr.run(state((0, 0, 0)), 5)
    with pytest.raises(DegenerateSeedError):
        lfsr.measure_period(state((0, 0, 0)))


def test_state_must_fit_registers():
    with pytest.raises(ValueError):
        LfsrState(0b1000, P3)


def test_measure_period_primitive():
    assert lfsr.measure_period(state((1, 0, 0))) == 7
    assert lfsr.measure_period(LfsrState(1, P4)) == 15


def test_measure_period_non_primitive():
    # exhaustive walk: (1,0,0) -> (0,0,1) -> (0,1,1) -> (1,1,0) -> (1,0,0)
    p = parse_polynomial("x^3 + x^2 + x + 1")
    assert lfsr.measure_period(LfsrState(1, p)) == 4


def test_measure_period_cap_marker():
    assert lfsr.measure_period(LfsrState(1, P4), cap=3) is None


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11, 13, 16])
def test_period_is_full_for_primitive(n):
    p = galois.find_primitive_polynomial(n)
    for seed in (1, (1 << n) - 1, 0b101 % (1 << n) or 1):
        assert lfsr.measure_period(LfsrState(seed, p), cap=1 << 17) == (1 << n) - 1


@pytest.mark.parametrize("n", [4, 10, 16])
def test_trajectory_visits_every_nonzero_state_once(n):
    p = galois.find_primitive_polynomial(n)
    s = lfsr.default_state(p)
    seen = set()
    for _ in range((1 << n) - 1):
        assert s.registers not in seen
        seen.add(s.registers)
        s = lfsr.step(s)
    assert len(seen) == (1 << n) - 1
    assert s.registers == lfsr.default_state(p).registers


@pytest.mark.parametrize("a,b", [(1, 1), (3, 10), (7, 7), (13, 40)])
def test_streaming_consistency(a, b):
    s = LfsrState(0b0011, P4)  # seed (1,1,0,0)
    whole = list(lfsr.run(s, a + b))
    assert whole == list(lfsr.run(s, a)) + list(lfsr.run(lfsr.advance(s, a), b))


@pytest.mark.parametrize("n", [4, 8, 12, 16])
def test_linearity_of_seeds(n):
    p = galois.find_primitive_polynomial(n)
    rng = np.random.default_rng(n)
    for _ in range(10):
        s1 = int(rng.integers(1, 1 << n))
        s2 = int(rng.integers(1, 1 << n))
        if s1 == s2 or s1 ^ s2 == 0:
            continue
        out1 = lfsr.run(LfsrState(s1, p), 300)
        out2 = lfsr.run(LfsrState(s2, p), 300)
        out12 = lfsr.run(LfsrState(s1 ^ s2, p), 300)
        assert np.array_equal(out1 ^ out2, out12)


@pytest.mark.parametrize("poly,counts", [
    (P3, (1, 2, 3, 7, 20, 200)),
    (P4, (1, 4, 15, 33, 301)),
    (parse_polynomial("0x25"), (5, 31, 64, 500)),
    (parse_polynomial("x^5 + x^4 + x^3 + x^2 + 1"), (31, 97)),
])
def test_fast_run_equals_reference(poly, counts):
    for seed in (1, (1 << poly.degree) - 1, 0b110 % (1 << poly.degree) or 1):
        s = LfsrState(seed, poly)
        for count in counts:
            assert list(lfsr.run(s, count)) == lfsr.run_reference(s, count)


@pytest.mark.parametrize("poly", [galois.POLY_89_TRINOMIAL, galois.POLY_89_PENTANOMIAL])
def test_fast_run_equals_reference_degree89(poly):
    s = lfsr.default_state(poly)
    assert list(lfsr.run(s, 500)) == lfsr.run_reference(s, 500)


def test_degree89_trinomial_recurrence():
    bits = lfsr.run(lfsr.default_state(galois.POLY_89_TRINOMIAL), 5000)
    t = np.arange(89, 5000)
    assert np.all(bits[t] == (bits[t - 89] ^ bits[t - 51]))


def test_default_state_is_all_ones():
    assert lfsr.default_state(P4).registers == 0b1111
