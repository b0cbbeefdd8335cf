"""Shift map and orbit decomposition."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mingsim.bitlattice import (
    DENSE_MAX_SITES,
    BitConfig,
    OrbitDecomposition,
    decompose_orbits,
    is_prime,
    shift,
    shift_index,
)
from mingsim.errors import DenseBoundError, NonPrimeOrderError

PRIMES_DENSE = [2, 3, 5, 7, 11, 13]


def test_digit_convention():
    # site 0 is the least significant bit and prints first
    c = BitConfig(5, 3)
    assert c.digits == (1, 1, 0, 0, 0)
    assert c.bitstring() == "11000"
    assert BitConfig.from_bitstring("11000") == c


def test_shift_example_n5():
    # 11000 -> 01100, i.e. index 3 -> 6
    c = shift(BitConfig(5, 3))
    assert c.index == 6
    assert c.bitstring() == "01100"


def test_shift_is_doubling_mod():
    n = 7
    modulus = 2**n - 1
    for i in range(1, modulus):
        assert shift_index(i, n) == (2 * i) % modulus


def test_fixed_points_stay():
    for n in PRIMES_DENSE:
        assert shift_index(0, n) == 0
        assert shift_index(2**n - 1, n) == 2**n - 1


@given(st.sampled_from(PRIMES_DENSE), st.integers(min_value=0, max_value=2**13 - 1))
@settings(max_examples=200)
def test_shift_period_divides_n(n, raw):
    idx = raw % 2**n
    assert shift_index(idx, n, steps=n) == idx


@given(st.sampled_from(PRIMES_DENSE), st.integers(min_value=0, max_value=2**13 - 1), st.integers(-20, 20))
@settings(max_examples=200)
def test_shift_inverse(n, raw, t):
    idx = raw % 2**n
    assert shift_index(shift_index(idx, n, t), n, -t) == idx


def test_shift_matches_digit_rotation():
    rng = np.random.default_rng(7)
    for n in PRIMES_DENSE:
        for idx in rng.integers(0, 2**n, size=20):
            c = BitConfig(n, int(idx))
            d = c.digits
            rotated = (d[-1],) + d[:-1]
            assert shift(c).digits == rotated


def test_shift_index_large_n():
    # index arithmetic is unbounded; only tables are
    n = 1009
    i = 3
    assert shift_index(i, n) == 6
    assert shift_index(i, n, steps=n) == i


def test_decompose_n3():
    dec = decompose_orbits(3)
    assert dec.q == 2
    assert dec.representatives == (1, 3)
    assert dec.orbit_members(0) == [1, 2, 4]
    assert dec.orbit_members(1) == [3, 6, 5]
    assert dec.fixed_points == (0, 7)
    assert dec.orbit_of(0) == (-1, 0)
    assert dec.orbit_of(7) == (-1, 0)
    assert dec.orbit_of(5) == (1, 2)


def test_decompose_rejects_nonprime():
    with pytest.raises(NonPrimeOrderError):
        decompose_orbits(4)


def test_decompose_rejects_beyond_dense_bound():
    with pytest.raises(DenseBoundError):
        decompose_orbits(17)


@pytest.mark.parametrize("n", PRIMES_DENSE)
def test_decomposition_partitions_everything(n):
    dec = decompose_orbits(n)
    size = 2**n
    assert dec.q == (size - 2) // n
    counts = np.zeros(size, dtype=int)
    for oid in range(dec.q):
        members = dec.orbit_members(oid)
        assert len(set(members)) == n
        counts[members] += 1
    counts[list(dec.fixed_points)] += 1
    assert (counts == 1).all()


@pytest.mark.parametrize("n", PRIMES_DENSE)
def test_offsets_consistent_with_representative(n):
    dec = decompose_orbits(n)
    modulus = 2**n - 1
    for idx in range(1, modulus):
        oid, m = dec.orbit_of(idx)
        rep = dec.representatives[oid]
        assert idx == (rep * pow(2, m, modulus)) % modulus
        assert rep == min(dec.orbit_members(oid))


def test_is_prime_small():
    primes = {2, 3, 5, 7, 11, 13, 101, 1009}
    for n in range(2, 30):
        assert is_prime(n) == (n in {2, 3, 5, 7, 11, 13, 17, 19, 23, 29})
    for n in primes:
        assert is_prime(n)
    assert not is_prime(1) and not is_prime(0)


def test_tables_are_readonly():
    dec = decompose_orbits(5)
    assert isinstance(dec, OrbitDecomposition)
    with pytest.raises(ValueError):
        dec.orbit_id[0] = 5
    assert DENSE_MAX_SITES == 13
