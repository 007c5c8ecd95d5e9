import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from exptwist.arith import (
    ComplexAccumulator,
    FactoredModulus,
    additive_char,
    crt_pair,
    csum,
    divisors,
    euler_phi,
    is_prime,
    mod_inverse,
    moebius,
    moebius_divisor_scan,
)
from exptwist.errors import NonCoprimeModuli, NonInvertible, NotPrime


def test_mod_inverse_examples():
    assert mod_inverse(3, 7) == 5
    assert mod_inverse(1, 11) == 1
    with pytest.raises(NonInvertible):
        mod_inverse(4, 6)


@given(st.integers(2, 500), st.integers(-1000, 1000))
def test_mod_inverse_is_an_involution(q, a):
    if math.gcd(a, q) != 1:
        with pytest.raises(NonInvertible):
            mod_inverse(a, q)
        return
    x = mod_inverse(a, q)
    assert 0 <= x < q and (a * x) % q == 1
    assert mod_inverse(x, q) == a % q


def test_moebius_divisor_scan_examples():
    assert moebius_divisor_scan(6) == [(1, 1), (2, -1), (3, -1), (6, 1)]
    assert moebius_divisor_scan(1) == [(1, 1)]
    assert (3, 0) in moebius_divisor_scan(12)


@given(st.integers(1, 3000))
def test_moebius_sums_to_indicator_of_one(q):
    assert sum(mu for _, mu in moebius_divisor_scan(q)) == (q == 1)
    assert moebius(q) == oracles.mobius(q)
    assert divisors(q) == [d for d in range(1, q + 1) if q % d == 0]


@given(st.integers(1, 2000))
def test_primality_and_phi_against_loops(n):
    assert is_prime(n) == oracles.is_prime(n)
    assert euler_phi(n) == len([a for a in range(1, n + 1) if math.gcd(a, n) == 1])


def test_additive_char_examples():
    assert additive_char(0, 5) == 1
    assert abs(additive_char(3, 6) - (-1)) < 1e-15
    assert abs(additive_char(1, 4) - 1j) < 1e-15


@given(st.integers(1, 200), st.integers(-10**6, 10**6))
def test_additive_char_periodic(q, a):
    assert abs(additive_char(a + q, q) - additive_char(a, q)) <= 1e-14
    assert abs(additive_char(a, q) - oracles.e((a % q) / q)) <= 1e-12


@pytest.mark.parametrize("q", range(1, 51))
def test_orthogonality_detects_divisibility(q):
    for n in range(-200, 201):
        s = csum(additive_char(n * b, q) for b in range(q)) / q
        assert abs(s - (n % q == 0)) <= 1e-12


def test_compensated_sum_of_unit_terms():
    N = 100_000
    acc = ComplexAccumulator()
    terms = [oracles.e(k / 7) for k in range(N)]
    for z in terms:
        acc.add(z)
    exact = complex(math.fsum(z.real for z in terms), math.fsum(z.imag for z in terms))
    assert abs(acc.value - exact) <= 1e-12 * N
    assert abs(csum(terms) - exact) <= 1e-12 * N


def test_factored_modulus():
    M = FactoredModulus(3, 5)
    assert M.M == 15
    assert M.split(M.crt(2, 4)) == (2, 4)
    with pytest.raises(NotPrime):
        FactoredModulus(4, 5)
    with pytest.raises(NonCoprimeModuli):
        FactoredModulus(5, 5)


@given(st.integers(0, 100), st.integers(0, 100))
def test_crt_pair(r1, r2):
    x = crt_pair(r1, 7, r2, 9)
    assert x % 7 == r1 % 7 and x % 9 == r2 % 9 and 0 <= x < 63
