import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from exptwist.arith import FactoredModulus
from exptwist.characters import character, primitive_characters
from exptwist.charsums import (
    CharSumInstance,
    CorrelationInstance,
    b_sum,
    c1_bruteforce,
    c1_factored,
    c2_bruteforce,
    c2_factored,
    c_zero_bound,
    correlation_C,
    correlation_C1,
    correlation_C1_trace,
    correlation_C2,
    correlation_C2_count,
    correlation_C2_star,
    correlation_C2_star_count,
    correlation_D,
    correlation_D_predicted_abs,
    correlation_scan,
    d_sum,
)
from exptwist.errors import InvariantViolation


def inst(M1, M2, q, r, n1, n2, m, j1=1, j2=1, s_n=1, s_m=1):
    return CharSumInstance(n1, n2, m, q, r, FactoredModulus(M1, M2), character(M1, j1), character(M2, j2), s_n, s_m)


def close(a, b, tol=1e-8):
    return abs(a - b) <= tol * (1 + abs(a))


def same_modulus(a: float, b: float) -> bool:
    """Relative 1e-8 where either side exceeds 1e-6; otherwise both must vanish."""
    big = max(a, b)
    return big < 1e-6 or abs(a - b) <= 1e-8 * big


TINY = [
    (5, 3, 2, 1, 1, 1, 1),
    (3, 5, 2, 1, 1, 1, 1),
    (7, 5, 4, 2, 2, 3, 2),
    (5, 7, 4, 1, 4, 2, 3),
    (5, 3, 1, 2, 2, 5, 1),
    (3, 5, 1, 1, 1, 3, 4),
]


@pytest.mark.parametrize("case", TINY)
@pytest.mark.parametrize("signs", list(itertools.product((1, -1), repeat=2)))
def test_brute_force_tables_match_loop_definition(case, signs):
    M1, M2, q, r, n1, n2, m = case
    s_n, s_m = signs
    i = inst(M1, M2, q, r, n1, n2, m, s_n=s_n, s_m=s_m)
    chi1 = oracles.character_values(M1, 1)
    chi2 = oracles.character_values(M2, 1)
    for which, brute in ((1, c1_bruteforce), (2, c2_bruteforce)):
        ref = oracles.c_sum(which, n1, s_n * n2, s_m * m, q, r, M1, M2, chi1, chi2)
        assert abs(brute(i) - ref) <= 1e-9 * (1 + abs(ref))


def test_spec_grid_examples():
    assert close(c1_bruteforce(inst(5, 3, 2, 1, 1, 1, 1)), c1_factored(inst(5, 3, 2, 1, 1, 1, 1)))
    a = inst(7, 5, 4, 2, 2, 3, 2)
    assert close(c1_bruteforce(a), c1_factored(a))
    flipped = inst(7, 5, 4, 2, 2, 3, 2, s_n=-1, s_m=-1)
    assert close(c1_bruteforce(flipped), c1_factored(flipped))
    b = inst(3, 5, 2, 1, 1, 1, 1)
    assert close(c2_bruteforce(b), c2_factored(b))
    c = inst(5, 7, 4, 1, 4, 2, 3)
    assert close(c2_bruteforce(c), c2_factored(c))


def test_maximal_n1():
    # n1 = qr: the Kloosterman modulus is M1 itself
    i = inst(5, 3, 2, 2, 4, 1, 1)
    assert i.kloosterman_modulus == 5
    assert close(c1_bruteforce(i), c1_factored(i))


def test_c2_vanishes_when_M1_divides_n2():
    for n2 in (5, 10):
        i = inst(5, 3, 2, 1, 1, n2, 1)
        assert abs(c2_bruteforce(i)) < 1e-9
        assert c2_factored(i) == 0


def test_c2_without_the_n2_character_disagrees():
    i = inst(5, 3, 2, 1, 1, 2, 1)
    assert not close(c2_bruteforce(i), c2_factored(i, n2_twist=False))


prime_pairs = st.sampled_from([(3, 5), (5, 3), (5, 7), (7, 5), (11, 3), (3, 11), (7, 11)])


@st.composite
def instances(draw):
    M1, M2 = draw(prime_pairs)
    M = M1 * M2
    q = draw(st.sampled_from([q for q in range(1, 9) if math.gcd(q, M) == 1]))
    r = draw(st.sampled_from([r for r in range(1, min(M1, M2)) if math.gcd(r, M) == 1]))
    n1 = draw(st.sampled_from([d for d in range(1, q * r + 1) if (q * r) % d == 0 and d % M1]))
    m = draw(st.integers(1, 40).filter(lambda x: x % M2))
    n2 = draw(st.integers(0, 60))
    j1 = draw(st.integers(1, M1 - 2)) if M1 > 3 else 1
    j2 = draw(st.integers(1, M2 - 2)) if M2 > 3 else 1
    s = draw(st.sampled_from([1, -1])), draw(st.sampled_from([1, -1]))
    return inst(M1, M2, q, r, n1, n2, m, j1, j2, *s)


@given(instances())
def test_factorizations_hold(i):
    for brute, fact in ((c1_bruteforce, c1_factored), (c2_bruteforce, c2_factored)):
        b, f = brute(i), fact(i)
        assert abs(b - f) <= 1e-8 * (1 + abs(b))


def test_invariant_violations():
    with pytest.raises(InvariantViolation, match="gcd\\(m, M2\\)"):
        inst(5, 3, 2, 1, 1, 1, 3)
    with pytest.raises(InvariantViolation, match="gcd\\(q, M\\)"):
        inst(5, 3, 3, 1, 1, 1, 1)
    with pytest.raises(InvariantViolation, match="min"):
        inst(5, 3, 1, 4, 1, 1, 1)
    with pytest.raises(InvariantViolation, match="divide"):
        inst(5, 3, 2, 1, 4, 1, 1)


def test_b_sum_against_loop():
    M = FactoredModulus(5, 3)
    assert abs(b_sum(1, 7, 1, 1, 1, M) - 1) < 1e-14
    for n1, n2, m, q, r in [(1, 1, 1, 2, 1), (1, 3, 2, 4, 2), (2, 5, 1, 4, 1), (1, 2, 7, 8, 1)]:
        Qr = q * r // n1
        ref = 0j
        for d in [d for d in range(1, q + 1) if q % d == 0]:
            mu = oracles.mobius(q // d)
            for u in oracles.units(Qr):
                if (m - 9 * n1 * u) % d == 0:
                    ref += d * mu * oracles.e(n2 * oracles.inv(5 * u, Qr) / Qr)
        assert abs(b_sum(n1, n2, m, q, r, M) - ref) < 1e-10


def test_d_sum_against_loop_and_trivial_bound():
    for M1, M2 in ((3, 5), (7, 3)):
        M = FactoredModulus(M1, M2)
        chi = character(M1, 1)
        ref_chi = oracles.character_values(M1, 1)
        for n1, n2, m, q, r in [(1, 1, 1, 2, 1), (2, 4, 2, 4, 1), (1, 2, 1, 1, 2)]:
            Qr = q * r // n1
            alpha = m * oracles.inv(q * M2, M1)
            ref = sum(oracles.l_sum(alpha, M2, a, M1, ref_chi)
                      * oracles.kl2(-r * n2 * oracles.inv(a * Qr * Qr, M1), M1) for a in range(1, M1))
            got = d_sum(n1, n2, m, q, r, M, chi)
            assert abs(got - ref) < 1e-10
            assert abs(got) <= (M1 - 1) * 2 * math.sqrt(M1)


# --- correlation sums ---------------------------------------------------------

def corr(M1, M2, q1, q2, q2p, m, mp, n1=1, r=1, n2t=0, j1=1, j2=1, s_n=1, s_m=1):
    return CorrelationInstance(FactoredModulus(M1, M2), character(M1, j1), character(M2, j2),
                               n1, r, q1, q2, q2p, m, mp, n2t, s_n, s_m)


@pytest.mark.parametrize("ci", [
    corr(5, 3, 1, 2, 2, 1, 1),
    corr(5, 3, 1, 2, 2, 1, 1, n2t=1),
    corr(5, 7, 1, 1, 3, 1, 1),
    corr(7, 5, 2, 3, 1, 2, 1, n1=2, r=2),
])
def test_crt_factorization_examples(ci):
    M1, M2 = ci.M.M1, ci.M.M2
    C = correlation_C(ci)
    rhs = M1 * M1 * M2 * abs(correlation_C1(ci)) * abs(correlation_C2(ci))
    assert same_modulus(abs(C), rhs)


def test_period_of_correlation():
    ci = corr(5, 3, 1, 2, 2, 1, 2)
    assert ci.period == 20
    for k in range(3):
        assert abs(correlation_C(ci.with_n2t(k)) - correlation_C(ci.with_n2t(k + 20))) < 1e-12


@st.composite
def correlations(draw):
    M1, M2 = draw(st.sampled_from([(3, 5), (5, 3), (5, 7), (7, 5), (11, 3)]))
    r = draw(st.sampled_from([r for r in (1, 2) if r < min(M1, M2)]))
    q1 = draw(st.sampled_from([1, 2, 4] if r == 2 else [1]))
    n1 = draw(st.sampled_from([d for d in range(1, q1 * r + 1) if (q1 * r) % d == 0]))
    n1r = n1 * r
    q2s = [q for q in range(1, 12) if math.gcd(q, n1r * M1 * M2) == 1]
    q2, q2p = draw(st.sampled_from(q2s)), draw(st.sampled_from(q2s))
    ms = [m for m in range(1, 30) if m % M2]
    m, mp = draw(st.sampled_from(ms)), draw(st.sampled_from(ms))
    s = draw(st.sampled_from([1, -1])), draw(st.sampled_from([1, -1]))
    ci = corr(M1, M2, q1, q2, q2p, m, mp, n1, r, 0, 1, 1, *s)
    return ci.with_n2t(draw(st.integers(0, ci.period - 1)))


@given(correlations())
def test_correlation_routes(ci):
    assert abs(correlation_C2(ci) - correlation_C2_count(ci)) < 1e-10
    assert abs(correlation_C2_star(ci) - correlation_C2_star_count(ci)) < 1e-10
    assert abs(correlation_C1(ci) - correlation_C1_trace(ci)) < 1e-10
    D, pred = abs(correlation_D(ci)), correlation_D_predicted_abs(ci)
    assert same_modulus(D, pred)


@given(correlations())
def test_scan_matches_scalar_routes(ci):
    d = correlation_scan(ci)
    k = ci.n2t
    assert abs(d["C"][k] - correlation_C(ci)) < 1e-10
    assert abs(d["C1"][k] - correlation_C1(ci)) < 1e-10
    assert abs(d["C2"][k] - correlation_C2(ci)) < 1e-10
    assert abs(d["C2_star_count"][k] - correlation_C2_star_count(ci)) < 1e-10
    assert abs(d["D"][k] - correlation_D(ci)) < 1e-10


def test_degenerate_c1_at_zero_frequency_has_size_M1():
    # m q2' = m' q2 and q2 = q2' mod M1: the M1-part correlation does not cancel
    for M1, M2 in ((5, 3), (7, 3), (11, 3), (13, 7)):
        ci = corr(M1, M2, 1, 2, 2, 1, 1)
        assert ci.is_degenerate()
        size = abs(correlation_C1(ci))
        assert M1 / 3 <= size <= 3 * M1


def test_zero_frequency_structure():
    exceptions, over = 0, 0
    for q2, q2p, m, mp in itertools.product((1, 2, 4), (1, 2, 4), (1, 2), (1, 2)):
        ci = corr(5, 3, 1, q2, q2p, m, mp)
        c0 = abs(correlation_C2(ci))
        if q2 != q2p:
            exceptions += c0 > 1e-9
        else:
            over += c0 > c_zero_bound(ci) + 1e-9
    assert exceptions == 0 and over == 0


def test_correlation_invariants():
    with pytest.raises(InvariantViolation):
        corr(5, 3, 3, 1, 1, 1, 1)  # q1 has a prime outside n1 r
    with pytest.raises(InvariantViolation):
        corr(5, 3, 2, 2, 1, 1, 1, n1=2, r=2)  # gcd(q2, n1 r) > 1
