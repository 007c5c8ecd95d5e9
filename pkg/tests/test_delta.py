import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

import oracles
from exptwist.arith import FactoredModulus
from exptwist.delta import (
    DeltaParams,
    default_bump,
    default_cutoff,
    default_zeta_nodes,
    delta_eval,
    dfi_weight,
    dfi_weight_for,
    congruence_detector_check,
    ledger_lhs,
    ledger_rhs,
    rearrangement_check,
    stub_dfi,
    stub_one,
    stub_rational,
    telescoped_h,
    unit_bijection_check,
)
from exptwist.errors import NonCoprimeModuli, OutOfRange

PAIRS = [(3, 5), (5, 3), (5, 7), (7, 5)]


# --- unit bijection and the congruence detector --------------------------------

def test_unit_bijection_example():
    assert sorted((a * 3 + b * 4) % 12 for a in (1, 3) for b in (1, 2)) == [1, 5, 7, 11]
    assert unit_bijection_check(4, 3)
    assert unit_bijection_check(1, 5)


def test_unit_bijection_rejects_common_factor():
    with pytest.raises(NonCoprimeModuli):
        unit_bijection_check(6, 3)


@pytest.mark.parametrize("M1", [3, 5, 7, 11, 13])
def test_unit_bijection_grid(M1):
    for q in range(1, 31):
        if math.gcd(q, M1) == 1:
            assert unit_bijection_check(q, M1), q


@pytest.mark.parametrize("n, M1, expected", [(6, 3, 1), (4, 3, 0), (0, 7, 1)])
def test_congruence_detector_examples(n, M1, expected):
    lhs, rhs = congruence_detector_check(n, M1)
    assert rhs == expected
    assert abs(lhs - expected) <= 1e-12


@given(st.integers(-500, 500), st.sampled_from([2, 3, 5, 7, 11, 13, 97]))
def test_congruence_detector_matches_loop(n, M1):
    lhs, rhs = congruence_detector_check(n, M1)
    loop = sum(oracles.e(n * b / M1) for b in range(M1)) / M1
    assert abs(lhs - loop) <= 1e-12
    assert abs(lhs - rhs) <= 1e-12


# --- the weight ------------------------------------------------------------------

def _scalar(weight):
    return lambda t: float(weight(np.array([t]))[0])


@pytest.mark.parametrize("x", [0.05, 0.1, 0.37, 1.0])
def test_telescoped_h_matches_loop(x):
    w = default_bump()
    ys = np.linspace(-0.5, 0.5, 41)
    got = telescoped_h(x, ys, w)
    want = [oracles.h_weight(x, y, _scalar(w)) for y in ys]
    assert np.allclose(got, want, atol=1e-12)


@pytest.mark.parametrize("Q", [7.0, 12.5])
@pytest.mark.parametrize("n", [0, 1, -2, 5, 9])
def test_h_expansion_detects_zero(Q, n):
    # sum_q R_q(n) h(q/Q, n/Q^2) = Q S_Q [n = 0], S_Q = sum_d w(d/Q)
    w = _scalar(default_bump())
    total = sum(oracles.ramanujan(q, n).real * oracles.h_weight(q / Q, n / Q ** 2, w)
                for q in range(1, 4 * int(Q) + 1))
    S = sum(w(d / Q) for d in range(1, int(Q) + 2))
    assert abs(total - Q * S * (n == 0)) <= 1e-9 * Q * S


def _omega_oracle(Q, q, zeta):
    w, U = _scalar(default_bump()), _scalar(default_cutoff())
    x = q / Q
    S = sum(w(d / Q) for d in range(1, int(Q) + 2))
    f = lambda y: oracles.h_weight(x, y, w) * U(y) * math.cos(2 * math.pi * y * zeta / x)
    # h is even in y; integrate on [0, 1/2] in pieces at the kinks of the j-sum
    breaks = sorted({0.0, 0.5, *[x * j / 2 for j in range(1, int(1 / x) + 2) if x * j / 2 < 0.5],
                     *[x * j for j in range(1, int(0.5 / x) + 2) if x * j < 0.5]})
    total = sum(quad(f, a, b, limit=200, epsabs=1e-13)[0] for a, b in zip(breaks, breaks[1:]))
    return 2 * total * Q / S


@pytest.mark.parametrize("q, zeta", [(1, 0.0), (1, 0.7), (3, 2.5), (7, 0.2), (10, 4.0)])
def test_omega_matches_quad(q, zeta):
    got = float(dfi_weight(q, [zeta], Q=10.0)[0])
    assert abs(got - _omega_oracle(10.0, q, zeta)) <= 1e-7


@pytest.mark.parametrize("Q", [10.0, 20.0, 40.0])
def test_numerical_normalization_matches_divisor_sum(Q):
    w = dfi_weight_for(Q)
    assert w.normalization == pytest.approx(w.divisor_normalization(), rel=1e-9)


def test_omega_near_one_for_small_arguments():
    w = dfi_weight_for(40.0)
    assert np.max(np.abs(w.omega(1, [0.0, 0.01, 0.1]) - 1)) <= 1e-3


def test_omega_vanishes_at_top_modulus():
    # h(1, y) = w(1) - sum_j w(|y|/j) is zero for |y| < 1/2
    assert np.all(dfi_weight(40, [0.0, 1.0, 5.0], Q=40.0) == 0)


def test_omega_out_of_range():
    with pytest.raises(OutOfRange):
        dfi_weight(41, [0.0], Q=40.0)
    with pytest.raises(OutOfRange):
        dfi_weight(0, [0.0], Q=40.0)
    with pytest.raises(ValueError):
        DeltaParams(1.5)


@pytest.mark.parametrize("q", [1, 5, 20, 39])
def test_omega_decays_faster_than_inverse_square(q):
    w = dfi_weight_for(40.0)
    zeta = np.array([10.0, 20.0, 40.0, 80.0])
    vals = np.abs(w.omega(q, zeta))
    scaled = vals * zeta ** 2
    assert np.all(np.diff(scaled) < 0)
    assert scaled[-1] <= 1e-6 * scaled[0]
    assert w.tail(q, 80.0) <= 1e-6


@pytest.mark.parametrize("Q", [10.0, 20.0, 40.0])
def test_omega_derivative_bound(Q):
    # |zeta d/dzeta omega| <= C log Q min(Q/q, 1/|zeta|); measured C stays near 10
    w = dfi_weight_for(Q)
    worst = 0.0
    for q in range(1, int(Q) + 1):
        spec, dz = w._spectrum(q)
        spec = spec * w.normalization
        z = (np.arange(spec.size) - spec.size // 2) * dz
        keep = (np.abs(z) < 40) & (z != 0)
        d = np.gradient(spec, dz)
        bound = math.log(Q) * np.minimum(Q / q, 1 / np.abs(z[keep]))
        worst = max(worst, float(np.max(np.abs(z[keep] * d[keep]) / bound)))
    assert worst <= 20


# --- the delta symbol ----------------------------------------------------------

def test_delta_at_zero():
    assert abs(delta_eval(0, Q=40.0) - 1) <= 1e-6


@pytest.mark.parametrize("n", [7, -3, 1, -1, 20, -20])
def test_delta_vanishes(n):
    assert abs(delta_eval(n, Q=40.0)) <= 1e-6


def test_delta_rejects_large_n():
    with pytest.raises(ValueError):
        delta_eval(401, Q=40.0)


# --- the rearrangement -----------------------------------------------------------

def _lhs_oracle(n, Q, M1, omega, nodes):
    # the b-sum is M1 [M1 | n]; what remains is the expansion at n/M1
    if n % M1:
        return 0.0
    m = n // M1
    z, wz = nodes
    total = 0j
    for q in range(1, int(math.floor(Q + 1e-9)) + 1):
        integral = sum(wk * ok * oracles.e(m * zk / (q * Q)) for zk, wk, ok in zip(z, wz, omega(q, z)))
        total += oracles.ramanujan(q, m) * integral / q
    return total / Q


@pytest.mark.parametrize("n, Q, pair, stub", [
    (0, 12.0, (3, 5), stub_one),
    (15, 12.0, (3, 5), stub_rational),
    (7, 20.0, (5, 3), stub_dfi(20.0)),
])
def test_rearrangement_examples(n, Q, pair, stub):
    lhs, rhs = rearrangement_check(n, Q, FactoredModulus(*pair), stub)
    assert abs(lhs - rhs) <= 1e-10
    assert abs(lhs - _lhs_oracle(n, Q, pair[0], stub, default_zeta_nodes())) <= 1e-10


@settings(max_examples=30)
@given(st.integers(-20, 20), st.sampled_from(PAIRS), st.sampled_from([10.0, 20.0, 31.0]),
       st.sampled_from(["one", "rational"]))
def test_rearrangement_grid(n, pair, Q, stub):
    omega = {"one": stub_one, "rational": stub_rational}[stub]
    lhs, rhs = rearrangement_check(n, Q, FactoredModulus(*pair), omega)
    assert abs(lhs - rhs) <= 1e-10
    assert abs(lhs - _lhs_oracle(n, Q, pair[0], omega, default_zeta_nodes())) <= 1e-10


def test_rearrangement_vectorised_matches_scalar():
    M = FactoredModulus(5, 7)
    ns = np.arange(-20, 21)
    lhs, rhs = rearrangement_check(ns, 31.0, M, stub_rational)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10
    for k in (0, 13, 40):
        l1, r1 = rearrangement_check(int(ns[k]), 31.0, M, stub_rational)
        assert abs(l1 - lhs[k]) <= 1e-12 and abs(r1 - rhs[k]) <= 1e-12


@pytest.mark.parametrize("pair", PAIRS)
@pytest.mark.parametrize("Q", [10.0, 20.0, 31.0])
def test_term_ledgers_agree(pair, Q):
    M = FactoredModulus(*pair)
    left, right = ledger_lhs(Q, M), ledger_rhs(Q, M)
    assert left == right
    assert left.canonical()


def test_term_ledger_detects_difference():
    left = ledger_lhs(10.0, FactoredModulus(3, 5))
    other = ledger_lhs(10.0, FactoredModulus(5, 3))
    assert left != other
