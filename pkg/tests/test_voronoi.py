import math

import mpmath
import numpy as np
import pytest

import oracles
from exptwist.bessel import SpectralParams
from exptwist.errors import NonInvertible, TruncationBudgetExceeded
from exptwist.voronoi import (
    gl2_voronoi_check,
    normalized_coefficients,
    psi_asymptotic,
    psi_plus_values,
    psi_transform,
    tau_coefficients,
    voronoi_phi,
)
from exptwist.weights import plateau

DELTA = SpectralParams.holomorphic(12)


def test_tau_small_values():
    assert tau_coefficients(3) == [1, -24, 252]


def test_tau_matches_polynomial_product():
    assert tau_coefficients(400) == oracles.tau_ramanujan(400)


def test_tau_multiplicative_and_hecke():
    t = [0] + tau_coefficients(2000)
    for m, n in [(2, 3), (5, 7), (11, 13), (3, 16), (25, 27)]:
        assert t[m * n] == t[m] * t[n]
    for p in (2, 3, 5, 7):
        assert t[p * p] == t[p] ** 2 - p ** 11
    # Deligne: |tau(p)| <= 2 p^{11/2}
    for p in [p for p in range(2, 2000) if oracles.is_prime(p)]:
        assert abs(t[p]) <= 2 * p ** 5.5


def test_tau_disk_cache_roundtrip(tmp_path, monkeypatch):
    monkeypatch.setenv("EXPTWIST_CACHE", str(tmp_path))
    fresh = tau_coefficients(777)
    cached = (tmp_path / "tau.txt").read_text().split()
    assert [int(v) for v in cached] == fresh


def test_tau_budget_limits():
    with pytest.raises(ValueError):
        tau_coefficients(0)
    with pytest.raises(ValueError):
        tau_coefficients(100_001)


def test_normalized_coefficients():
    lam = normalized_coefficients(10)
    tau = oracles.tau_ramanujan(10)
    assert np.allclose(lam, [t / m ** 5.5 for m, t in enumerate(tau, 1)], rtol=1e-15)


# --- Psi ---------------------------------------------------------------------------

def _psi_oracle(x, phi):
    f = lambda y: float(phi(np.array([float(y)]))[0]) * mpmath.besselj(11, 4 * mpmath.pi * mpmath.sqrt(x * y))
    lo, hi = phi.support
    pts = mpmath.linspace(lo, hi, 2 + int(4 * math.sqrt(x)))
    return complex(2 * mpmath.pi * mpmath.quad(f, pts))


@pytest.mark.parametrize("x", [0.01, 0.5, 3.0, 17.0, 60.0])
def test_psi_plus_matches_mpmath(x):
    phi = voronoi_phi()
    got = complex(psi_transform(1, x, phi, DELTA))
    want = _psi_oracle(x, phi)
    assert abs(got - want) <= 1e-10 * max(abs(want), 1e-6)


def test_psi_plus_values_agree_with_adaptive():
    phi = voronoi_phi()
    xs = np.array([0.3, 2.0, 9.5, 40.0, 150.0])
    batch = psi_plus_values(xs, phi)
    single = np.array([complex(psi_transform(1, x, phi, DELTA)) for x in xs])
    assert np.max(np.abs(batch - single)) <= 1e-10


def test_psi_at_zero_vanishes():
    assert complex(psi_transform(1, 0.0, voronoi_phi(), DELTA)) == 0


def test_psi_holomorphic_minus_is_zero():
    assert complex(psi_transform(-1, 5.0, voronoi_phi(), DELTA)) == 0


def test_psi_linear_in_weight():
    phi = plateau(1.0, 2.0, 0.3)
    one = complex(psi_transform(1, 7.0, phi, DELTA))
    two = complex(psi_transform(1, 7.0, phi.scaled(2.0), DELTA))
    assert abs(two - 2 * one) <= 1e-12 * abs(one)


def test_psi_rejects_negative_x():
    with pytest.raises(ValueError):
        psi_transform(1, -1.0, voronoi_phi(), DELTA)


def test_psi_asymptotic_at_100():
    phi = plateau(1.0, 2.0, 0.25)
    exact = complex(psi_transform(1, 100.0, phi, DELTA))
    errors = [abs(psi_asymptotic(100.0, phi, DELTA, j) - exact) / abs(exact) for j in (0, 1, 2, 4)]
    assert errors == sorted(errors, reverse=True)
    assert errors[-1] <= 0.05


@pytest.mark.parametrize("x", [25.0, 50.0, 100.0, 400.0])
def test_maass_psi_minus_decays(x):
    sp = SpectralParams.maass(1.0)
    assert abs(psi_transform(-1, x, voronoi_phi(), sp)) <= 1e-6


def test_maass_psi_minus_is_not_small_near_origin():
    # the decay scan is only meaningful if the transform is visible at small x
    sp = SpectralParams.maass(1.0)
    assert abs(psi_transform(-1, 0.05, voronoi_phi(), sp)) >= 1e-2


# --- the Voronoi formula -------------------------------------------------------------

@pytest.mark.parametrize("a, c, N", [(1, 1, 30.0), (2, 3, 40.0), (3, 5, 20.0), (4, 5, 50.0)])
def test_voronoi_examples(a, c, N):
    res = gl2_voronoi_check(a, c, N=N)
    assert res.passed, res.as_dict()
    assert res.diff <= 1e-5 * (1 + abs(res.lhs))
    assert res.truncation_estimate <= 1e-5


def test_voronoi_lhs_is_the_direct_sum():
    phi = voronoi_phi()
    res = gl2_voronoi_check(2, 3, phi, N=40.0)
    tau = oracles.tau_ramanujan(80)
    direct = sum(t / m ** 5.5 * oracles.e(2 * m / 3) * float(phi(np.array([m / 40.0]))[0])
                 for m, t in enumerate(tau, 1))
    assert abs(res.lhs - direct) <= 1e-13


@pytest.mark.parametrize("a, c", [(1, 4), (2, 5)])
def test_voronoi_conjugation(a, c):
    plus, minus = gl2_voronoi_check(a, c, N=30.0), gl2_voronoi_check(-a % c, c, N=30.0)
    assert abs(minus.lhs - plus.lhs.conjugate()) <= 1e-10
    assert abs(minus.rhs - plus.rhs.conjugate()) <= 1e-10


def test_voronoi_rejects_common_factor():
    with pytest.raises(NonInvertible):
        gl2_voronoi_check(2, 4)


def test_voronoi_budget():
    with pytest.raises(TruncationBudgetExceeded):
        gl2_voronoi_check(1, 5, N=50.0, coeff_budget=60)
