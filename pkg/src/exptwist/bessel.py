"""Bessel kernels of the GL(2) Voronoi formula.

J_nu(x) for real or complex order: the ascending series for small x and the
Hankel expansion beyond.  The series loses about e^x/sqrt(x) ulps to
cancellation, so the switch sits at x = 13 for real order and moves out to at
most 20 as |Im nu| grows and the expansion needs more room.  K_{i theta}(x) for real theta from
K_{i theta}(x) = int_0^inf exp(-x cosh t) cos(theta t) dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rgamma

from .quadrature import gauss_panels

SERIES_LIMIT = 20.0


@dataclass(frozen=True)
class SpectralParams:
    """Spectral data of the GL(2) form g (and the GL(3) triple where needed)."""

    kind: str  # "holomorphic" | "maass" | "gl3"
    k: int = 12
    mu: float = 0.0
    eps: int = 1
    mus: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if self.kind == "holomorphic" and (self.k % 2 or self.k < 12):
            raise ValueError("holomorphic weight must be even and at least 12")
        if self.kind == "maass" and self.eps not in (1, -1):
            raise ValueError("reflection eigenvalue must be +1 or -1")
        if self.kind == "gl3" and abs(sum(self.mus)) > 1e-12:
            raise ValueError("GL(3) Langlands parameters must sum to zero")
        if self.kind not in ("holomorphic", "maass", "gl3"):
            raise ValueError(f"unknown spectral kind {self.kind!r}")

    @classmethod
    def holomorphic(cls, k: int = 12) -> "SpectralParams":
        return cls("holomorphic", k=k)

    @classmethod
    def maass(cls, mu: float, eps: int = 1) -> "SpectralParams":
        return cls("maass", mu=mu, eps=eps)

    @classmethod
    def gl3(cls, mus=(0.0, 0.0, 0.0)) -> "SpectralParams":
        return cls("gl3", mus=tuple(complex(m) if isinstance(m, complex) else float(m) for m in mus))

    def describe(self) -> dict:
        if self.kind == "holomorphic":
            return {"kind": "holomorphic", "k": self.k}
        if self.kind == "maass":
            return {"kind": "maass", "mu": self.mu, "eps": self.eps}
        return {"kind": "gl3", "mus": [str(m) for m in self.mus]}


def _series(nu: complex, x: np.ndarray) -> np.ndarray:
    half = x / 2.0
    term = np.asarray(np.power(half.astype(complex), nu) * rgamma(nu + 1), dtype=complex)
    total = term.copy()
    z = -half * half
    for k in range(1, 200):
        term = term * z / (k * (nu + k))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def hankel_coefficients(nu: complex, terms: int) -> list[complex]:
    """a_k(nu) = prod_{j=1}^k (4 nu^2 - (2j - 1)^2) / (k! 8^k)."""
    mu = 4 * nu * nu
    out = [1.0 + 0j]
    for k in range(1, terms + 1):
        out.append(out[-1] * (mu - (2 * k - 1) ** 2) / (k * 8))
    return out


def _hankel(nu: complex, x: np.ndarray, max_terms: int = 80) -> np.ndarray:
    """Hankel expansion, truncated per x at its first increasing term once terms are below 1e-3
    (the series is asymptotic, not convergent)."""
    real = nu.imag == 0
    nu = nu.real if real else nu
    dtype = float if real else complex
    mu = 4 * nu * nu
    P = np.ones(x.shape, dtype=dtype)
    Qs = np.zeros(x.shape, dtype=dtype)
    term = np.ones(x.shape, dtype=dtype)
    prev = np.full(x.shape, np.inf)
    live = np.ones(x.shape, dtype=bool)
    for k in range(1, max_terms + 1):
        term = term * ((mu - (2 * k - 1) ** 2) / (8 * k)) / x
        mag = np.abs(term)
        live &= ~((mag > prev) & (prev < 1e-3))
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            P += np.where(live, sign * term, 0)
        else:
            Qs += np.where(live, sign * term, 0)
        prev = mag
        live &= mag > 1e-17
        if not live.any():
            break
    w = x - nu * math.pi / 2 - math.pi / 4
    return np.sqrt(2 / (math.pi * x)) * (P * np.cos(w) - Qs * np.sin(w))


def _large_x(nu: complex, x: np.ndarray) -> np.ndarray:
    if nu.imag != 0 or nu.real <= 1:
        return _hankel(nu, x)
    # low orders from the expansion, then the forward recurrence, stable while the order stays below x
    base = nu.real - math.floor(nu.real)
    steps = int(round(nu.real - base))
    out = np.empty(x.shape, dtype=complex)
    upward = x > nu.real
    if upward.any():
        xs = x[upward]
        prev, cur = _hankel(complex(base), xs), _hankel(complex(base + 1), xs)
        for j in range(1, steps):
            prev, cur = cur, 2 * (base + j) / xs * cur - prev
        out[upward] = cur if steps else prev
    if (~upward).any():
        out[~upward] = _series(nu, x[~upward])
    return out


def bessel_j(nu, x) -> np.ndarray:
    """J_nu(x) for x > 0 (x = 0 allowed when Re nu >= 0)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    nu = complex(nu)
    out = np.empty(x.shape, dtype=complex)
    small = x <= min(SERIES_LIMIT, 13.0 + 1.75 * abs(nu.imag))
    if small.any():
        out[small] = _series(nu, x[small])
    if (~small).any():
        out[~small] = _large_x(nu, x[~small])
    return out


def hankel_parts(nu: complex, x, terms: int):
    """Truncated expansions of H1 and H2, so that J = (H1 + H2)/2 up to O(x^{-terms-3/2})."""
    x = np.asarray(x, dtype=float)
    a = hankel_coefficients(nu, terms)
    w = x - nu * math.pi / 2 - math.pi / 4
    amp = np.sqrt(2 / (math.pi * x))
    s1 = sum((1j) ** k * a[k] / x ** k for k in range(terms + 1))
    s2 = sum((-1j) ** k * a[k] / x ** k for k in range(terms + 1))
    return amp * np.exp(1j * w) * s1, amp * np.exp(-1j * w) * s2


def bessel_k_imag(theta: float, x) -> np.ndarray:
    """K_{i theta}(x) for real theta and x > 0 (real valued)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.shape)
    for i, xi in enumerate(x):
        T = math.acosh(1.0 + 45.0 / xi)
        cycles = abs(theta) * T / (2 * math.pi)
        t, w = gauss_panels(0.0, T, max(8, int(4 * cycles) + int(4 * T)), 24)
        out[i] = np.sum(np.exp(-xi * (np.cosh(t) - 1.0)) * np.cos(theta * t) * w) * math.exp(-xi)
    return out


def bessel_kernel(sign: int, x, sp: SpectralParams) -> np.ndarray:
    """The Voronoi kernel J_g^{sign}(x)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if sp.kind == "holomorphic":
        if sign < 0:
            return np.zeros(x.shape, dtype=complex)
        return 2 * math.pi * (1j ** sp.k) * bessel_j(sp.k - 1, x)
    if sp.kind == "maass":
        if sign > 0:
            nu = 2j * sp.mu
            return -math.pi / np.sin(math.pi * 1j * sp.mu) * (bessel_j(nu, x) - bessel_j(-nu, x))
        return (4 * sp.eps * math.cosh(math.pi * sp.mu) * bessel_k_imag(2 * sp.mu, x)).astype(complex)
    raise ValueError("the Voronoi kernel needs a GL(2) spectral type")


def kernel_asymptotic(x, sp: SpectralParams, terms: int) -> np.ndarray:
    """J_g^+(x) from `terms` corrections of the Hankel expansion of each Bessel component."""
    x = np.asarray(x, dtype=float)
    if sp.kind == "holomorphic":
        h1, h2 = hankel_parts(sp.k - 1, x, terms)
        return 2 * math.pi * (1j ** sp.k) * (h1 + h2) / 2
    if sp.kind == "maass":
        nu = 2j * sp.mu
        p1, p2 = hankel_parts(nu, x, terms)
        m1, m2 = hankel_parts(-nu, x, terms)
        return -math.pi / np.sin(math.pi * 1j * sp.mu) * ((p1 + p2) - (m1 + m2)) / 2
    raise ValueError("the Voronoi kernel needs a GL(2) spectral type")
