"""Ramanujan tau, the transforms Psi^{+-} and the GL(2) Voronoi formula for Delta.

    sum_m lambda(m) e(am/c) phi(m/N)
        = (N/c) sum_{+-} sum_m lambda(m) e(-+ abar m/c) Psi^{+-}(mN/c^2),
    Psi^{+-}(x) = int phi(y) J^{+-}(4 pi sqrt(xy)) dy,

with lambda(m) = tau(m) m^{-11/2}.  For Delta only the + kernel is nonzero, and
its dual frequency is e(-abar m/c).
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .arith import mod_inverse
from .bessel import SpectralParams, bessel_j, bessel_kernel, kernel_asymptotic
from .errors import NonInvertible, QuadratureNonConvergence, TruncationBudgetExceeded
from .quadrature import QuadResult, adaptive, gauss_panels
from .weights import SmoothWeight, plateau

log = logging.getLogger(__name__)

TAU_BUDGET_MAX = 100_000


def _cache_dir() -> Path:
    root = os.environ.get("EXPTWIST_CACHE") or os.path.join(
        os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache")), "exptwist")
    return Path(root)


def _eta_cubed(n: int) -> list[int]:
    """Coefficients of prod (1 - q^k)^3 = sum_j (-1)^j (2j + 1) q^{j(j+1)/2} up to q^n."""
    g = [0] * (n + 1)
    j = 0
    while j * (j + 1) // 2 <= n:
        g[j * (j + 1) // 2] = (-1) ** j * (2 * j + 1)
        j += 1
    return g


def _power_series_power(g: list[int], k: int, n: int) -> list[int]:
    """Coefficients of G^k up to q^n for G with constant term 1 (exact, J.C.P. Miller's recurrence)."""
    support = [j for j in range(1, n + 1) if g[j]]
    f = [0] * (n + 1)
    f[0] = 1
    for m in range(1, n + 1):
        acc = 0
        for j in support:
            if j > m:
                break
            acc += ((k + 1) * j - m) * g[j] * f[m - j]
        f[m] = acc // m
    return f


def _compute_tau(budget: int) -> list[int]:
    # Delta = q prod (1 - q^k)^24 = q (prod (1 - q^k)^3)^8
    f = _power_series_power(_eta_cubed(budget), 8, budget - 1)
    return f[:budget]


def tau_coefficients(budget: int, use_disk: bool = True) -> list[int]:
    """[tau(1), ..., tau(budget)], cached on disk one integer per line."""
    if not 1 <= budget <= TAU_BUDGET_MAX:
        raise ValueError(f"budget must lie in [1, {TAU_BUDGET_MAX}]")
    return list(_tau_table(budget, use_disk))


@lru_cache(maxsize=8)
def _tau_table(budget: int, use_disk: bool) -> tuple[int, ...]:
    path = _cache_dir() / "tau.txt"
    if use_disk and path.exists():
        try:
            cached = [int(line) for line in path.read_text().split()]
            if len(cached) >= budget:
                return tuple(cached[:budget])
        except ValueError:
            log.warning("ignoring unreadable tau cache at %s", path)
    values = _compute_tau(budget)
    if use_disk:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text("\n".join(map(str, values)) + "\n")
            tmp.replace(path)
        except OSError as exc:
            log.warning("could not write tau cache: %s", exc)
    return tuple(values)


def normalized_coefficients(budget: int) -> np.ndarray:
    """lambda(m) = tau(m) m^{-11/2} for m = 1..budget (index 0 is m = 1)."""
    tau = tau_coefficients(budget)
    m = np.arange(1, budget + 1, dtype=float)
    return np.array([float(t) for t in tau]) * m ** -5.5


# --- Psi ------------------------------------------------------------------------

def _cycles(x: float, phi: SmoothWeight) -> float:
    lo, hi = phi.support
    return 2 * math.sqrt(max(x, 0.0)) * (math.sqrt(hi) - math.sqrt(max(lo, 0.0)))


def psi_transform(sign: int, x: float, phi: SmoothWeight, sp: SpectralParams,
                  rtol: float = 1e-10, atol: float = 1e-16) -> QuadResult:
    """Psi^{sign}(x) = int phi(y) J_g^{sign}(4 pi sqrt(xy)) dy by adaptive Gauss panels."""
    if x < 0:
        raise ValueError("x must be non-negative")
    lo, hi = phi.support
    if x == 0:
        return adaptive(lambda y: phi(y) * bessel_kernel(sign, np.full(y.shape, 1e-300), sp).real * 0,
                        lo, hi, rtol, atol)
    start = max(2, int(_cycles(x, phi)) + 1)
    return adaptive(lambda y: phi(y) * bessel_kernel(sign, 4 * math.pi * np.sqrt(x * y), sp),
                    lo, hi, rtol, atol, panels=start)


def psi_asymptotic(x: float, phi: SmoothWeight, sp: SpectralParams, terms: int) -> complex:
    """x^{-1/4} int phi(y) y^{-1/4} sum_{j <= terms} (c_j e(2 sqrt(xy)) + d_j e(-2 sqrt(xy))) (xy)^{-j/2} dy,
    with c_j, d_j taken from the Hankel expansions of the kernel."""
    lo, hi = phi.support
    y, w = gauss_panels(lo, hi, max(4, int(_cycles(x, phi)) + 4), 24)
    return complex(np.sum(phi(y) * kernel_asymptotic(4 * math.pi * np.sqrt(x * y), sp, terms) * w))


def psi_plus_values(xs: np.ndarray, phi: SmoothWeight, k: int = 12, nodes_per_cycle: int = 10) -> np.ndarray:
    """Psi^+(x) for many x at a fixed resolution (holomorphic weight k); blocks share one node set."""
    xs = np.asarray(xs, dtype=float)
    out = np.empty(xs.shape, dtype=complex)
    order = np.argsort(xs)
    lo, hi = phi.support
    for start in range(0, xs.size, 64):
        idx = order[start:start + 64]
        panels = max(4, int(math.ceil(_cycles(xs[idx].max(), phi) * nodes_per_cycle / 20)) + 2)
        y, w = gauss_panels(lo, hi, panels, 20)
        amp = phi(y) * w
        z = 4 * math.pi * np.sqrt(np.outer(xs[idx], y))
        out[idx] = (bessel_j(k - 1, z.ravel()).reshape(z.shape).real @ amp)
    return 2 * math.pi * (1j ** k) * out


# --- the Voronoi check --------------------------------------------------------

def voronoi_phi() -> SmoothWeight:
    """Plateau on [1, 2], flat on [1.45, 1.55]; the long ramps make Psi^+ decay quickly."""
    return plateau(1.0, 2.0, 0.45)


@dataclass
class VoronoiResult:
    a: int
    c: int
    N: float
    lhs: complex
    rhs: complex
    terms: int
    truncation_estimate: float
    tolerance: float

    @property
    def diff(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        return self.diff <= self.tolerance * (1 + abs(self.lhs))

    def as_dict(self) -> dict:
        return {"a": self.a, "c": self.c, "N": self.N,
                "lhs_re": self.lhs.real, "lhs_im": self.lhs.imag,
                "rhs_re": self.rhs.real, "rhs_im": self.rhs.imag,
                "diff": self.diff, "dual_terms": self.terms,
                "truncation_estimate": self.truncation_estimate, "pass": self.passed}


@lru_cache(maxsize=64)
def _dual_profile(c: int, N: float, phi: SmoothWeight, budget: int, tail_tol: float, block: int):
    """(N/c) lambda(m) Psi^+(mN/c^2) for m = 1..M, grown block by block until two blocks in a row
    contribute less than tail_tol in absolute value."""
    lam = normalized_coefficients(budget)
    values: list[np.ndarray] = []
    quiet = 0
    m0 = 1
    last_block = math.inf
    while quiet < 2:
        if m0 > budget:
            raise TruncationBudgetExceeded(
                f"dual sum for c={c}, N={N} not below {tail_tol:.1e} within {budget} coefficients "
                f"(last block {last_block:.2e})")
        m = np.arange(m0, min(m0 + block, budget + 1))
        v = (N / c) * lam[m - 1] * psi_plus_values(m * N / c ** 2, phi)
        values.append(v)
        last_block = float(np.sum(np.abs(v)))
        quiet = quiet + 1 if last_block < tail_tol else 0
        m0 = m[-1] + 1
    profile = np.concatenate(values)
    return profile, 2 * last_block


def gl2_voronoi_check(a: int, c: int, phi: SmoothWeight | None = None, N: float = 30.0,
                      coeff_budget: int = 20_000, tolerance: float = 1e-5) -> VoronoiResult:
    """Both sides of the Voronoi formula for Delta; the dual side stops once its tail is negligible."""
    if math.gcd(a, c) != 1:
        raise NonInvertible(f"gcd({a}, {c}) != 1")
    phi = voronoi_phi() if phi is None else phi
    lo, hi = phi.support
    m_hi = int(math.floor(hi * N))
    if m_hi > coeff_budget:
        raise TruncationBudgetExceeded("the budget does not cover the original sum")
    lam = normalized_coefficients(max(m_hi, 1))
    m = np.arange(max(1, int(math.ceil(lo * N))), m_hi + 1)
    lhs = complex(np.sum(lam[m - 1] * np.exp(2j * math.pi * a * m / c) * phi(m / N)))
    profile, tail = _dual_profile(c, float(N), phi, coeff_budget, 1e-3 * tolerance, 256)
    abar = mod_inverse(a % c, c) if c > 1 else 0
    md = np.arange(1, profile.size + 1)
    rhs = complex(np.sum(profile * np.exp(-2j * math.pi * ((abar * md) % c) / c)))
    return VoronoiResult(a, c, float(N), lhs, rhs, int(profile.size), tail, tolerance)
