"""The delta-symbol expansion with the DFI weight, and an exact check of the
conductor-lowering rearrangement of that expansion for a modulus M = M1 M2.

The weight.  With w a smooth bump on [1/2, 1] of unit mass,

    h(x, y) = sum_{j >= 1} (xj)^{-1} (w(xj) - w(|y|/(xj)))

satisfies sum_q sum*_{a mod q} e(an/q) h(q/Q, n/Q^2) = Q * S_Q * [n = 0] with
S_Q = sum_d w(d/Q), by the divisor switch d <-> |n|/d.  Multiplying by a
symmetric cutoff U(y) (1 for |y| <= 1/4, 0 for |y| >= 1/2) changes nothing for
|n| <= Q^2/4 and makes y -> h U smooth and compactly supported, so

    omega(q, zeta) = c_Q * int h(q/Q, y) U(y) e(-y zeta Q/q) dy

is a rapidly decaying function of zeta and the expansion takes the form
delta(n) = Q^{-1} sum_{q <= Q} q^{-1} sum*_a e(an/q) int omega(q, z) e(nz/(qQ)) dz.
The constant c_Q is fixed numerically from the n = 0 value.

The y-integral uses the trapezoid rule on a uniform grid and the zeta-integral
the trapezoid rule on the dual grid (both integrands are smooth and decay fast,
so the rule converges spectrally); the pair is one FFT per modulus q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .arith import FactoredModulus, additive_char_table, csum, units
from .errors import NonCoprimeModuli, OutOfRange, QuadratureNonConvergence
from .expsums import ramanujan_sum
from .quadrature import gauss_panels
from .weights import SmoothWeight, bump01


def default_bump() -> SmoothWeight:
    """exp(-1/(t(1-t))) rescaled to [1/2, 1] with unit mass."""
    x, w = gauss_panels(0.5, 1.0, 8, 24)
    raw = SmoothWeight("bump", 0.5, 1.0)
    return raw.scaled(1.0 / float(np.sum(raw(x) * w)))


def default_cutoff() -> SmoothWeight:
    return SmoothWeight("symmetric", 0.25, 0.5)


@dataclass(frozen=True)
class DeltaParams:
    Q: float
    bump: SmoothWeight = field(default_factory=default_bump)
    cutoff: SmoothWeight = field(default_factory=default_cutoff)
    grid_exponent: int = 15
    # ratio between the period of the y-grid and the cutoff diameter
    period: float = 1.25

    def __post_init__(self) -> None:
        if self.Q < 2:
            raise ValueError("Q must be at least 2")

    @property
    def q_max(self) -> int:
        return int(math.floor(self.Q + 1e-12))


def telescoped_h(x: float, y: np.ndarray, w: SmoothWeight, tol: float = 1e-14) -> np.ndarray:
    """h(x, y) = sum_j (xj)^{-1} (w(xj) - w(|y|/(xj))), with w supported in [1/2, 1].

    Only finitely many j contribute: xj <= 1 in the first sum, |y|/(xj) >= 1/2 in
    the second.  Terms are exactly zero outside those ranges, so `tol` only
    guards the floating-point edge j values.
    """
    y = np.abs(np.asarray(y, dtype=float))
    first = 0.0
    j = 1
    while x * j <= 1.0 + tol:
        first += float(w(np.array([x * j]))[0]) / (x * j)
        j += 1
    second = np.zeros_like(y)
    jmax = int(np.max(2.0 * y) / x) + 1 if y.size else 0
    for j in range(1, jmax + 1):
        second += w(y / (x * j)) / (x * j)
    return first - second


class DFIWeight:
    """omega(q, zeta) for all 1 <= q <= Q, normalised so that delta(0) = 1."""

    def __init__(self, params: DeltaParams):
        self.params = params
        self.Q = params.Q
        size = 2 ** params.grid_exponent
        L = params.period
        self._size = size
        self._dy = L / size
        self._y = (np.arange(size) - size // 2) * self._dy
        self._profiles: dict[int, np.ndarray] = {}
        self._spectra: dict[int, np.ndarray] = {}
        self.normalization = 1.0
        raw = self._delta_raw(0)
        self.normalization = 1.0 / raw.real

    def profile(self, q: int) -> np.ndarray:
        """y -> h(q/Q, y) U(y) on the uniform grid."""
        if q not in self._profiles:
            x = q / self.Q
            y = self._y
            inside = np.abs(y) < self.params.cutoff.hi
            g = np.zeros_like(y)
            g[inside] = telescoped_h(x, y[inside], self.params.bump) * self.params.cutoff(y[inside])
            self._profiles[q] = g
        return self._profiles[q]

    def _spectrum(self, q: int) -> tuple[np.ndarray, float]:
        """Unnormalised omega(q, zeta_j) on zeta_j = j x/L, j = -size/2 .. size/2 - 1."""
        if q not in self._spectra:
            g = self.profile(q)
            # sum_k g(y_k) e(-y_k zeta_j / x) dy with y_k = (k - size/2) dy, zeta_j / x = j / L
            shifted = np.fft.ifftshift(g)
            spec = np.fft.fftshift(np.fft.fft(shifted)) * self._dy
            edge = np.max(np.abs(spec[: self._size // 16]))
            if edge > 1e-12 * np.max(np.abs(spec)):
                raise QuadratureNonConvergence(
                    f"omega({q}, .) has not decayed at the edge of the dual grid ({edge:.2e}); "
                    "raise grid_exponent")
            self._spectra[q] = spec.real
        x = q / self.Q
        return self._spectra[q], x / self.params.period

    def _check_q(self, q: int) -> None:
        if not 1 <= q <= self.params.q_max:
            raise OutOfRange(f"q = {q} outside [1, Q = {self.Q}]")

    def omega(self, q: int, zeta) -> np.ndarray:
        """Direct trapezoid evaluation of omega(q, zeta) at arbitrary zeta."""
        self._check_q(q)
        zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
        g = self.profile(q)
        keep = g != 0
        y, gk = self._y[keep], g[keep]
        x = q / self.Q
        out = np.empty(zeta.shape)
        for s in range(0, zeta.size, 256):
            z = zeta.ravel()[s:s + 256]
            out.ravel()[s:s + 256] = np.cos(2 * np.pi * np.outer(z, y) / x) @ gk
        return self.normalization * out * self._dy

    def zeta_integral(self, q: int, n) -> np.ndarray:
        """int omega(q, z) e(n z/(qQ)) dz by the trapezoid rule on the dual grid."""
        self._check_q(q)
        spec, dz = self._spectrum(q)
        size = self._size
        z = (np.arange(size) - size // 2) * dz
        n = np.atleast_1d(np.asarray(n, dtype=float))
        phase = np.cos(2 * np.pi * np.outer(n, z) / (q * self.Q))
        return self.normalization * (phase @ spec) * dz

    def tail(self, q: int, zeta_min: float) -> float:
        """max |omega(q, zeta)| over the dual grid beyond |zeta| >= zeta_min."""
        spec, dz = self._spectrum(q)
        z = (np.arange(self._size) - self._size // 2) * dz
        mask = np.abs(z) >= zeta_min
        return float(self.normalization * np.max(np.abs(spec[mask]))) if mask.any() else 0.0

    def _delta_raw(self, n: int) -> complex:
        total = 0.0
        for q in range(1, self.params.q_max + 1):
            rq = ramanujan_sum(q, n)
            if rq:
                total += rq / q * float(self.zeta_integral(q, n)[0])
        return complex(total / self.Q)

    def delta(self, n: int) -> complex:
        if abs(n) > self.Q ** 2 / 4:
            raise ValueError("|n| must be at most Q^2/4")
        return self._delta_raw(n)

    def divisor_normalization(self) -> float:
        """Q / sum_d w(d/Q): what the normalisation should be if the quadrature is right."""
        d = np.arange(1, self.params.q_max + 2)
        return self.Q / float(np.sum(self.params.bump(d / self.Q)))


@lru_cache(maxsize=32)
def dfi_weight_for(Q: float) -> DFIWeight:
    return DFIWeight(DeltaParams(Q))


def dfi_weight(q: int, zeta, params: DeltaParams | None = None, Q: float | None = None) -> np.ndarray:
    weight = DFIWeight(params) if params is not None else dfi_weight_for(float(Q))
    return weight.omega(q, zeta)


def delta_eval(n: int, params: DeltaParams | None = None, Q: float | None = None) -> complex:
    weight = DFIWeight(params) if params is not None else dfi_weight_for(float(Q))
    return weight.delta(n)


# --- the rearrangement ------------------------------------------------------

def unit_bijection_check(q: int, M1: int) -> bool:
    """Does {a M1 + b q : a in (Z/q)*, b in (Z/M1)*} exhaust (Z/qM1)*?"""
    if math.gcd(q, M1) != 1:
        raise NonCoprimeModuli(f"gcd({q}, {M1}) != 1")
    got = sorted((a * M1 + b * q) % (q * M1) for a in units(q) for b in units(M1))
    return got == units(q * M1)


def congruence_detector_check(n: int, M1: int) -> tuple[complex, int]:
    lhs = csum(additive_char_table(M1)[(n * np.arange(M1)) % M1]) / M1
    return lhs, int(n % M1 == 0)


WeightFn = Callable[[int, np.ndarray], np.ndarray]


def stub_one(q: int, zeta: np.ndarray) -> np.ndarray:
    return np.ones_like(zeta)


def stub_rational(q: int, zeta: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + q + zeta ** 2)


def stub_dfi(Q: float) -> WeightFn:
    weight = dfi_weight_for(float(Q))
    cache: dict = {}

    def omega(q: int, zeta: np.ndarray) -> np.ndarray:
        key = (q, zeta.tobytes())
        if key not in cache:
            cache[key] = weight.omega(q, zeta)
        return cache[key]

    return omega


def default_zeta_nodes(half_width: float = 3.0, panels: int = 4, order: int = 16):
    return gauss_panels(-half_width, half_width, panels, order)


def _powers_upto(base: int, bound: float) -> list[int]:
    """[0, 1, ..., k] with base^k <= bound."""
    out, p = [0], base
    while p <= bound + 1e-9:
        out.append(len(out))
        p *= base
    return out


def _char_sums(n: np.ndarray, residues, modulus: int) -> np.ndarray:
    """sum over the given residues of e(n r/modulus), for every n."""
    r = np.asarray(residues, dtype=np.int64)
    table = additive_char_table(modulus)
    return table[np.outer(n, r) % modulus].sum(axis=1)


class _Integrals:
    """n -> sum_k w_k omega(q, z_k) e(n z_k/(D Q)) for the shared nodes, cached per (q, D)."""

    def __init__(self, n: np.ndarray, Q: float, omega: WeightFn, nodes):
        self.n, self.Q, self.omega = n, Q, omega
        self.z, self.wz = nodes
        self._cache: dict = {}

    def __call__(self, weight_arg: int, phase_div: int) -> np.ndarray:
        key = (weight_arg, phase_div)
        if key not in self._cache:
            amp = self.wz * self.omega(weight_arg, self.z)
            phase = np.exp(2j * np.pi * np.outer(self.n, self.z) / (phase_div * self.Q))
            self._cache[key] = phase @ amp
        return self._cache[key]


def rearrangement_lhs(n, Q: float, M: FactoredModulus, omega: WeightFn, nodes) -> np.ndarray:
    """(QM1)^{-1} sum_{q <= Q} q^{-1} sum_{b mod M1} sum*_{a mod q} e(n(a + bq)/(qM1))
    * sum_k w_k omega(q, z_k) e(n z_k/(qQM1)), for each n."""
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    integral = _Integrals(n, Q, omega, nodes)
    M1 = M.M1
    total = np.zeros(n.shape, dtype=complex)
    for q in range(1, int(math.floor(Q + 1e-9)) + 1):
        A = [(a + b * q) for a in units(q) for b in range(M1)]
        total += _char_sums(n, A, q * M1) * integral(q, q * M1) / q
    return total / (Q * M1)


def rearrangement_rhs(n, Q: float, M: FactoredModulus, omega: WeightFn, nodes) -> np.ndarray:
    """The two families, for each n: q M2^l with (q, M) = 1 at moduli q M1^{1-s} M2^l
    (s = 0, 1), and q M1^t M2^l (t >= 1) at moduli q M1^{1+t} M2^l."""
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    integral = _Integrals(n, Q, omega, nodes)
    M1, M2 = M.M1, M.M2
    total = np.zeros(n.shape, dtype=complex)
    for l in _powers_upto(M2, Q):
        P2 = M2 ** l
        for q in range(1, int(math.floor(Q / P2 + 1e-9)) + 1):
            if math.gcd(q, M.M) != 1:
                continue
            I = integral(q * P2, q * M1 * P2)
            for s in (0, 1):
                mod = q * M1 ** (1 - s) * P2
                total += _char_sums(n, units(mod), mod) * I / (q * M1 * P2)
        for t in _powers_upto(M1, Q / P2)[1:]:
            P1 = M1 ** t
            for q in range(1, int(math.floor(Q / (P1 * P2) + 1e-9)) + 1):
                if math.gcd(q, M.M) != 1:
                    continue
                mod = q * M1 ** (1 + t) * P2
                total += _char_sums(n, units(mod), mod) * integral(q * P1 * P2, mod) / mod
    return total / Q


def rearrangement_check(n, Q: float, M: FactoredModulus, omega: WeightFn, nodes=None):
    """Both sides of the rearrangement with the same weight and nodes; scalars for scalar n."""
    nodes = default_zeta_nodes() if nodes is None else nodes
    lhs = rearrangement_lhs(n, Q, M, omega, nodes)
    rhs = rearrangement_rhs(n, Q, M, omega, nodes)
    if np.ndim(n) == 0:
        return complex(lhs[0]), complex(rhs[0])
    return lhs, rhs


STUBS = {"one": lambda Q: stub_one, "rational": lambda Q: stub_rational, "dfi": stub_dfi}


# --- symbolic ledger of both sides --------------------------------------------

LedgerKey = tuple[int, int, int, int]  # (modulus, a, weight argument, phase divisor)


@dataclass
class TermLedger:
    """Coefficients (times Q) of e(an/modulus) * int omega(weight_arg, z) e(nz/(phase_div Q)) dz."""

    terms: dict = field(default_factory=dict)

    def add(self, a: int, modulus: int, weight_arg: int, phase_div: int, coeff: Fraction) -> None:
        g = math.gcd(a, modulus)
        key = (modulus // g, (a // g) % (modulus // g) if modulus // g > 1 else 0, weight_arg, phase_div)
        self.terms[key] = self.terms.get(key, Fraction(0)) + coeff

    def canonical(self) -> list[tuple[LedgerKey, Fraction]]:
        return sorted((k, v) for k, v in self.terms.items() if v != 0)

    def __eq__(self, other) -> bool:
        return isinstance(other, TermLedger) and self.canonical() == other.canonical()


def ledger_lhs(Q: float, M: FactoredModulus) -> TermLedger:
    led = TermLedger()
    M1 = M.M1
    for q in range(1, int(math.floor(Q + 1e-9)) + 1):
        for a in units(q):
            for b in range(M1):
                led.add(a + b * q, q * M1, q, q * M1, Fraction(1, q * M1))
    return led


def ledger_rhs(Q: float, M: FactoredModulus) -> TermLedger:
    led = TermLedger()
    M1, M2 = M.M1, M.M2
    for l in _powers_upto(M2, Q):
        P2 = M2 ** l
        for q in range(1, int(math.floor(Q / P2 + 1e-9)) + 1):
            if math.gcd(q, M.M) != 1:
                continue
            for s in (0, 1):
                mod = q * M1 ** (1 - s) * P2
                for a in units(mod):
                    led.add(a, mod, q * P2, q * M1 * P2, Fraction(1, q * M1 * P2))
        for t in _powers_upto(M1, Q / P2)[1:]:
            P1 = M1 ** t
            for q in range(1, int(math.floor(Q / (P1 * P2) + 1e-9)) + 1):
                if math.gcd(q, M.M) != 1:
                    continue
                mod = q * M1 ** (1 + t) * P2
                for a in units(mod):
                    led.add(a, mod, q * P1 * P2, mod, Fraction(1, mod))
    return led
