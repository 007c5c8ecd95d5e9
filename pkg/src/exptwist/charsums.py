"""The composite character sums c1, c2 and their factorisations.

Conventions for inverses inside mixed-modulus exponentials: an inverse is
always taken modulo the denominator of the additive character that encloses
it.  Where a residue a mod qM1 is inverted and then multiplied by r inside a
Kloosterman sum of modulus qM1 r/n1, the product r * abar is well defined
because r * qM1 is divisible by qM1 r/n1.

Every sum takes the signed values n2 -> sign_n2 * n2 and m -> sign_m * m.
Brute-force evaluations are vectorised over n2: one table per base instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .arith import (
    FactoredModulus,
    additive_char_table,
    csum,
    divisors,
    factorize,
    inverse_table,
    moebius,
    units,
)
from .characters import DirichletCharacter, gauss_sum
from .errors import InvariantViolation
from .expsums import TraceFunctionParams, convolution_table, kl2_table, kloosterman_matrix, l_table


def _inv(a: int, q: int) -> int:
    if q == 1:
        return 0
    a %= q
    if math.gcd(a, q) != 1:
        raise InvariantViolation(f"{a} is not a unit mod {q}")
    return pow(a, -1, q)


@dataclass(frozen=True)
class CharSumInstance:
    n1: int
    n2: int
    m: int
    q: int
    r: int
    M: FactoredModulus
    chi1: DirichletCharacter
    chi2: DirichletCharacter
    sign_n2: int = 1
    sign_m: int = 1

    def __post_init__(self) -> None:
        M1, M2 = self.M.M1, self.M.M2
        checks = [
            (self.q >= 1 and self.r >= 1 and self.n1 >= 1, "q, r, n1 must be positive"),
            (math.gcd(self.q, self.M.M) == 1, f"gcd(q, M) = gcd({self.q}, {self.M.M}) != 1"),
            (math.gcd(self.r, self.M.M) == 1, f"gcd(r, M) = gcd({self.r}, {self.M.M}) != 1"),
            (self.r < min(M1, M2), f"r = {self.r} is not below min(M1, M2)"),
            ((self.q * self.r) % self.n1 == 0, f"n1 = {self.n1} does not divide qr = {self.q * self.r}"),
            (math.gcd(self.n1, M1) == 1, f"gcd(n1, M1) = gcd({self.n1}, {M1}) != 1"),
            (math.gcd(self.m, M2) == 1, f"gcd(m, M2) = gcd({self.m}, {M2}) != 1"),
            (self.sign_n2 in (1, -1) and self.sign_m in (1, -1), "signs must be +1 or -1"),
            (self.chi1.modulus == M1 and self.chi1.is_primitive, "chi1 must be primitive mod M1"),
            (self.chi2.modulus == M2 and self.chi2.is_primitive, "chi2 must be primitive mod M2"),
        ]
        for ok, msg in checks:
            if not ok:
                raise InvariantViolation(msg)

    @property
    def n2_eff(self) -> int:
        return self.sign_n2 * self.n2

    @property
    def m_eff(self) -> int:
        return self.sign_m * self.m

    @property
    def reduced_modulus(self) -> int:
        """qr/n1, the modulus of the q-part of the Kloosterman sum."""
        return self.q * self.r // self.n1

    @property
    def kloosterman_modulus(self) -> int:
        return self.q * self.M.M1 * self.r // self.n1

    def key(self) -> tuple:
        return (self.M.M1, self.M.M2, self.chi1.label, self.chi2.label, self.q, self.r, self.n1, self.m_eff)

    def describe(self) -> dict:
        return {
            "M1": self.M.M1, "M2": self.M.M2,
            "chi1": list(self.chi1.label), "chi2": list(self.chi2.label),
            "q": self.q, "r": self.r, "n1": self.n1, "n2": self.n2, "m": self.m,
            "sign_n2": self.sign_n2, "sign_m": self.sign_m,
        }


# --- brute force ---------------------------------------------------------

_BRUTE_CACHE: dict = {}


def _brute_table(inst: CharSumInstance, which: int) -> np.ndarray:
    """n2 mod K -> c_which(n1, n2, m, q), summing a mod qM1 and c mod M directly."""
    key = (which,) + inst.key()
    hit = _BRUTE_CACHE.get(key)
    if hit is not None:
        return hit
    M1, M2, M = inst.M.M1, inst.M.M2, inst.M.M
    q, r, m = inst.q, inst.r, inst.m_eff
    qM1, qM = q * M1, q * M
    K = inst.kloosterman_modulus

    a = np.asarray(units(qM1))
    c = np.arange(M)
    chibar = np.conj(inst.chi1.values[c % M1] * inst.chi2.values[c % M2])
    x = (a[:, None] * M2 + c[None, :] * q) % qM
    if which == 1:
        # aM2 + cq is a unit mod qM exactly when c avoids -qbar a M2 mod M1 and c is a unit mod M2
        mask = (x % M1 != 0) & (chibar[None, :] != 0)
        inv = inverse_table(qM)[np.where(mask, x, 1)]
        phase = additive_char_table(qM)[(m * inv) % qM]
    else:
        # c = -qbar a M2 mod M1: aM2 + cq is divisible by M1 and (aM2 + cq)/M1 is read mod qM2
        mask = (x % M1 == 0) & (chibar[None, :] != 0)
        qM2 = q * M2
        y = (x // M1) % qM2
        inv = inverse_table(qM2)[np.where(mask, y, 1)]
        phase = additive_char_table(qM2)[(m * inv) % qM2]
    weights = np.where(mask, chibar[None, :] * phase, 0.0).sum(axis=1)

    abar = inverse_table(qM1)[a] if qM1 > 1 else np.zeros_like(a)
    rows = (-r * abar) % K
    S = kloosterman_matrix(K)
    table = weights @ S[rows, :]
    _BRUTE_CACHE[key] = table
    return table


def c1_bruteforce(inst: CharSumInstance) -> complex:
    t = _brute_table(inst, 1)
    return complex(t[inst.n2_eff % len(t)])


def c2_bruteforce(inst: CharSumInstance) -> complex:
    t = _brute_table(inst, 2)
    return complex(t[inst.n2_eff % len(t)])


def c1_brute_vector(inst: CharSumInstance) -> np.ndarray:
    return _brute_table(inst, 1)


def c2_brute_vector(inst: CharSumInstance) -> np.ndarray:
    return _brute_table(inst, 2)


# --- the q-part and M1-part sums ------------------------------------------

@lru_cache(maxsize=8192)
def _b_table(n1: int, m: int, q: int, r: int, M1: int, M2: int) -> np.ndarray:
    """n2 mod qr/n1 -> sum_{d|q} d mu(q/d) sum*_{u, m = M2^2 n1 u (d)} e(n2 (M1 u)^{-1} / (qr/n1))."""
    Qr = q * r // n1
    u = np.asarray(units(Qr))
    # n1*u mod q is well defined for u mod qr/n1, so the congruence mod d | q is too
    coeff = np.zeros(len(u))
    for d in divisors(q):
        mu = moebius(q // d)
        if mu:
            coeff += d * mu * ((m - M2 * M2 * n1 * u) % d == 0)
    if Qr == 1:
        return np.array([complex(coeff.sum())])
    inv = inverse_table(Qr)[(M1 * u) % Qr]
    n2 = np.arange(Qr)
    E = additive_char_table(Qr)[np.outer(n2, inv) % Qr]
    return E @ coeff


def b_sum(n1: int, n2: int, m: int, q: int, r: int, M: FactoredModulus) -> complex:
    if (q * r) % n1:
        raise InvariantViolation(f"n1 = {n1} does not divide qr = {q * r}")
    t = _b_table(n1, m, q, r, M.M1, M.M2)
    return complex(t[n2 % len(t)])


def _d_table(n1: int, m: int, q: int, r: int, M: FactoredModulus, chi1: DirichletCharacter) -> np.ndarray:
    """n2 mod M1 -> sum*_{a mod M1} L_{m/(qM2), M2}(a) Kl2(-r n2 / (a (qr/n1)^2))."""
    M1, M2 = M.M1, M.M2
    for name, val in (("q", q), ("r", r), ("n1", n1)):
        if val % M1 == 0:
            raise InvariantViolation(f"{name} = {val} is not a unit mod M1 = {M1}")
    Qr = q * r // n1
    alpha = m * _inv(q * M2, M1) % M1
    L = l_table(alpha, M2, M1, chi1)
    kl = kl2_table(M1)
    a = np.arange(1, M1)
    abar = inverse_table(M1)[a]
    base = (-r * _inv(Qr * Qr, M1)) % M1
    n2 = np.arange(M1)
    arg = (base * np.outer(n2, abar)) % M1
    return kl[arg] @ L[a]


def d_sum(n1: int, n2: int, m: int, q: int, r: int, M: FactoredModulus, chi1: DirichletCharacter) -> complex:
    return complex(_d_table(n1, m, q, r, M, chi1)[n2 % M.M1])


# --- factored forms ---------------------------------------------------------

def c1_factored(inst: CharSumInstance) -> complex:
    """chi1(q) chi2(q^2 M1 / m) tau(chi2) M1 B(n1, n2, m; q) D(n1, n2, m, q; M1)."""
    M1, M2 = inst.M.M1, inst.M.M2
    q, m, n2 = inst.q, inst.m_eff, inst.n2_eff
    pref = (
        inst.chi1(q)
        * inst.chi2(q * q * M1 * _inv(m, M2))
        * gauss_sum(inst.chi2).value
        * M1
    )
    return pref * b_sum(inst.n1, n2, m, q, inst.r, inst.M) * d_sum(inst.n1, n2, m, q, inst.r, inst.M, inst.chi1)


def c2_factored(inst: CharSumInstance, n2_twist: bool = True) -> complex:
    """chi1(q (M2 r n2)^{-1} (qr/n1)^2) chi2(q^2 (m M1)^{-1}) tau(chi1)^2 tau(chi2) B(n1, n2, M1^2 m; q).

    The character factor chi1(1/n2) comes from the Gauss sum in the n2-slot of
    the M1-part Kloosterman sum; it makes the value vanish when M1 | n2.
    n2_twist=False drops that factor (kept for comparison only).
    """
    M1, M2 = inst.M.M1, inst.M.M2
    q, r, n1, m, n2 = inst.q, inst.r, inst.n1, inst.m_eff, inst.n2_eff
    Qr = inst.reduced_modulus
    arg1 = q * _inv(M2 * r, M1) * Qr * Qr
    if n2_twist:
        if n2 % M1 == 0:
            return 0j
        arg1 *= _inv(n2, M1)
    pref = (
        inst.chi1(arg1)
        * inst.chi2(q * q * _inv(m * M1, M2))
        * gauss_sum(inst.chi1).value ** 2
        * gauss_sum(inst.chi2).value
    )
    return pref * b_sum(n1, n2, M1 * M1 * m, q, r, inst.M)


# --- correlation sums -------------------------------------------------------

def _prime_support(n: int) -> set[int]:
    return {p for p, _ in factorize(n)} if n > 1 else set()


@dataclass(frozen=True)
class CorrelationInstance:
    """Two c1 instances at moduli q1 q2 and q1 q2' sharing n1, r, M and the
    characters, with separate m and m', plus the dual frequency n2t."""

    M: FactoredModulus
    chi1: DirichletCharacter
    chi2: DirichletCharacter
    n1: int
    r: int
    q1: int
    q2: int
    q2p: int
    m: int
    mp: int
    n2t: int = 0
    sign_n2: int = 1
    sign_m: int = 1

    def __post_init__(self) -> None:
        n1r = self.n1 * self.r
        if not _prime_support(self.q1) <= _prime_support(n1r):
            raise InvariantViolation(f"q1 = {self.q1} has a prime not dividing n1 r = {n1r}")
        for name, q2 in (("q2", self.q2), ("q2'", self.q2p)):
            if math.gcd(q2, n1r) != 1:
                raise InvariantViolation(f"gcd({name}, n1 r) = gcd({q2}, {n1r}) != 1")
        if (self.q1 * self.r) % self.n1:
            raise InvariantViolation(f"n1 = {self.n1} does not divide q1 r = {self.q1 * self.r}")
        # both halves must be valid c1 instances
        self.half(False)
        self.half(True)

    def half(self, primed: bool, n2: int = 0) -> CharSumInstance:
        return CharSumInstance(
            n1=self.n1,
            n2=n2,
            m=self.mp if primed else self.m,
            q=self.q1 * (self.q2p if primed else self.q2),
            r=self.r,
            M=self.M,
            chi1=self.chi1,
            chi2=self.chi2,
            sign_n2=self.sign_n2,
            sign_m=self.sign_m,
        )

    @property
    def P(self) -> int:
        """q2 q2' q1 r / n1, the period of the q-part correlation."""
        return self.q2 * self.q2p * self.q1 * self.r // self.n1

    @property
    def period(self) -> int:
        return self.M.M1 * self.P

    def with_n2t(self, n2t: int) -> "CorrelationInstance":
        return replace(self, n2t=n2t)

    def is_degenerate(self) -> bool:
        """Residue proxy for the exceptional case: m q2' = m' q2 and q2^2 = q2'^2 mod M1."""
        M1 = self.M.M1
        return (self.m * self.q2p - self.mp * self.q2) % M1 == 0 and (
            self.q2 * self.q2 - self.q2p * self.q2p
        ) % M1 == 0

    def describe(self) -> dict:
        return {
            "M1": self.M.M1, "M2": self.M.M2,
            "chi1": list(self.chi1.label), "chi2": list(self.chi2.label),
            "n1": self.n1, "r": self.r, "q1": self.q1, "q2": self.q2, "q2p": self.q2p,
            "m": self.m, "mp": self.mp, "n2t": self.n2t,
            "sign_n2": self.sign_n2, "sign_m": self.sign_m,
        }


def _signed_vector(table: np.ndarray, sign: int, length: int) -> np.ndarray:
    v = np.arange(length)
    return table[(sign * v) % len(table)]


def correlation_C_all(ci: CorrelationInstance) -> np.ndarray:
    """n2t mod M1 P -> C(n2t), from brute-force c1 values over a full period of v."""
    T = ci.period
    s = ci.sign_n2
    A = _signed_vector(c1_brute_vector(ci.half(False)), s, T)
    B = _signed_vector(c1_brute_vector(ci.half(True)), s, T)
    # (1/T) sum_v A(v) conj(B(v)) e(n2t v / T) for every n2t is an inverse DFT
    return np.fft.ifft(A * np.conj(B))


def correlation_C(ci: CorrelationInstance) -> complex:
    T = ci.period
    s = ci.sign_n2
    A = _signed_vector(c1_brute_vector(ci.half(False)), s, T)
    B = _signed_vector(c1_brute_vector(ci.half(True)), s, T)
    v = np.arange(T)
    phase = additive_char_table(T)[(ci.n2t * v) % T]
    return csum(A * np.conj(B) * phase) / T


def _c1_trace_params(ci: CorrelationInstance) -> TraceFunctionParams:
    M1, M2 = ci.M.M1, ci.M.M2
    sm, sn = ci.sign_m, ci.sign_n2

    def alpha(m, q2):
        return sm * m * _inv(ci.q1 * q2 * M2, M1) % M1

    def gamma(q2):
        Qr = ci.q1 * q2 * ci.r // ci.n1
        return -sn * ci.r * _inv(Qr * Qr, M1) % M1

    eta = ci.n2t * _inv(ci.P, M1) % M1
    return TraceFunctionParams(
        ci.chi1,
        alpha(ci.m, ci.q2), M2 % M1, gamma(ci.q2),
        alpha(ci.mp, ci.q2p), M2 % M1, gamma(ci.q2p),
        eta,
    )


def correlation_C1(ci: CorrelationInstance) -> complex:
    """(1/M1) sum_{v mod M1} D(.., v, m, q1q2) conj(D(.., v, m', q1q2')) e(Pbar n2t v / M1)."""
    M1 = ci.M.M1
    h, hp = ci.half(False), ci.half(True)
    D = _signed_vector(_d_table(ci.n1, h.m_eff, h.q, ci.r, ci.M, ci.chi1), ci.sign_n2, M1)
    Dp = _signed_vector(_d_table(ci.n1, hp.m_eff, hp.q, ci.r, ci.M, ci.chi1), ci.sign_n2, M1)
    eta = ci.n2t * _inv(ci.P, M1) % M1
    phase = additive_char_table(M1)[(eta * np.arange(M1)) % M1]
    return csum(D * np.conj(Dp) * phase) / M1


def correlation_C1_trace(ci: CorrelationInstance) -> complex:
    """The same quantity as sum_v (K*L)(v) conj((K'*L')(v)) e(eta v / M1)."""
    tp = _c1_trace_params(ci)
    M1 = tp.p
    KL = convolution_table(tp)
    KLp = convolution_table(tp.primed())
    phase = additive_char_table(M1)[(tp.eta * np.arange(M1)) % M1]
    return csum(KL * np.conj(KLp) * phase)


def _b_corr_direct(ci: CorrelationInstance, m: int, mp: int, phase_mult: int) -> complex:
    P = ci.P
    M1, M2 = ci.M.M1, ci.M.M2
    h, hp = ci.half(False), ci.half(True)
    Bt = _b_table(ci.n1, m, h.q, ci.r, M1, M2)
    Bp = _b_table(ci.n1, mp, hp.q, ci.r, M1, M2)
    B = _signed_vector(Bt, ci.sign_n2, P)
    Bq = _signed_vector(Bp, ci.sign_n2, P)
    phase = additive_char_table(P)[(phase_mult * ci.n2t * np.arange(P)) % P]
    return csum(B * np.conj(Bq) * phase) / P


def _b_corr_hits(ci: CorrelationInstance, m: int, mp: int) -> np.ndarray:
    """Weighted pair counts indexed by every target residue mod P at once."""
    P = ci.P
    w, wp, ubar, upbar = _b_corr_pieces(ci, m, mp)
    diff = (ci.q2 * upbar[None, :] - ci.q2p * ubar[:, None]) % P
    weight = np.outer(w, wp)
    return np.bincount(diff.ravel(), weights=weight.ravel(), minlength=P).round().astype(np.int64)


def _b_corr_pieces(ci: CorrelationInstance, m: int, mp: int):
    M2 = ci.M.M2
    q, qp = ci.q1 * ci.q2, ci.q1 * ci.q2p
    Qr, Qrp = q * ci.r // ci.n1, qp * ci.r // ci.n1
    u = np.asarray(units(Qr))
    up = np.asarray(units(Qrp))
    ubar = inverse_table(Qr)[u] if Qr > 1 else np.zeros(1, dtype=np.int64)
    upbar = inverse_table(Qrp)[up] if Qrp > 1 else np.zeros(1, dtype=np.int64)

    def weights(uu, qq, mm):
        w = np.zeros(len(uu), dtype=np.int64)
        for d in divisors(qq):
            mu = moebius(qq // d)
            if mu:
                rhs = mm * _inv(M2 * M2, d) if d > 1 else 0
                w += d * mu * ((ci.n1 * uu - rhs) % d == 0)
        return w

    return weights(u, q, m), weights(up, qp, mp), ubar, upbar


def _b_corr_count(ci: CorrelationInstance, m: int, mp: int, target: int) -> int:
    """sum_{d | q1q2} d mu sum_{d' | q1q2'} d' mu' #{(u, u') units :
    n1 u = m/M2^2 (d), n1 u' = m'/M2^2 (d'), q2 ubar' - q2' ubar = target (P)}."""
    w, wp, ubar, upbar = _b_corr_pieces(ci, m, mp)
    hit = ((ci.q2 * upbar[None, :] - ci.q2p * ubar[:, None] - target) % ci.P) == 0
    return int(w @ hit.astype(np.int64) @ wp)


def correlation_C2(ci: CorrelationInstance) -> complex:
    """(1/P) sum_{v mod P} B(n1, v, m; q1q2) conj(B(n1, v, m'; q1q2')) e(M1bar n2t v / P)."""
    M1bar = _inv(ci.M.M1, ci.P)
    return _b_corr_direct(ci, ci.sign_m * ci.m, ci.sign_m * ci.mp, M1bar)


def correlation_C2_count(ci: CorrelationInstance) -> int:
    """The same quantity as a signed count of unit pairs."""
    return _b_corr_count(ci, ci.sign_m * ci.m, ci.sign_m * ci.mp, ci.sign_n2 * ci.n2t)


def correlation_C2_star(ci: CorrelationInstance) -> complex:
    """(1/P) sum_v B(n1, v, M1^2 m; q1q2) conj(B(n1, v, M1^2 m'; q1q2')) e(n2t v / P)."""
    M1sq = ci.M.M1 ** 2
    return _b_corr_direct(ci, ci.sign_m * M1sq * ci.m, ci.sign_m * M1sq * ci.mp, 1)


def correlation_C2_star_count(ci: CorrelationInstance) -> int:
    M1 = ci.M.M1
    return _b_corr_count(
        ci, ci.sign_m * M1 * M1 * ci.m, ci.sign_m * M1 * M1 * ci.mp, ci.sign_n2 * M1 * ci.n2t
    )


def correlation_D(ci: CorrelationInstance) -> complex:
    """(1/(M1 P)) sum over v mod M1 P of c2(.., v, m, q1q2) conj(c2(.., v, m', q1q2')) e(n2t v/(M1 P)).

    c2 carries the factor chi1(1/n2), so its period in n2 is M1 P rather than P.
    """
    T = ci.period
    s = ci.sign_n2
    A = _signed_vector(c2_brute_vector(ci.half(False)), s, T)
    B = _signed_vector(c2_brute_vector(ci.half(True)), s, T)
    phase = additive_char_table(T)[(ci.n2t * np.arange(T)) % T]
    return csum(A * np.conj(B) * phase) / T


def correlation_D_predicted_abs(ci: CorrelationInstance) -> float:
    """M1^2 M2 |c_{M1}(n2t)| / M1 * |C2*(M1bar n2t)|, the modulus of correlation_D."""
    from .expsums import ramanujan_sum

    M1, M2 = ci.M.M1, ci.M.M2
    shifted = ci.with_n2t(ci.n2t * _inv(M1, ci.P) % ci.P)
    return M1 * M1 * M2 * abs(ramanujan_sum(M1, ci.n2t)) / M1 * abs(correlation_C2_star(shifted))


def c_zero_bound(ci: CorrelationInstance) -> float:
    """q1 q2 r * sum over d, d' | q1 q2 with (d, d') | (m - m') of (d, d')."""
    q = ci.q1 * ci.q2
    total = 0
    for d in divisors(q):
        for dp in divisors(q):
            g = math.gcd(d, dp)
            if (ci.m - ci.mp) % g == 0:
                total += g
    return q * ci.r * total


def correlation_scan(ci: CorrelationInstance) -> dict[str, np.ndarray]:
    """Every correlation quantity at all n2t mod M1 P, each route computed separately.

    Keys: C, C1, C1_trace, C2, C2_count, C2_star, C2_star_count, D, D_pred.
    The direct v-sums are inverse DFTs of pointwise products; the counting
    routes are histograms of q2 ubar' - q2' ubar over the weighted unit pairs.
    """
    from .expsums import ramanujan_sum

    M1, M2 = ci.M.M1, ci.M.M2
    P, T = ci.P, ci.period
    n2t = np.arange(T)
    sm, sn = ci.sign_m, ci.sign_n2
    M1bar = _inv(M1, P)
    eta = (n2t * _inv(P, M1)) % M1

    h, hp = ci.half(False), ci.half(True)
    D = _signed_vector(_d_table(ci.n1, h.m_eff, h.q, ci.r, ci.M, ci.chi1), sn, M1)
    Dp = _signed_vector(_d_table(ci.n1, hp.m_eff, hp.q, ci.r, ci.M, ci.chi1), sn, M1)
    tp = _c1_trace_params(ci)
    KL, KLp = convolution_table(tp), convolution_table(tp.primed())

    def b_direct(m, mp):
        B = _signed_vector(_b_table(ci.n1, m, h.q, ci.r, M1, M2), sn, P)
        Bq = _signed_vector(_b_table(ci.n1, mp, hp.q, ci.r, M1, M2), sn, P)
        return np.fft.ifft(B * np.conj(Bq))

    c2 = b_direct(sm * ci.m, sm * ci.mp)
    c2_star = b_direct(sm * M1 * M1 * ci.m, sm * M1 * M1 * ci.mp)
    hits = _b_corr_hits(ci, sm * ci.m, sm * ci.mp)
    hits_star = _b_corr_hits(ci, sm * M1 * M1 * ci.m, sm * M1 * M1 * ci.mp)

    A2 = _signed_vector(c2_brute_vector(h), sn, T)
    B2 = _signed_vector(c2_brute_vector(hp), sn, T)
    ram = np.array([abs(ramanujan_sum(M1, int(k))) for k in range(M1)], dtype=float)
    return {
        "C": correlation_C_all(ci),
        "C1": np.fft.ifft(D * np.conj(Dp))[eta],
        "C1_trace": M1 * np.fft.ifft(KL * np.conj(KLp))[eta],
        "C2": c2[(M1bar * n2t) % P],
        "C2_count": hits[(sn * n2t) % P].astype(complex),
        "C2_star": c2_star[n2t % P],
        "C2_star_count": hits_star[(sn * M1 * n2t) % P].astype(complex),
        "D": np.fft.ifft(A2 * np.conj(B2)),
        "D_pred": M1 * M2 * ram[n2t % M1] * np.abs(c2_star[(M1bar * n2t) % P]),
    }
