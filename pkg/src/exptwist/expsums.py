"""Ramanujan and Kloosterman sums, and the finite-field calculus of Kl2 and
L-sums: multiplicative convolution, Fourier transform, closed forms.

Functions on F_p are dense numpy tables of length p indexed by residue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .arith import (
    additive_char_table,
    csum,
    divisors,
    inverse_table,
    is_prime,
    moebius,
    units,
)
from .characters import DirichletCharacter, gauss_sum
from .errors import NonInvertible, NotPrime


def ramanujan_sum(q: int, b: int) -> int:
    """c_q(b), evaluated both as a unit sum and via sum_{d | (q, b)} d mu(q/d)."""
    divisor_form = sum(d * moebius(q // d) for d in divisors(q) if b % d == 0)
    e = additive_char_table(q)
    unit_form = csum(e[(b * np.asarray(units(q))) % q])
    if abs(unit_form - divisor_form) > 1e-10 * max(1, q):
        raise AssertionError(f"Ramanujan sum mismatch at q={q}, b={b}")
    return divisor_form


def kloosterman(m: int, n: int, c: int) -> complex:
    """S(m, n; c) = sum over units x mod c of e((m x + n xbar)/c)."""
    if c == 1:
        return 1.0 + 0j
    x = np.asarray(units(c))
    xbar = inverse_table(c)[x]
    return csum(additive_char_table(c)[(m * x + n * xbar) % c])


@lru_cache(maxsize=256)
def kloosterman_matrix(c: int) -> np.ndarray:
    """S[m, n] = S(m, n; c) for all residues m, n mod c (real array)."""
    if c == 1:
        return np.ones((1, 1))
    x = np.asarray(units(c))
    xbar = inverse_table(c)[x]
    e = additive_char_table(c)
    r = np.arange(c)
    A = e[np.outer(r, x) % c]
    B = e[np.outer(r, xbar) % c]
    S = A @ B.T
    return np.ascontiguousarray(S.real)


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")


@lru_cache(maxsize=256)
def kl2_table(p: int) -> np.ndarray:
    """Kl2(n; p) for n = 0..p-1, from sum_{x1 x2 = n} e((x1 + x2)/p) / sqrt(p)."""
    _require_prime(p)
    x = np.arange(p)
    e = additive_char_table(p)
    prod = np.outer(x, x) % p
    phase = e[(x[:, None] + x[None, :]) % p]
    out = np.zeros(p, dtype=complex)
    np.add.at(out, prod.ravel(), phase.ravel())
    return (out / math.sqrt(p)).real.astype(float)


def kl2_normalized(n: int, p: int) -> float:
    return float(kl2_table(p)[n % p])


def l_table(alpha: int, beta: int, p: int, chi1: DirichletCharacter) -> np.ndarray:
    """v -> L_{alpha,beta}(v; p) = p^{-1/2} sum_b conj chi1(b) e(alpha (b + beta v)^{-1} / p),
    the sum running over b with b + beta v a unit."""
    _require_prime(p)
    b = np.arange(p)
    v = np.arange(p)
    shifted = (b[None, :] + beta * v[:, None]) % p
    inv = inverse_table(p)[shifted]
    terms = np.conj(chi1.values)[b][None, :] * additive_char_table(p)[(alpha * inv) % p]
    terms = np.where(shifted == 0, 0.0, terms)
    return terms.sum(axis=1) / math.sqrt(p)


def l_sum(alpha: int, beta: int, v: int, p: int, chi1: DirichletCharacter) -> complex:
    return complex(l_table(alpha, beta, p, chi1)[v % p])


def mult_convolution(K: np.ndarray, L: np.ndarray, form: str = "quotient") -> np.ndarray:
    """(K * L)(v) = p^{-1/2} sum_{u != 0} K(u) L(v/u).

    form="product" uses the reindexed sum p^{-1/2} sum_{u != 0} K(vu) L(1/u).  The
    substitution u -> vu needs v to be a unit; at v = 0 both forms give
    L(0) times the unit sum of K.
    """
    p = len(K)
    u = np.arange(1, p)
    ubar = inverse_table(p)[u]
    v = np.arange(p)[:, None]
    if form == "quotient":
        M = K[u][None, :] * L[(v * ubar[None, :]) % p]
    elif form == "product":
        M = K[(v * u[None, :]) % p] * L[ubar][None, :]
        M[0] = K[u] * L[0]
    else:
        raise ValueError(form)
    return M.sum(axis=1) / math.sqrt(p)


def finite_fourier(K: np.ndarray) -> np.ndarray:
    """Khat(v) = p^{-1/2} sum_a K(a) e(a v / p)."""
    p = len(K)
    a = np.arange(p)
    E = additive_char_table(p)[np.outer(a, a) % p]
    return (E @ K) / math.sqrt(p)


def l_hat_closed_form(alpha: int, beta: int, v: int, chi1: DirichletCharacter) -> complex:
    """sqrt(p)/tau(chi1) * chi1(v/beta) * Kl2(alpha v / beta)."""
    p = chi1.modulus
    bbar = _unit_inverse(beta, p)
    tau = gauss_sum(chi1).value
    return math.sqrt(p) / tau * chi1(bbar * v) * kl2_normalized(bbar * alpha * v, p)


def _unit_inverse(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise NonInvertible(f"0 is not a unit mod {p}")
    return pow(a, -1, p)


@dataclass(frozen=True)
class TraceFunctionParams:
    """Parameters of K(v) = Kl2(gamma v), L = L_{alpha,beta} and a primed copy,
    plus the additive shift eta."""

    chi1: DirichletCharacter
    alpha: int
    beta: int
    gamma: int
    alpha2: int
    beta2: int
    gamma2: int
    eta: int = 0

    @property
    def p(self) -> int:
        return self.chi1.modulus

    def primed(self) -> "TraceFunctionParams":
        return replace(
            self,
            alpha=self.alpha2,
            beta=self.beta2,
            gamma=self.gamma2,
            alpha2=self.alpha,
            beta2=self.beta,
            gamma2=self.gamma,
        )

    def check_units(self) -> None:
        for name in ("alpha", "beta", "gamma", "alpha2", "beta2", "gamma2"):
            if getattr(self, name) % self.p == 0:
                raise NonInvertible(f"{name} is not a unit mod {self.p}")

    def is_degenerate(self) -> bool:
        """Residue test alpha = alpha' and beta gamma = beta' gamma' (mod p):
        then Z and Z' coincide and the correlation at eta = 0 is of size p."""
        p = self.p
        return (self.alpha - self.alpha2) % p == 0 and (
            self.beta * self.gamma - self.beta2 * self.gamma2
        ) % p == 0


def k_table(gamma: int, p: int) -> np.ndarray:
    return kl2_table(p)[(gamma * np.arange(p)) % p].astype(complex)


def convolution_table(tp: TraceFunctionParams) -> np.ndarray:
    """v -> (K * L)(v) with K = Kl2(gamma .), L = L_{alpha, beta}."""
    p = tp.p
    return mult_convolution(k_table(tp.gamma, p), l_table(tp.alpha, tp.beta, p, tp.chi1))


def z_definitional(tp: TraceFunctionParams) -> np.ndarray:
    return finite_fourier(convolution_table(tp))


def z_transform(tp: TraceFunctionParams) -> np.ndarray:
    """Closed form Z(v) = tau(chi1)^{-1} sum_{u != 0} Kl2(beta gamma u) chi1(uv) Kl2(alpha uv)."""
    tp.check_units()
    p = tp.p
    kl = kl2_table(p)
    u = np.arange(1, p)
    v = np.arange(p)[:, None]
    uv = (u[None, :] * v) % p
    M = kl[(tp.beta * tp.gamma * u) % p][None, :] * tp.chi1.values[uv] * kl[(tp.alpha * uv) % p]
    return M.sum(axis=1) / gauss_sum(tp.chi1).value


def shifted_correlation(F: np.ndarray, G: np.ndarray) -> np.ndarray:
    """eta -> sum_v F(v) conj(G(v - eta)), for every eta mod p."""
    p = len(F)
    v = np.arange(p)
    idx = (v[None, :] - v[:, None]) % p
    return (F[None, :] * np.conj(G[idx])).sum(axis=1)


def plancherel_shift(tp: TraceFunctionParams) -> tuple[complex, complex]:
    """Both sides of
    sum_v (K*L)(v) conj((K'*L')(v)) e(eta v/p) = sum_v Z(v) conj(Z'(v - eta))."""
    p = tp.p
    KL = convolution_table(tp)
    KL2 = convolution_table(tp.primed())
    phase = additive_char_table(p)[(tp.eta * np.arange(p)) % p]
    lhs = csum(KL * np.conj(KL2) * phase)
    rhs = complex(shifted_correlation(z_transform(tp), z_transform(tp.primed()))[tp.eta % p])
    return lhs, rhs


@dataclass(frozen=True)
class CancellationRow:
    p: int
    chi: int
    alpha: int
    beta: int
    gamma: int
    alpha2: int
    beta2: int
    gamma2: int
    eta: int
    value: complex
    degenerate: bool

    @property
    def ratio(self) -> float:
        return abs(self.value) / math.sqrt(self.p)

    CSV_HEADER = (
        "M1,chi,alpha,beta,gamma,alpha2,beta2,gamma2,eta,degenerate,"
        "value_re,value_im,abs,ratio_to_sqrtM1"
    )

    def csv(self) -> str:
        return (
            f"{self.p},{self.chi},{self.alpha},{self.beta},{self.gamma},"
            f"{self.alpha2},{self.beta2},{self.gamma2},{self.eta},{int(self.degenerate)},"
            f"{self.value.real:.12e},{self.value.imag:.12e},{abs(self.value):.12e},"
            f"{self.ratio:.12e}"
        )


def cancellation_rows(tp: TraceFunctionParams) -> list[CancellationRow]:
    """One row per eta mod p for the correlation sum of Z against Z'."""
    corr = shifted_correlation(z_transform(tp), z_transform(tp.primed()))
    deg = tp.is_degenerate()
    chi = tp.chi1.label[1] if len(tp.chi1.label) > 1 else -1
    return [
        CancellationRow(
            tp.p, chi, tp.alpha, tp.beta, tp.gamma, tp.alpha2, tp.beta2, tp.gamma2,
            eta, complex(corr[eta]), deg,
        )
        for eta in range(tp.p)
    ]
