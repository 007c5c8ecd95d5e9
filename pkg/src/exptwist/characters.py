"""Dirichlet characters modulo primes and products of two distinct primes.

A character mod p is fixed by where it sends the smallest primitive root g:
chi_j(g^k) = exp(2 pi i j k / (p - 1)).  The label (p, j) is what reports use
to name a character.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import additive_char_table, csum, factorize, is_prime
from .errors import NonCoprimeModuli, NotPrime, NotPrimitive


@lru_cache(maxsize=256)
def primitive_root(p: int) -> int:
    """Smallest primitive root mod the prime p."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p == 2:
        return 1
    prime_factors = [f for f, _ in factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in prime_factors):
            return g
    raise AssertionError("unreachable")


@lru_cache(maxsize=256)
def discrete_log_table(p: int) -> np.ndarray:
    """log[x] = k with g^k = x mod p for units x; -1 at 0."""
    g = primitive_root(p)
    log = np.full(p, -1, dtype=np.int64)
    x = 1
    for k in range(p - 1):
        log[x] = k
        x = x * g % p
    return log


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    modulus: int
    values: np.ndarray = field(repr=False)
    is_primitive: bool
    order: int
    label: tuple = ()

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])

    def at(self, n) -> np.ndarray:
        """Vectorised evaluation on an integer array."""
        return self.values[np.mod(n, self.modulus)]

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(
            self.modulus,
            np.conj(self.values),
            self.is_primitive,
            self.order,
            self.label + ("conj",),
        )

    @property
    def is_principal(self) -> bool:
        return self.order == 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DirichletCharacter)
            and self.modulus == other.modulus
            and np.allclose(self.values, other.values, atol=1e-12)
        )

    def __hash__(self) -> int:
        return hash((self.modulus, self.label))


def _character_mod_prime(p: int, j: int) -> DirichletCharacter:
    log = discrete_log_table(p)
    vals = np.zeros(p, dtype=complex)
    unit = log >= 0
    phase = (j * log[unit]) % (p - 1)
    vals[unit] = np.exp(2j * math.pi * phase / (p - 1))
    # snap real/imaginary unit values so that quadratic characters are exact
    vals[unit] = np.where(phase == 0, 1.0, vals[unit])
    if (p - 1) % 2 == 0:
        vals[unit] = np.where(2 * phase == p - 1, -1.0, vals[unit])
    order = (p - 1) // math.gcd(j, p - 1)
    return DirichletCharacter(p, vals, order > 1, order, (p, j))


def enumerate_characters(p: int) -> list[DirichletCharacter]:
    """All p - 1 characters mod p, principal first."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p == 2:
        return [DirichletCharacter(2, np.array([0, 1], dtype=complex), False, 1, (2, 0))]
    return [_character_mod_prime(p, j) for j in range(p - 1)]


def primitive_characters(p: int) -> list[DirichletCharacter]:
    return [chi for chi in enumerate_characters(p) if chi.is_primitive]


def character(p: int, j: int) -> DirichletCharacter:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    return _character_mod_prime(p, j % (p - 1))


def product_character(chi1: DirichletCharacter, chi2: DirichletCharacter) -> DirichletCharacter:
    q1, q2 = chi1.modulus, chi2.modulus
    if math.gcd(q1, q2) != 1:
        raise NonCoprimeModuli(f"gcd({q1}, {q2}) != 1")
    n = np.arange(q1 * q2)
    vals = chi1.values[n % q1] * chi2.values[n % q2]
    order = chi1.order * chi2.order // math.gcd(chi1.order, chi2.order)
    return DirichletCharacter(
        q1 * q2,
        vals,
        chi1.is_primitive and chi2.is_primitive,
        order,
        (chi1.label, chi2.label),
    )


@dataclass(frozen=True)
class GaussSumValue:
    character: DirichletCharacter
    value: complex

    def __complex__(self) -> complex:
        return self.value


def gauss_sum(chi: DirichletCharacter) -> GaussSumValue:
    """tau(chi) = sum_{x mod q} chi(x) e(x/q)."""
    q = chi.modulus
    return GaussSumValue(chi, csum(chi.values * additive_char_table(q)))


def fourier_expand_check(chi: DirichletCharacter, m: int) -> tuple[complex, complex]:
    """Return (chi(m), tau(conj chi)^{-1} sum_c conj chi(c) e(cm/q))."""
    if not chi.is_primitive:
        raise NotPrimitive(f"character {chi.label} is not primitive")
    q = chi.modulus
    c = np.arange(q)
    e = additive_char_table(q)[(c * m) % q]
    cbar = np.conj(chi.values)
    rhs = csum(cbar * e) / gauss_sum(chi.conj()).value
    return chi(m), rhs
