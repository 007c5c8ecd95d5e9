"""Modular arithmetic primitives.

Everything here works on plain Python ints; numpy only appears in the
vectorised helpers (`additive_char_table`, `csum`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import NonInvertible

TWO_PI = 2.0 * math.pi


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation of |n| as ((p, k), ...) with p increasing."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def moebius(n: int) -> int:
    f = factorize(n)
    if any(k > 1 for _, k in f):
        return 0
    return -1 if len(f) % 2 else 1


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, k in factorize(n):
        ds = [d * p**j for d in ds for j in range(k + 1)]
    return sorted(ds)


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


def mod_inverse(a: int, q: int) -> int:
    """Inverse of a modulo q, in [0, q).  Modulus 1 maps everything to 0."""
    if q == 1:
        return 0
    if math.gcd(a, q) != 1:
        raise NonInvertible(f"{a} is not invertible mod {q}")
    return pow(a, -1, q)


def units(q: int) -> list[int]:
    if q == 1:
        return [0]
    return [a for a in range(q) if math.gcd(a, q) == 1]


@lru_cache(maxsize=1024)
def inverse_table(q: int) -> np.ndarray:
    """inv[a] = a^{-1} mod q for units a, -1 elsewhere."""
    inv = np.full(q, -1, dtype=np.int64)
    for a in units(q):
        inv[a] = mod_inverse(a, q)
    return inv


def additive_char(x: int, q: int) -> complex:
    """e(x/q) = exp(2 pi i x / q), with x reduced mod q first."""
    x %= q
    return complex(math.cos(TWO_PI * x / q), math.sin(TWO_PI * x / q))


@lru_cache(maxsize=1024)
def additive_char_table(q: int) -> np.ndarray:
    """Table of e(k/q) for k = 0..q-1."""
    k = np.arange(q)
    tab = np.exp(1j * TWO_PI * k / q)
    # keep the obvious exact values exact
    tab[0] = 1.0
    if q % 2 == 0:
        tab[q // 2] = -1.0
    if q % 4 == 0:
        tab[q // 4] = 1j
        tab[3 * q // 4] = -1j
    return tab


def csum(values: Iterable[complex] | np.ndarray) -> complex:
    """Compensated complex sum (exactly rounded on each component)."""
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
    arr = arr.ravel()
    return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))


class ComplexAccumulator:
    """Neumaier-compensated running sum of complex numbers."""

    __slots__ = ("_re", "_im", "_cre", "_cim")

    def __init__(self) -> None:
        self._re = self._im = self._cre = self._cim = 0.0

    @staticmethod
    def _step(s: float, c: float, x: float) -> tuple[float, float]:
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        return t, c

    def add(self, z: complex) -> None:
        self._re, self._cre = self._step(self._re, self._cre, z.real)
        self._im, self._cim = self._step(self._im, self._cim, z.imag)

    @property
    def value(self) -> complex:
        return complex(self._re + self._cre, self._im + self._cim)


@dataclass(frozen=True)
class FactoredModulus:
    """A modulus M = M1 * M2 with M1, M2 distinct primes."""

    M1: int
    M2: int
    M: int = field(init=False)

    def __post_init__(self) -> None:
        from .errors import NonCoprimeModuli, NotPrime

        for p in (self.M1, self.M2):
            if not is_prime(p):
                raise NotPrime(f"{p} is not prime")
        if self.M1 == self.M2:
            raise NonCoprimeModuli(f"M1 = M2 = {self.M1}")
        object.__setattr__(self, "M", self.M1 * self.M2)

    def crt(self, r1: int, r2: int) -> int:
        """The residue mod M that is r1 mod M1 and r2 mod M2."""
        return crt_pair(r1, self.M1, r2, self.M2)

    def split(self, x: int) -> tuple[int, int]:
        return x % self.M1, x % self.M2


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    if math.gcd(m1, m2) != 1:
        from .errors import NonCoprimeModuli

        raise NonCoprimeModuli(f"gcd({m1}, {m2}) != 1")
    t = ((r2 - r1) * mod_inverse(m1 % m2, m2)) % m2 if m2 > 1 else 0
    return (r1 + m1 * t) % (m1 * m2)


def moebius_divisor_scan(q: int) -> list[tuple[int, int]]:
    """All (d, mu(q/d)) for d | q, in increasing d."""
    return [(d, moebius(q // d)) for d in divisors(q)]
