"""Chebyshev polynomials, random-walk weights and truncated power polynomials.

Coefficients are computed in exact rational arithmetic and only then rounded
to doubles.  Degrees of several hundred have monomial coefficients near 2^k,
so evaluation goes through the Chebyshev-basis coefficients (Clenshaw) when a
polynomial carries them; Horner on the monomial form is used otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as npcheb

from locconc.errors import InvalidInputError
from locconc.pauli import is_hermitian


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple[float, ...]
    cheb: tuple[float, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        while len(c) > 1 and c[-1] == 0.0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c or (0.0,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.cheb is not None:
            return npcheb.chebval(x, self.cheb)
        return horner(self.coeffs, x)


def horner(coeffs, x):
    out = np.zeros_like(np.asarray(x, dtype=float))
    for c in reversed(coeffs):
        out = out * x + c
    return out


@lru_cache(maxsize=None)
def chebyshev_exact(k: int) -> tuple[Fraction, ...]:
    """Monomial coefficients of T_k from the closed-form sum, exactly."""
    if k < 0:
        raise InvalidInputError("degree must be nonnegative")
    if k == 0:
        return (Fraction(1),)
    out = [Fraction(0)] * (k + 1)
    for r in range(k // 2 + 1):
        out[k - 2 * r] = Fraction(k, 2) * Fraction((-1) ** r, k - r) * math.comb(k - r, r) * 2 ** (k - 2 * r)
    return tuple(out)


def chebyshev(k: int) -> Polynomial:
    cheb = tuple([0.0] * k + [1.0])
    return Polynomial(tuple(float(c) for c in chebyshev_exact(k)), cheb=cheb)


def chebyshev_abs_coeff_sum(k: int) -> float:
    return float(sum(abs(c) for c in chebyshev_exact(k)))


@dataclass(frozen=True)
class WalkWeights:
    s: int
    p: tuple[float, ...]


@lru_cache(maxsize=None)
def walk_weights_exact(s: int) -> tuple[Fraction, ...]:
    """p_{s,k}: probability an s-step +-1 walk from 0 ends at +k or -k."""
    if s < 0:
        raise InvalidInputError("step count must be nonnegative")
    total = 1 << s
    out = []
    for k in range(s + 1):
        if (s - k) % 2:
            out.append(Fraction(0))
            continue
        ways = math.comb(s, (s + k) // 2)
        out.append(Fraction(ways if k == 0 else 2 * ways, total))
    return tuple(out)


def walk_weights(s: int) -> WalkWeights:
    return WalkWeights(s, tuple(float(p) for p in walk_weights_exact(s)))


def power_poly(s: int, a: int) -> Polynomial:
    """P_{s,a} = sum_{k<=a} p_{s,k} T_k, the degree-a stand-in for x^s."""
    if not 0 <= a <= s:
        raise InvalidInputError(f"need 0 <= a <= s, got a={a}, s={s}")
    p = walk_weights_exact(s)
    mono = [Fraction(0)] * (a + 1)
    for k in range(a + 1):
        if p[k]:
            for j, c in enumerate(chebyshev_exact(k)):
                mono[j] += p[k] * c
    return Polynomial(tuple(float(c) for c in mono), cheb=tuple(float(v) for v in p[: a + 1]))


def apply_poly_spectrum(poly: Polynomial, eigvals) -> np.ndarray:
    return poly(np.asarray(eigvals, dtype=float))


def taylor_exp(h: np.ndarray, d: int) -> np.ndarray:
    """Degree-d truncation of the Taylor series of exp(-iH)."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidInputError("expected a square matrix")
    if d < 0:
        raise InvalidInputError("degree must be nonnegative")
    if not is_hermitian(h):
        raise InvalidInputError("H must be Hermitian")
    step = -1j * h
    term = np.eye(h.shape[0], dtype=complex)
    out = term.copy()
    for m in range(1, d + 1):
        term = term @ step / m
        out += term
    return out


def taylor_tail_bound(d: int, norm_h: float) -> float:
    """exp(-(d - e||H||)); valid as an error bound when d >= e||H||."""
    return math.exp(-(d - math.e * norm_h))
