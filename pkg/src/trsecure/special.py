"""Finite Lah-number series for the modified Bessel function of the second kind.

    K_v(x) ~= sum_{q=0..D} sum_{l=0..D} psi(v, l, q) exp(-x) x**(q - v)

    psi(v, l, q) = (-1)**q sqrt(pi) G(2v) G(1/2 + l - v) L(l, q)
                   / (2**(v - q) G(1/2 - v) G(1/2 + l + v) l!)

G is the Gamma function and L(l, q) the (unsigned) Lah number.  The
half-integer Gammas take negative arguments, so everything is evaluated as
a sign plus a log-magnitude.

The truncated series is accurate for moderate arguments only: it behaves
like a polynomial of degree D in x times exp(-x) x**-v, so for fixed D it
drifts away from K_v once x grows past roughly v (and it never settles for
orders 1 and 2).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

_LOG_PI = math.log(math.pi)
_LOG2 = math.log(2.0)


def lah(l: int, q: int) -> int:
    """Unsigned Lah number L(l, q), exact.

    L(0, 0) = 1, L(l, 0) = 0 for l > 0, L(0, q) = 0 for q > 0, L(l, 1) = l!,
    and C(l-1, q-1) l!/q! in general.
    """
    if l < 0 or q < 0:
        raise ValueError("Lah numbers need nonnegative arguments")
    if l == 0 and q == 0:
        return 1
    if l == 0 or q == 0 or q > l:
        return 0
    return math.comb(l - 1, q - 1) * math.factorial(l) // math.factorial(q)


def log_lah(l: int, q: int) -> float:
    """log L(l, q); -inf where the number vanishes."""
    if l < 0 or q < 0:
        raise ValueError("Lah numbers need nonnegative arguments")
    if l == 0 and q == 0:
        return 0.0
    if l == 0 or q == 0 or q > l:
        return -math.inf
    return (
        math.lgamma(l) - math.lgamma(q) - math.lgamma(l - q + 1)
        + math.lgamma(l + 1) - math.lgamma(q + 1)
    )


def gamma_half_integer(m: int) -> tuple[int, float]:
    """Gamma(m + 1/2) for integer m as (sign, log|value|).

    Negative arguments go through the reflection
    Gamma(1/2 - k) = (-1)**k pi / Gamma(1/2 + k).
    """
    if m >= 0:
        return 1, math.lgamma(m + 0.5)
    k = -m
    return (-1) ** k, _LOG_PI - math.lgamma(k + 0.5)


def psi(order: int, l: int, q: int) -> float:
    if order < 1:
        raise ValueError("order must be >= 1")
    ll = log_lah(l, q)
    if ll == -math.inf:
        return 0.0
    s_num, lg_num = gamma_half_integer(l - order)
    s_den, lg_den = gamma_half_integer(-order)
    log_mag = (
        0.5 * _LOG_PI + math.lgamma(2 * order) + lg_num + ll
        - (order - q) * _LOG2 - lg_den - math.lgamma(0.5 + l + order) - math.lgamma(l + 1)
    )
    sign = (-1) ** q * s_num * s_den
    return sign * math.exp(log_mag)


@lru_cache(maxsize=None)
def _power_coefficients(order: int, terms: int) -> tuple[float, ...]:
    # c_q = sum_l psi(order, l, q); cached tuple is immutable, safe to share
    return tuple(
        math.fsum(psi(order, l, q) for l in range(terms + 1)) for q in range(terms + 1)
    )


def bessel_k_approx(order: int, x, terms: int = 20):
    """Series approximation of K_order(x) for x > 0 with ``terms`` = D."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("x must be > 0")
    c = np.array(_power_coefficients(order, terms))
    powers = np.arange(terms + 1) - order
    out = np.exp(-x[..., None]) * (c * x[..., None] ** powers)
    out = out.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def const_a(bor: int, terms: int = 20) -> float:
    """Useful-energy constant of the eavesdropper SINR bound.

    A = sum_{q,l} psi(U-1, l, q) Gamma(q+4) / (U^2 (U-1)! 2^(U+3)); in the
    exact-Bessel limit 4*A*U = 1.
    """
    if bor < 2:
        raise ValueError("bor must be >= 2")
    c = _power_coefficients(bor - 1, terms)
    total = math.fsum(cq * math.factorial(q + 3) for q, cq in enumerate(c))
    return total / (bor**2 * math.factorial(bor - 1) * 2 ** (bor + 3))
