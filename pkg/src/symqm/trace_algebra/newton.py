"""Trace identities for traceless N x N matrices.

Polynomials in the power sums ``p_k = tr(X^k)`` are stored as dicts mapping a
sorted tuple of exponents ``(k1, k2, ...)`` (one entry per factor) to an exact
``Fraction``. For a traceless matrix ``p_1 = 0``; Newton's identities then fix
every ``p_k`` with ``k > N`` as a polynomial in ``p_2, ..., p_N``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

Poly = dict  # tuple[int, ...] -> Fraction


def poly_add(acc: Poly, other: Poly, scale=1) -> Poly:
    """In-place ``acc += scale * other``; zero coefficients are removed."""
    for key, c in other.items():
        v = acc.get(key, 0) + scale * c
        if v:
            acc[key] = v
        else:
            acc.pop(key, None)
    return acc


def poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            key = tuple(sorted(ka + kb))
            v = out.get(key, 0) + ca * cb
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def single_trace(k: int, n: int) -> Poly:
    """``tr(X^k)`` before reduction, with ``tr(X^0) = n`` and ``tr(X) = 0``."""
    if k == 0:
        return {(): Fraction(n)}
    if k == 1:
        return {}
    return {(k,): Fraction(1)}


@lru_cache(maxsize=None)
def _elementary(i: int, n: int) -> tuple:
    # k e_k = sum_{j=1}^k (-1)^{j-1} e_{k-j} p_j, with p_1 = 0
    if i == 0:
        return (((), Fraction(1)),)
    acc: Poly = {}
    for j in range(2, i + 1):
        term = poly_mul(dict(_elementary(i - j, n)), dict(_power_sum(j, n)))
        poly_add(acc, term, Fraction((-1) ** (j - 1), i))
    return tuple(sorted(acc.items()))


@lru_cache(maxsize=None)
def _power_sum(k: int, n: int) -> tuple:
    if k <= n:
        return tuple(sorted(single_trace(k, n).items()))
    acc: Poly = {}
    for i in range(1, n + 1):
        term = poly_mul(dict(_elementary(i, n)), dict(_power_sum(k - i, n)))
        poly_add(acc, term, (-1) ** (i - 1))
    return tuple(sorted(acc.items()))


def power_sum(k: int, n: int) -> Poly:
    """``tr(X^k)`` for traceless ``n x n`` X as a polynomial in ``p_2..p_n``.

    Examples
    --------
    >>> power_sum(4, 3)
    {(2, 2): Fraction(1, 2)}
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if k < 0:
        raise ValueError("negative power")
    return dict(_power_sum(k, n))


def elementary_symmetric(i: int, n: int) -> Poly:
    """Elementary symmetric polynomial ``e_i`` of the eigenvalues, via power sums."""
    return dict(_elementary(i, n))


def reduce_poly(poly: Poly, n: int) -> Poly:
    """Rewrite every factor ``p_k`` with ``k > n`` (or ``k < 2``) in reduced form."""
    out: Poly = {}
    for key, c in poly.items():
        if all(2 <= k <= n for k in key):
            poly_add(out, {key: c})
            continue
        term: Poly = {(): c}
        for k in key:
            term = poly_mul(term, power_sum(k, n))
            if not term:
                break
        poly_add(out, term)
    return out
