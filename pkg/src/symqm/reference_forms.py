"""Literal transcriptions of published identities, kept as test oracles.

The engine never uses these to compute anything; they exist so that the
derived results can be compared with the forms in the literature term by
term. Where a transcription disagrees with the engine the engine is checked
against the dense oscillator oracle, which decides.
"""

from __future__ import annotations

from fractions import Fraction

from .trace_algebra import TraceExpr
from .trace_algebra.words import ANNIHILATE, CREATE


def _brick(k):
    return (CREATE,) * k


def _mixed(k):
    # (a^dagger^k a)
    return (CREATE,) * k + (ANNIHILATE,)


def _term(words, n, coeff):
    return TraceExpr.from_words(words, n, coeff=coeff, normal=True)


def published_aa_commutator(n_pow: int, n: int) -> TraceExpr:
    """``[(aa), (a^dagger^n)]`` as published.

    ``n (a^dagger^{n-1} a) + (nN/2)(1/2 - (n-1)/(2N^2)) (a^dagger^{n-2})
    + (n/4) sum_{j=2}^{n-4} (a^dagger^j)(a^dagger^{n-2-j})``
    """
    k = n_pow
    out = _term([_mixed(k - 1)], n, k)
    out = out + _term([_brick(k - 2)], n, Fraction(k * n, 2) * (Fraction(1, 2) - Fraction(k - 1, 2 * n * n)))
    for j in range(2, k - 3):
        out = out + _term([_brick(j), _brick(k - 2 - j)], n, Fraction(k, 4))
    return out


def published_aa_power_commutator(n_pow: int, m: int, n: int) -> TraceExpr:
    """``[(aa), (a^dagger^n)^m]`` as published."""
    k = n_pow
    rest2 = [_brick(k)] * (m - 2) if m >= 2 else None
    rest1 = [_brick(k)] * (m - 1)
    out = TraceExpr.zero(n)
    if rest2 is not None:
        out = out + _term(rest2 + [_brick(2 * k - 2)], n, Fraction(m * (m - 1) * k * k, 4))
        out = out + _term(rest2 + [_brick(k - 1), _brick(k - 1)], n, -Fraction(m * (m - 1) * k * k, 4 * n))
    out = out + _term(rest1 + [_mixed(k - 1)], n, m * k)
    out = out + _term([_brick(k - 2)] + rest1, n,
                      Fraction(m * k * n, 2) * (Fraction(1, 2) - Fraction(k - 1, 2 * n * n)))
    for j in range(2, k - 3):
        out = out + _term([_brick(j), _brick(k - 2 - j)] + rest1, n, Fraction(m * k, 4))
    return out


def published_mixed_commutator(n_pow: int, m_pow: int, k: int, n: int) -> TraceExpr:
    """``[(a^dagger^n a), (a^dagger^m)^k]`` as published."""
    rest = [_brick(m_pow)] * (k - 1)
    out = _term([_brick(n_pow + m_pow - 1)] + rest, n, Fraction(k * m_pow, 2))
    out = out + _term([_brick(n_pow), _brick(m_pow - 1)] + rest, n, -Fraction(k * m_pow, 2 * n))
    return out


def _get(coeffs, *p):
    if any(x < 0 for x in p):
        return 0
    return coeffs.get(tuple(p), 0)


def published_su3_recursion(coeffs: dict, p, E):
    """Row ``(p2, p3)`` of the published SU(3) recursion."""
    p2, p3 = p
    a = lambda *q: _get(coeffs, *q)  # noqa: E731
    return (a(p2 - 1, p3)
            - (2 * p2 + 3 * p3 + 4 - 2 * E) * a(p2, p3)
            + (p2 + 1) * (p2 + 3 * p3 + 4) * a(p2 + 1, p3)
            + Fraction(3, 8) * (p3 + 1) * (p3 + 2) * a(p2 - 2, p3 + 2))


def published_su4_recursion(coeffs: dict, p, E):
    """Row ``(p2, p3, p4)`` of the published SU(4) recursion."""
    p2, p3, p4 = p
    a = lambda *q: _get(coeffs, *q)  # noqa: E731
    c = Fraction(15, 2)
    return (a(p2 - 1, p3, p4)
            - (2 * p2 + 3 * p3 + 4 * p4 + c - 2 * E) * a(p2, p3, p4)
            + (p2 + 1) * (p2 + 3 * p3 + 4 * p4 + c) * a(p2 + 1, p3, p4)
            + (5 * p3 * (p4 + 1) - Fraction(3, 2) + 3 * p4 * (p4 + 1) + Fraction(13, 4) * (p4 + 1))
            * a(p2 - 1, p3, p4 + 1)
            + Fraction(1, 3) * (p4 + 1) * (p4 + 2) * a(p2, p3 - 2, p4 + 2)
            - Fraction(1, 2) * (p4 + 1) * (p4 + 2) * a(p2 - 3, p3, p4 + 2)
            + Fraction(9, 4) * (p3 + 1) * (p3 + 2) * a(p2, p3 + 2, p4 - 1)
            - Fraction(9, 16) * (p3 + 1) * (p3 + 2) * a(p2 - 2, p3 + 2, p4))


def published_mixing_coefficient(n: int) -> Fraction:
    """Published coefficient of ``|n+3, 0, ...>`` in the ``{2, 0, ...}`` family."""
    return -Fraction(18, n) / (24 + 6 * (n * n - 1))
