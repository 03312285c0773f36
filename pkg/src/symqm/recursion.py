"""Recursion relation for the Fock-basis amplitudes of an eigenstate.

Writing ``|psi> = sum_p a_p |p>``, the eigenvalue equation ``H|psi> = E|psi>``
becomes, row by row (after multiplying by -2),

    a_{p - e2} - (sum_k k p_k + (N^2-1)/2 - 2E) a_p + sum_q [(aa)]_{p <- q} a_q = 0,

where ``[(aa)]_{p <- q}`` is the coefficient of ``|p>`` in ``(aa)|q>``. The
lowering coefficients come from a closed formula in the bricks
``P_k = tr(a^dagger^k)`` (with ``P_0 = N``, ``P_1 = 0``):

    (aa) f = sum_i p_i (i/4) [sum_{r=0}^{i-2} P_r P_{i-2-r} - (i-1)/N P_{i-2}] f / P_i
           + sum_{i,j} p_i (p_j - delta_ij) (ij/4) [P_{i+j-2} - P_{i-1} P_{j-1} / N] f / (P_i P_j)

followed by Cayley-Hamilton reduction. This is independent of the
derivative kernel used for matrix assembly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .fock_basis import Partition, enumerate_basis
from .trace_algebra.newton import poly_add, poly_mul, reduce_poly, single_trace
from .trace_algebra.polynomial import partition_poly, poly_to_partitions


def _divide(p: tuple, ks) -> tuple | None:
    key = list(p)
    for k in ks:
        if k not in key:
            return None
        key.remove(k)
    return tuple(key)


@lru_cache(maxsize=None)
def _lowering_formula(p: tuple, n: int) -> tuple:
    (key, _), = partition_poly(p).items()
    counts = {k: key.count(k) for k in set(key)}
    acc: dict = {}
    for i, pi in counts.items():
        inner: dict = {}
        for r in range(i - 1):
            poly_add(inner, poly_mul(single_trace(r, n), single_trace(i - 2 - r, n)))
        poly_add(inner, single_trace(i - 2, n), Fraction(-(i - 1), n))
        rest = {_divide(key, [i]): Fraction(1)}
        poly_add(acc, poly_mul(inner, rest), Fraction(i * pi, 4))
    for i, pi in counts.items():
        for j, pj in counts.items():
            mult = pi * (pj - (1 if i == j else 0))
            if mult == 0:
                continue
            inner = dict(single_trace(i + j - 2, n))
            poly_add(inner, poly_mul(single_trace(i - 1, n), single_trace(j - 1, n)), Fraction(-1, n))
            rest = {_divide(key, [i, j]): Fraction(1)}
            poly_add(acc, poly_mul(inner, rest), Fraction(mult * i * j, 4))
    return tuple(sorted(poly_to_partitions(reduce_poly(acc, n), n).items()))


def lowering_action(p, n: int | None = None) -> dict:
    """``(aa)|p>`` from the closed formula, as ``{partition: coefficient}``."""
    p = Partition(p)
    n = p.n if n is None else n
    return {Partition(q): c for q, c in _lowering_formula(tuple(p), n)}


@lru_cache(maxsize=None)
def _incoming(n: int, quanta: int) -> dict:
    """Map ``p -> [(q, coeff)]`` for all ``q`` with ``quanta + 2`` quanta."""
    out: dict = {}
    for q in enumerate_basis(n, quanta + 2):
        if q.quanta != quanta + 2:
            continue
        for p, c in lowering_action(q, n).items():
            out.setdefault(p, []).append((q, c))
    return out


def recursion_terms(p, n: int, E) -> list:
    """``[(coefficient, partition)]`` of the recursion row at ``p``."""
    p = Partition(p)
    terms = []
    down = p.shifted(2, -1)
    if down is not None:
        terms.append((Fraction(1), down))
    diag = p.quanta + Fraction(n * n - 1, 2) - 2 * E
    terms.append((-diag, p))
    for q, c in _incoming(n, p.quanta).get(p, []):
        terms.append((c, q))
    return terms


def recursion_row(coeffs: dict, p, n: int, E):
    """Left side of the recursion at ``p``; missing amplitudes count as zero."""
    total = 0
    for c, q in recursion_terms(p, n, E):
        a = coeffs.get(q, 0)
        if a:
            total = total + c * a
    return total


def _rows(n: int, ncut: int, where: str):
    rows = list(enumerate_basis(n, ncut))
    if where == "all":
        return rows
    if where == "interior":
        return [p for p in rows if p.quanta <= ncut - 2]
    if where == "boundary":
        return [p for p in rows if p.quanta > ncut - 2]
    raise ValueError(f"unknown row selection {where!r}")


def recursion_residuals(coeffs: dict, n: int, ncut: int, E, where: str = "all") -> dict:
    """Residual of every selected row, keyed by partition."""
    coeffs = {Partition(k): v for k, v in coeffs.items()}
    return {p: recursion_row(coeffs, p, n, E) for p in _rows(n, ncut, where)}


def recursion_residual(coeffs: dict, n: int, ncut: int, E, where: str = "interior",
                       relative: bool = False) -> float:
    """Largest absolute row residual of the recursion.

    Parameters
    ----------
    coeffs : dict
        Amplitudes keyed by partition; absent entries are zero.
    where : {"interior", "boundary", "all"}
        Interior rows (at most ``ncut - 2`` quanta) involve only amplitudes
        inside the cut basis.
    relative : bool
        Divide by the largest row scale, the sum of term magnitudes in a row.
    """
    coeffs = {Partition(k): v for k, v in coeffs.items()}
    worst = 0.0
    top = 0.0
    for p in _rows(n, ncut, where):
        terms = recursion_terms(p, n, E)
        val = 0
        scale = 0.0
        for c, q in terms:
            a = coeffs.get(q, 0)
            if a:
                val = val + c * a
                scale += abs(float(c) * float(a))
        worst = max(worst, abs(float(val)))
        top = max(top, scale)
    if relative:
        return worst / top if top else 0.0
    return worst
