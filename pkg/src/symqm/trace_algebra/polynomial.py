"""Fast action of trace operators on pure-creation states.

A pure-creation state ``f(a^dagger)|0>`` is a polynomial in the bricks
``P_k = tr(a^dagger^k)``. In the Bargmann picture ``a^dagger_A -> x_A`` and
``a_A -> d/dx_A``, so ``tr(a^k)`` acts as a k-th order differential operator.
We apply it one letter at a time on matrix-valued intermediates of the form
``(prod of traces) * X^m`` with ``X = sum_A x_A T_A`` and
``sum_A (T_A)_ij (T_A)_kl = (delta_il delta_jk - delta_ij delta_kl / N) / 2``.
"""

from __future__ import annotations

from fractions import Fraction

from .newton import Poly, poly_add, poly_mul, reduce_poly, single_trace


def _insert(traces: tuple, t: int, n: int):
    """Multiply a trace tuple by ``tr(X^t)``; returns (factor, traces) or None."""
    if t == 0:
        return n, traces
    if t == 1:
        return None
    return 1, tuple(sorted(traces + (t,)))


def _remove_one(traces: tuple, t: int) -> tuple:
    i = traces.index(t)
    return traces[:i] + traces[i + 1:]


def _step(state: dict, n: int) -> dict:
    # G -> sum_A T_A dG/dx_A
    out: dict = {}
    half = Fraction(1, 2)
    inv = Fraction(1, 2 * n)

    def push(key, c):
        v = out.get(key, 0) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)

    for (traces, m), c in state.items():
        # derivative of the open power X^m
        if m:
            for r in range(m):
                hit = _insert(traces, r, n)
                if hit is not None:
                    push((hit[1], m - 1 - r), c * half * hit[0])
            push((traces, m - 1), -c * m * inv)
        # derivative of each trace factor tr(X^t)
        for t in sorted(set(traces)):
            mult = traces.count(t)
            rest = _remove_one(traces, t)
            push((rest, t - 1 + m), c * mult * t * half)
            hit = _insert(rest, t - 1, n)
            if hit is not None:
                push((hit[1], m), -c * mult * t * inv * hit[0])
    return out


def annihilate(k: int, poly: Poly, n: int, reduce: bool = True) -> Poly:
    """Apply ``tr(a^k)`` to the state ``poly(P)|0>``.

    Parameters
    ----------
    k : int
        Number of annihilation letters in the trace.
    poly : dict
        Map from sorted tuples of brick powers to coefficients.
    n : int
        Rank of SU(n).
    reduce : bool
        Apply the Cayley-Hamilton reduction to the result.
    """
    if k == 0:
        out = poly_mul(single_trace(0, n), poly)
    else:
        state = {(key, 0): c for key, c in poly.items()}
        for _ in range(k):
            state = _step(state, n)
        out = {}
        for (traces, m), c in state.items():
            hit = _insert(traces, m, n)
            if hit is not None:
                poly_add(out, {hit[1]: c * hit[0]})
    return reduce_poly(out, n) if reduce else out


def create(k: int, poly: Poly, n: int, reduce: bool = True) -> Poly:
    """Multiply the state by ``tr(a^dagger^k)``."""
    out = poly_mul(single_trace(k, n), poly)
    return reduce_poly(out, n) if reduce else out


def partition_poly(p) -> Poly:
    """Monomial ``prod_k P_k^{p_k}`` for ``p = (p2, p3, ...)``."""
    key = []
    for k, pk in enumerate(p, start=2):
        key.extend([k] * pk)
    return {tuple(key): Fraction(1)}


def poly_to_partitions(poly: Poly, n: int) -> dict:
    """Re-index a reduced polynomial by partitions ``(p2, ..., pn)``."""
    out = {}
    for key, c in poly.items():
        p = [0] * (n - 1)
        for k in key:
            if not 2 <= k <= n:
                raise ValueError(f"unreduced trace power {k} for N={n}")
            p[k - 2] += 1
        out[tuple(p)] = c
    return out
