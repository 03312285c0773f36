"""Cut gauge-invariant bosonic Fock basis and its exact Gram matrix.

A basis state is labelled by a partition ``p = (p2, ..., pN)`` and equals
``prod_k tr(a^dagger^k)^{p_k} |0>``. The cut basis keeps every state with
``sum_k k p_k <= ncut`` in graded order ``(quanta, p)``, so the basis for a
smaller cutoff is always a prefix of the basis for a larger one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .trace_algebra import TraceExpr, annihilate, partition_poly, poly_to_partitions
from .trace_algebra.words import CREATE


class BasisDegeneracyError(RuntimeError):
    """A fixed-quanta block of the Gram matrix is rank deficient."""


class Partition(tuple):
    """Occupation numbers ``(p2, ..., pN)`` of the bosonic bricks."""

    def __new__(cls, p):
        p = tuple(int(x) for x in p)
        if any(x < 0 for x in p):
            raise ValueError("occupation numbers must be non-negative")
        return super().__new__(cls, p)

    @property
    def n(self) -> int:
        return len(self) + 1

    @property
    def quanta(self) -> int:
        return sum(k * pk for k, pk in enumerate(self, start=2))

    @property
    def tail(self) -> tuple:
        """``(p3, ..., pN)``; the family label of the state."""
        return tuple(self[1:])

    @property
    def tail_weight(self) -> int:
        return sum(k * pk for k, pk in enumerate(self[1:], start=3))

    def shifted(self, k: int, delta: int) -> "Partition | None":
        """Change ``p_k`` by ``delta``; ``None`` if it would go negative."""
        q = list(self)
        q[k - 2] += delta
        if q[k - 2] < 0:
            return None
        return Partition(q)

    def __repr__(self):
        return f"Partition({tuple(self)})"


def _partitions(n: int, ncut: int):
    # all (p2..pn) with weighted sum <= ncut
    def rec(k, budget):
        if k > n:
            yield ()
            return
        for pk in range(budget // k + 1):
            for rest in rec(k + 1, budget - k * pk):
                yield (pk,) + rest

    return rec(2, ncut)


@dataclass(frozen=True)
class CutBasis:
    """All partitions with at most ``ncut`` quanta, in graded order."""

    n: int
    ncut: int
    states: tuple
    index: dict = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "index", {p: i for i, p in enumerate(self.states)})

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def position(self, p) -> int:
        return self.index[Partition(p)]

    def quanta(self) -> np.ndarray:
        return np.array([p.quanta for p in self.states], dtype=int)

    def blocks(self) -> dict:
        """Map quanta -> list of basis positions."""
        out: dict = {}
        for i, p in enumerate(self.states):
            out.setdefault(p.quanta, []).append(i)
        return out

    def truncate(self, ncut: int) -> "CutBasis":
        """Basis at a smaller cutoff (a prefix of this one)."""
        if ncut > self.ncut:
            raise ValueError("can only truncate to a smaller cutoff")
        return CutBasis(self.n, ncut, tuple(p for p in self.states if p.quanta <= ncut))


def enumerate_basis(n: int, ncut: int) -> CutBasis:
    """Enumerate the cut bosonic basis of SU(n).

    Examples
    --------
    >>> [tuple(p) for p in enumerate_basis(3, 4)]
    [(0, 0), (1, 0), (0, 1), (2, 0)]
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if ncut < 0:
        raise ValueError("ncut must be non-negative")
    states = sorted((Partition(p) for p in _partitions(n, ncut)), key=lambda p: (p.quanta, tuple(p)))
    return CutBasis(n, ncut, tuple(states))


def count_states(n: int, ncut: int) -> int:
    """Coefficient sum of ``prod_{k=2}^n 1/(1-x^k)`` up to ``x^ncut``."""
    coeffs = [1] + [0] * ncut
    for k in range(2, n + 1):
        for q in range(k, ncut + 1):
            coeffs[q] += coeffs[q - k]
    return sum(coeffs)


def state_expr(p, n: int | None = None) -> TraceExpr:
    """The pure-creation operator ``prod_k (a^dagger^k)^{p_k}`` (unreduced)."""
    p = Partition(p)
    n = p.n if n is None else n
    words = []
    for k, pk in enumerate(p, start=2):
        words.extend([(CREATE,) * k] * pk)
    return TraceExpr.from_words(words, n)


@lru_cache(maxsize=None)
def _lower(p: tuple, k: int, n: int) -> tuple:
    img = annihilate(k, partition_poly(p), n)
    return tuple(sorted(poly_to_partitions(img, n).items()))


def lowering_image(p, k: int, n: int | None = None) -> dict:
    """``tr(a^k)|p>`` expanded in basis partitions (exact)."""
    p = Partition(p)
    n = p.n if n is None else n
    return {Partition(q): c for q, c in _lower(tuple(p), k, n)}


class _GramCache:
    def __init__(self, n):
        self.n = n
        self.values: dict = {}

    def get(self, p: tuple, q: tuple) -> Fraction:
        key = (p, q)
        if key in self.values:
            return self.values[key]
        pp, qq = Partition(p), Partition(q)
        if pp.quanta != qq.quanta:
            val = Fraction(0)
        elif pp.quanta == 0:
            val = Fraction(1)
        else:
            # <p|q> = <p - e_k| tr(a^k) |q> with k the smallest brick in p
            k = next(i for i, x in enumerate(pp, start=2) if x)
            rest = tuple(pp.shifted(k, -1))
            val = Fraction(0)
            for r, c in _lower(tuple(qq), k, self.n):
                val += c * self.get(rest, r)
        self.values[key] = val
        return val


_GRAM_CACHES: dict = {}


def inner_product(p, q, n: int | None = None) -> Fraction:
    """Exact ``<p|q>``."""
    p, q = Partition(p), Partition(q)
    n = p.n if n is None else n
    cache = _GRAM_CACHES.setdefault(n, _GramCache(n))
    return cache.get(tuple(p), tuple(q))


@dataclass(frozen=True)
class GramMatrix:
    """Exact Gram matrix ``S[i][j] = <state_i|state_j>`` of a cut basis."""

    entries: tuple  # tuple of tuples of Fraction
    basis: CutBasis

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries])

    def is_symmetric(self) -> bool:
        m = len(self.entries)
        return all(self.entries[i][j] == self.entries[j][i] for i in range(m) for j in range(i))

    def block(self, quanta: int) -> list:
        idx = self.basis.blocks().get(quanta, [])
        return [[self.entries[i][j] for j in idx] for i in idx]


def gram_matrix(b: CutBasis) -> GramMatrix:
    """Exact Gram matrix of ``b``; block diagonal in the number of quanta.

    ``<p|q>`` is evaluated by peeling one brick off the bra,
    ``<p|q> = <p - e_k| tr(a^k)|q>``, and expanding ``tr(a^k)|q>`` in the
    basis with the derivative kernel of :mod:`symqm.trace_algebra`.
    """
    m = len(b)
    zero = Fraction(0)
    rows = [[zero] * m for _ in range(m)]
    for idx in b.blocks().values():
        for i in idx:
            for j in idx:
                rows[i][j] = inner_product(b[i], b[j], b.n)
    return GramMatrix(tuple(tuple(r) for r in rows), b)


def exact_rank(matrix) -> int:
    """Rank of a rational matrix by fraction-free (Bareiss) elimination."""
    rows = [list(r) for r in matrix]
    if not rows or not rows[0]:
        return 0
    # clear denominators row by row
    ints = []
    for r in rows:
        den = 1
        for x in r:
            den = math.lcm(den, Fraction(x).denominator)
        ints.append([int(Fraction(x) * den) for x in r])
    m, ncols = len(ints), len(ints[0])
    rank = 0
    prev = 1
    col = 0
    a = ints
    while rank < m and col < ncols:
        piv = next((r for r in range(rank, m) if a[r][col] != 0), None)
        if piv is None:
            col += 1
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(rank + 1, m):
            for c in range(col + 1, ncols):
                a[r][c] = (a[r][c] * a[rank][col] - a[r][col] * a[rank][c]) // prev
            a[r][col] = 0
        prev = a[rank][col]
        rank += 1
        col += 1
    return rank


def check_full_rank(s: GramMatrix) -> None:
    """Raise :class:`BasisDegeneracyError` if any fixed-quanta block is singular."""
    for q, idx in s.basis.blocks().items():
        blk = s.block(q)
        r = exact_rank(blk)
        if r != len(idx):
            raise BasisDegeneracyError(
                f"Gram block with {q} quanta has rank {r} < {len(idx)} (N={s.basis.n})")


def all_partitions_of(quanta: int, n: int):
    """Partitions with exactly ``quanta`` quanta, sorted."""
    return sorted(p for p in (Partition(x) for x in _partitions(n, quanta)) if p.quanta == quanta)
