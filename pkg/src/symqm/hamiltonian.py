"""Exact Hamiltonian matrices in the cut basis and their numerical spectra.

The Hamiltonian in matrix notation is
``H = (a^dagger a) + (N^2 - 1)/4 - (a^dagger a^dagger)/2 - (aa)/2``.
On a basis state the number operator is diagonal, ``(a^dagger a^dagger)``
adds one ``(a^dagger^2)`` brick and ``(aa)`` lowers by two quanta. The cut
Hamiltonian is the compression ``P H P`` onto the cut basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.linalg

from .fock_basis import CutBasis, GramMatrix, Partition, enumerate_basis, gram_matrix, lowering_image
from .trace_algebra import TraceExpr, cayley_hamilton_reduce
from .trace_algebra.words import CREATE


class GramNotPositiveDefinite(RuntimeError):
    """The Gram matrix failed the exact positive-definiteness test."""

    def __init__(self, message, smallest_eigenvalue):
        super().__init__(message)
        self.smallest_eigenvalue = smallest_eigenvalue


def _const(n: int) -> Fraction:
    return Fraction(n * n - 1, 4)


def hamiltonian_image(p, n: int | None = None) -> dict:
    """``H|p>`` as ``{partition: coefficient}``, without any cut."""
    p = Partition(p)
    n = p.n if n is None else n
    out: dict = {p: Fraction(p.quanta, 2) + _const(n)}
    up = p.shifted(2, 1)
    out[up] = out.get(up, 0) - Fraction(1, 2)
    for q, c in lowering_image(p, 2, n).items():
        out[q] = out.get(q, 0) - c / 2
    return {q: c for q, c in out.items() if c}


def apply_hamiltonian(p, n: int | None = None, method: str = "kernel") -> TraceExpr:
    """``H|p>`` as a reduced pure-creation :class:`TraceExpr`.

    ``method="kernel"`` uses the derivative kernel; ``method="wick"`` normal
    orders ``H * state`` with the general Wick engine (slow, for checks).
    """
    from .fock_basis import state_expr

    p = Partition(p)
    n = p.n if n is None else n
    if method == "kernel":
        out = TraceExpr.zero(n)
        for q, c in hamiltonian_image(p, n).items():
            out = out + state_expr(q, n) * c
        return out
    if method != "wick":
        raise ValueError(f"unknown method {method!r}")
    h = (
        TraceExpr.from_words([(CREATE, 1 - CREATE)], n, normal=True)
        + _const(n)
        - TraceExpr.from_words([(CREATE, CREATE)], n) * Fraction(1, 2)
        - TraceExpr.from_words([(1 - CREATE, 1 - CREATE)], n) * Fraction(1, 2)
    )
    return cayley_hamilton_reduce((h * state_expr(p, n)).act_on_vacuum())


@lru_cache(maxsize=64)
def action_matrix(n: int, ncut: int) -> tuple:
    """Exact ``M`` with ``P H |q> = sum_r M[r][q] |r>`` on the cut basis."""
    b = enumerate_basis(n, ncut)
    m = len(b)
    rows = [[Fraction(0)] * m for _ in range(m)]
    for j, q in enumerate(b):
        for r, c in hamiltonian_image(q, n).items():
            i = b.index.get(r)
            if i is not None:
                rows[i][j] = c
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Exact ``H[i][j] = <state_i|H|state_j>`` in the cut basis."""

    entries: tuple
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


@lru_cache(maxsize=64)
def _cached_gram(n: int, ncut: int) -> GramMatrix:
    return gram_matrix(enumerate_basis(n, ncut))


def cached_gram(n: int, ncut: int) -> GramMatrix:
    return _cached_gram(n, ncut)


@lru_cache(maxsize=64)
def _cached_hamiltonian(n: int, ncut: int) -> HamiltonianMatrix:
    b = enumerate_basis(n, ncut)
    s = _cached_gram(n, ncut)
    mm = action_matrix(n, ncut)
    m = len(b)
    blocks = b.blocks()
    rows = [[Fraction(0)] * m for _ in range(m)]
    # H = S M; S is block diagonal in quanta
    for idx in blocks.values():
        for i in idx:
            si = s.entries[i]
            for j in range(m):
                acc = Fraction(0)
                for k in idx:
                    if mm[k][j]:
                        acc += si[k] * mm[k][j]
                rows[i][j] = acc
    return HamiltonianMatrix(tuple(tuple(r) for r in rows), b)


def hamiltonian_matrix(b: CutBasis) -> HamiltonianMatrix:
    """Cut Hamiltonian ``<i|H|j>`` (raising images above the cut dropped)."""
    return _cached_hamiltonian(b.n, b.ncut)


def hamiltonian_matrix_direct(b: CutBasis) -> HamiltonianMatrix:
    """Same matrix, with every element computed as ``sum_r <i|r> [H|j>]_r``.

    Independent of the ``S M`` product used by :func:`hamiltonian_matrix`
    only in bookkeeping; kept as a cross-check.
    """
    from .fock_basis import inner_product

    m = len(b)
    rows = [[Fraction(0)] * m for _ in range(m)]
    for j, q in enumerate(b):
        img = hamiltonian_image(q, b.n)
        for i, p in enumerate(b):
            rows[i][j] = sum((c * inner_product(p, r, b.n) for r, c in img.items() if r.quanta == p.quanta),
                             Fraction(0))
    return HamiltonianMatrix(tuple(tuple(r) for r in rows), b)


# --- generalized eigenproblem -----------------------------------------------

def ldl_exact(s) -> tuple:
    """Exact ``S = L D L^T`` (unit lower-triangular ``L``).

    Raises
    ------
    GramNotPositiveDefinite
        If a pivot is not strictly positive.
    """
    entries = s.entries if hasattr(s, "entries") else s
    m = len(entries)
    lo = [[Fraction(0)] * m for _ in range(m)]
    d = [Fraction(0)] * m
    for j in range(m):
        lo[j][j] = Fraction(1)
        dj = entries[j][j] - sum((lo[j][k] ** 2 * d[k] for k in range(j) if lo[j][k]), Fraction(0))
        if dj <= 0:
            fl = np.array([[float(x) for x in row] for row in entries])
            smallest = float(np.linalg.eigvalsh(fl).min())
            raise GramNotPositiveDefinite(
                f"Gram matrix is not positive definite (pivot {j} = {float(dj)}, "
                f"smallest eigenvalue ~ {smallest:.3e})", smallest)
        d[j] = dj
        for i in range(j + 1, m):
            if entries[i][j] == 0 and not any(lo[i][k] and lo[j][k] for k in range(j)):
                continue
            v = entries[i][j] - sum((lo[i][k] * lo[j][k] * d[k] for k in range(j) if lo[i][k] and lo[j][k]),
                                    Fraction(0))
            lo[i][j] = v / dj
    return lo, d


def _lower_inverse(lo) -> list:
    m = len(lo)
    inv = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        inv[i][i] = Fraction(1)
        for j in range(i):
            acc = Fraction(0)
            for k in range(j, i):
                if lo[i][k] and inv[k][j]:
                    acc -= lo[i][k] * inv[k][j]
            inv[i][j] = acc
    return inv


@dataclass(frozen=True)
class Congruence:
    """Exact reduction of ``(H, S)`` to a standard symmetric problem.

    ``A = D^{-1/2} L^{-1} H L^{-T} D^{-1/2}`` in floating point; a coefficient
    vector ``c`` maps to ``y = D^{1/2} L^T c`` with ``c^T S c = y^T y``.
    """

    a: np.ndarray
    linv_t: np.ndarray  # float L^{-T}
    lt: np.ndarray  # float L^T
    sqrt_d: np.ndarray

    def to_orthonormal(self, c: np.ndarray) -> np.ndarray:
        return (self.lt @ c) * (self.sqrt_d if c.ndim == 1 else self.sqrt_d[:, None])

    def from_orthonormal(self, y: np.ndarray) -> np.ndarray:
        scaled = y / (self.sqrt_d if y.ndim == 1 else self.sqrt_d[:, None])
        return self.linv_t @ scaled


def _scaled(x: Fraction, di: Fraction, dj: Fraction) -> float:
    if not x:
        return 0.0
    r = float(x * x / (di * dj))
    return math.copysign(math.sqrt(r), x)


def congruence(h: HamiltonianMatrix, s: GramMatrix) -> Congruence:
    lo, d = ldl_exact(s)
    inv = _lower_inverse(lo)
    m = len(d)
    # B = L^{-1} H L^{-T}
    hh = h.entries
    tmp = [[sum((inv[i][k] * hh[k][j] for k in range(i + 1) if inv[i][k]), Fraction(0))
            for j in range(m)] for i in range(m)]
    a = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1):
            bij = sum((tmp[i][k] * inv[j][k] for k in range(j + 1) if inv[j][k]), Fraction(0))
            a[i, j] = a[j, i] = _scaled(bij, d[i], d[j])
    linv_t = np.array([[float(inv[j][i]) for j in range(m)] for i in range(m)])
    lt = np.array([[float(lo[j][i]) for j in range(m)] for i in range(m)])
    sqrt_d = np.array([math.sqrt(float(x)) if float(x) < 1e300 else math.exp(0.5 * _log_fraction(x)) for x in d])
    return Congruence(a, linv_t, lt, sqrt_d)


def _log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


@dataclass(frozen=True)
class SpectrumNumeric:
    """Ascending eigenvalues and S-orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    orthonormal: np.ndarray  # eigenvectors in the S-orthonormal frame
    basis: CutBasis

    def __len__(self):
        return len(self.eigenvalues)


def solve_spectrum_numeric(h: HamiltonianMatrix, s: GramMatrix) -> SpectrumNumeric:
    """Solve ``H c = E S c`` via an exact ``LDL^T`` congruence and ``eigh``.

    Examples
    --------
    >>> b = enumerate_basis(3, 2)
    >>> sp = solve_spectrum_numeric(hamiltonian_matrix(b), gram_matrix(b))
    >>> [round(x, 6) for x in sp.eigenvalues]
    [1.381966, 3.618034]
    """
    if len(h) != len(s):
        raise ValueError("H and S have different sizes")
    cg = congruence(h, s)
    w, y = scipy.linalg.eigh(cg.a)
    c = cg.from_orthonormal(y)
    return SpectrumNumeric(w, c, y, h.basis)


@lru_cache(maxsize=64)
def numeric_spectrum(n: int, ncut: int) -> SpectrumNumeric:
    """Cached numeric spectrum of the cut bosonic problem."""
    b = enumerate_basis(n, ncut)
    return solve_spectrum_numeric(hamiltonian_matrix(b), cached_gram(n, ncut))


@lru_cache(maxsize=64)
def cached_congruence(n: int, ncut: int) -> Congruence:
    b = enumerate_basis(n, ncut)
    return congruence(hamiltonian_matrix(b), cached_gram(n, ncut))


def generalized_residuals(h: HamiltonianMatrix, s: GramMatrix, spec: SpectrumNumeric) -> np.ndarray:
    """``||H c - E S c|| / ||H c||`` per eigenpair, in float arithmetic."""
    hf, sf = h.to_float(), s.to_float()
    out = []
    for k, e in enumerate(spec.eigenvalues):
        c = spec.eigenvectors[:, k]
        hc = hf @ c
        out.append(np.linalg.norm(hc - e * (sf @ c)) / np.linalg.norm(hc))
    return np.array(out)
