"""Closed-form spectra from generalized Laguerre quantization conditions.

Every family of solutions is labelled by a tail ``(p3, ..., pN)`` (and, in
fermionic sectors, a brick with ``nB`` extra bosonic quanta). With tail
weight ``w = sum_k k p_k`` the family has index
``gamma = w + nB + (N^2 - 1)/2 - 1`` and order
``m = floor((ncut - w - nB) / 2) + 1``; its energies are ``E = x / 2`` for
the zeros ``x`` of ``Lag_m^gamma``, the standard generalized Laguerre
polynomial.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.special


class BrickDataUnavailable(LookupError):
    """No fermionic brick data is known for the requested sector."""


@dataclass(frozen=True)
class LaguerreSpec:
    """Order ``m`` and index ``gamma`` of ``Lag_m^gamma``."""

    m: int
    gamma: Fraction

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("order must be non-negative")
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if self.gamma <= -1:
            raise ValueError("index must exceed -1")


def laguerre_eval(spec: LaguerreSpec, x: float) -> float:
    """``Lag_m^gamma(x)`` by the three-term recurrence.

    ``(k+1) L_{k+1} = (2k + gamma + 1 - x) L_k - (k + gamma) L_{k-1}``.

    Examples
    --------
    >>> laguerre_eval(LaguerreSpec(2, 3), 5.0)
    -2.5
    """
    g = float(spec.gamma)
    prev, cur = 0.0, 1.0
    for k in range(spec.m):
        prev, cur = cur, ((2 * k + g + 1 - x) * cur - (k + g) * prev) / (k + 1)
    return cur


def laguerre_sequence(m: int, gamma, x: float) -> np.ndarray:
    """``[Lag_0^gamma(x), ..., Lag_m^gamma(x)]``."""
    g = float(gamma)
    out = np.empty(m + 1)
    prev, cur = 0.0, 1.0
    out[0] = cur
    for k in range(m):
        prev, cur = cur, ((2 * k + g + 1 - x) * cur - (k + g) * prev) / (k + 1)
        out[k + 1] = cur
    return out


def scaled_laguerre_sequence(m: int, gamma, x: float) -> np.ndarray:
    """``L_k = Lag_k^gamma(x) / Gamma(k + gamma + 1)`` for ``k = 0..m``.

    Uses the recurrence satisfied by the rescaled polynomials,
    ``L_{k-1} - (2k + gamma + 1 - x) L_k + (k+1)(k + gamma + 1) L_{k+1} = 0``.
    """
    g = float(gamma)
    out = np.empty(m + 1)
    out[0] = 1.0 / scipy.special.gamma(g + 1)
    prev = 0.0
    for k in range(m):
        nxt = ((2 * k + g + 1 - x) * out[k] - prev) / ((k + 1) * (k + g + 1))
        prev = out[k]
        out[k + 1] = nxt
    return out


def laguerre_roots(spec: LaguerreSpec, check: bool = True) -> np.ndarray:
    """Zeros of ``Lag_m^gamma`` from the symmetric Jacobi matrix (ascending).

    Diagonal ``2i + gamma + 1`` and off-diagonal ``sqrt(i (i + gamma))``.
    Each root is checked against the local scale ``Lag_m^gamma(-r)``, which
    bounds the size of the polynomial's terms at ``r``.
    """
    m = spec.m
    if m < 1:
        raise ValueError("order must be at least 1")
    g = float(spec.gamma)
    i = np.arange(m)
    diag = 2 * i + g + 1
    off = np.sqrt(i[1:] * (i[1:] + g))
    roots = scipy.linalg.eigh_tridiagonal(diag, off, eigvals_only=True)
    roots = np.sort(roots)
    if check:
        for r in roots:
            scale = abs(laguerre_eval(spec, -abs(r)))
            val = abs(laguerre_eval(spec, r))
            if val > 1e-8 * max(scale, 1.0):
                raise ArithmeticError(f"root {r} of L_{m}^{g} failed verification ({val:.2e})")
    return roots


@dataclass(frozen=True)
class Family:
    """A family of solutions: bosonic tail plus optional fermionic brick."""

    tail: tuple
    nB: int = 0
    alpha: int | None = None

    @property
    def n(self) -> int:
        return len(self.tail) + 2

    @property
    def weight(self) -> int:
        return sum(k * t for k, t in enumerate(self.tail, start=3))

    def gamma(self, n: int | None = None) -> Fraction:
        n = self.n if n is None else n
        return Fraction(self.weight + self.nB) + Fraction(n * n - 1, 2) - 1

    def order(self, ncut: int) -> int:
        return (ncut - self.weight - self.nB) // 2 + 1

    def spec(self, ncut: int) -> LaguerreSpec:
        return LaguerreSpec(self.order(ncut), self.gamma())

    def label(self) -> str:
        s = "{" + ",".join(str(t) for t in self.tail) + "}"
        if self.alpha is not None:
            s += f";alpha={self.alpha}"
        return s


def gamma0(n: int) -> Fraction:
    """Index of the empty-tail family, ``(N^2 - 1)/2 - 1``."""
    return Fraction(n * n - 1, 2) - 1


@dataclass(frozen=True)
class Brick:
    alpha: int
    nB: int


@dataclass(frozen=True)
class BrickTable:
    """Fermionic sector data for one ``(N, nF)``."""

    n: int
    nF: int
    bricks: tuple = field(default_factory=tuple)

    def __post_init__(self):
        alphas = [b.alpha for b in self.bricks]
        if len(set(alphas)) != len(alphas):
            raise ValueError("brick labels must be unique")
        if any(b.nB < 0 for b in self.bricks):
            raise ValueError("nB must be non-negative")

    @property
    def count(self) -> int:
        return len(self.bricks)

    @classmethod
    def from_json(cls, data) -> "BrickTable":
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        return cls(int(data["N"]), int(data["nF"]),
                   tuple(Brick(int(b["alpha"]), int(b["nB"])) for b in data.get("bricks", [])))

    def to_json(self) -> dict:
        return {"N": self.n, "nF": self.nF, "bricks": [{"alpha": b.alpha, "nB": b.nB} for b in self.bricks]}


def enumerate_tails(n: int, budget: int) -> list:
    """All ``(p3, ..., pN)`` with ``sum_k k p_k <= budget`` (weight, then lexicographic)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if budget < 0:
        return []

    def rec(k, left):
        if k > n:
            yield ()
            return
        for pk in range(left // k + 1):
            for rest in rec(k + 1, left - k * pk):
                yield (pk,) + rest

    tails = list(rec(3, budget))
    return sorted(tails, key=lambda t: (sum(k * x for k, x in enumerate(t, start=3)), t))


def enumerate_families(n: int, ncut: int, sector=None) -> list:
    """Families with at least one root, paired with their order.

    Parameters
    ----------
    sector : None, BrickTable or iterable of Brick
        ``None`` selects the bosonic sector.

    Returns
    -------
    list of (Family, int)
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    bricks = [Brick(None, 0)] if sector is None else list(
        sector.bricks if isinstance(sector, BrickTable) else sector)
    out = []
    for br in bricks:
        for tail in enumerate_tails(n, ncut - br.nB):
            fam = Family(tail, br.nB, br.alpha)
            m = fam.order(ncut)
            if m >= 1:
                out.append((fam, m))
    return out


@dataclass(frozen=True)
class SpectrumEntry:
    E: float
    family: Family
    root_index: int


@dataclass(frozen=True)
class SpectrumClosedForm:
    """Closed-form levels, ascending, each annotated by family and root index."""

    n: int
    ncut: int
    entries: tuple
    nF: int = 0

    @property
    def energies(self) -> np.ndarray:
        return np.array([e.E for e in self.entries])

    def __len__(self):
        return len(self.entries)

    def multiplicities(self, tol: float = 1e-10) -> list:
        """``[(E, multiplicity)]`` after merging levels closer than ``tol`` (relative)."""
        out: list = []
        for e in self.energies:
            if out and abs(e - out[-1][0]) <= tol * max(abs(e), 1.0):
                out[-1][1] += 1
            else:
                out.append([e, 1])
        return [(float(e), k) for e, k in out]


def _spectrum(n, ncut, families, nF=0) -> SpectrumClosedForm:
    entries = []
    for fam, m in families:
        roots = laguerre_roots(LaguerreSpec(m, fam.gamma(n)))
        entries.extend(SpectrumEntry(float(r) / 2, fam, k) for k, r in enumerate(roots))
    entries.sort(key=lambda e: (e.E, e.family.nB, e.family.tail))
    return SpectrumClosedForm(n, ncut, tuple(entries), nF)


def theta_bosonic(n: int, ncut: int) -> SpectrumClosedForm:
    """All zeros of the bosonic quantization product at cutoff ``ncut``.

    Examples
    --------
    >>> [round(e, 6) for e in theta_bosonic(3, 2).energies]
    [1.381966, 3.618034]
    """
    return _spectrum(n, ncut, enumerate_families(n, ncut))


def fermion_index_sets(n: int) -> list:
    """Allowed indices ``{3, 5, ..., 2N-1}`` of purely fermionic bricks."""
    return list(range(3, 2 * n, 2))


def pure_fermionic_subsets(n: int, nF: int) -> list:
    """Subsets of ``{3, 5, ..., 2N-1}`` whose sum is ``nF``."""
    idx = fermion_index_sets(n)
    out = []

    def rec(i, left, chosen):
        if left == 0:
            out.append(tuple(chosen))
            return
        for j in range(i, len(idx)):
            if idx[j] > left:
                break
            rec(j + 1, left - idx[j], chosen + [idx[j]])

    rec(0, nF, [])
    return out


def sector_bricks(n: int, nF: int, table: BrickTable | None = None) -> list:
    """Bricks of a fermionic sector: pure-fermionic ones plus table entries.

    Raises
    ------
    BrickDataUnavailable
        If no table is given and no pure-fermionic brick reaches ``nF``.
    """
    if table is not None and (table.n != n or table.nF != nF):
        raise ValueError(f"table is for (N={table.n}, nF={table.nF}), requested (N={n}, nF={nF})")
    pure = pure_fermionic_subsets(n, nF)
    bricks = [Brick(-(k + 1), 0) for k in range(len(pure))]
    if table is not None:
        bricks.extend(table.bricks)
    if not bricks:
        raise BrickDataUnavailable(
            f"brick data unavailable for N={n}, nF={nF}: supply a brick table")
    return bricks


def theta_fermionic(n: int, ncut: int, nF: int | None = None, table: BrickTable | None = None
                    ) -> SpectrumClosedForm:
    """Zeros of the quantization product of a fermionic sector.

    Pure-fermionic bricks (products of distinct ``(f^dagger^{2k-1})``) carry
    no bosonic quanta and are included automatically, labelled by negative
    ``alpha``; a table adds further bricks.
    """
    if nF is None:
        if table is None:
            raise BrickDataUnavailable("brick data unavailable: no sector or table given")
        nF = table.nF
    if nF == 0 and table is None:
        return theta_bosonic(n, ncut)
    bricks = sector_bricks(n, nF, table)
    return _spectrum(n, ncut, enumerate_families(n, ncut, bricks), nF)


@dataclass(frozen=True)
class SpectrumReport:
    """Closed-form and numeric levels side by side."""

    n: int
    ncut: int
    closed: np.ndarray
    numeric: np.ndarray
    tol: float

    @property
    def counts_match(self) -> bool:
        return len(self.closed) == len(self.numeric)

    @property
    def max_relative_error(self) -> float:
        if not self.counts_match or len(self.closed) == 0:
            return math.inf if not self.counts_match else 0.0
        a, b = np.sort(self.closed), np.sort(self.numeric)
        return float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))

    @property
    def match(self) -> bool:
        return self.counts_match and self.max_relative_error <= self.tol

    def to_json(self) -> dict:
        return {
            "N": self.n,
            "ncut": self.ncut,
            "match": self.match,
            "max_relative_error": self.max_relative_error,
            "closed": [float(x) for x in np.sort(self.closed)],
            "numeric": [float(x) for x in np.sort(self.numeric)],
        }


def compare_spectra(n: int, ncut: int, tol: float = 1e-9) -> SpectrumReport:
    from .hamiltonian import numeric_spectrum

    closed = theta_bosonic(n, ncut).energies
    numeric = numeric_spectrum(n, ncut).eigenvalues
    return SpectrumReport(n, ncut, closed, np.asarray(numeric), tol)


def exact_gamma(n: int, tail=(), nB: int = 0) -> Fraction:
    return Family(tuple(tail), nB).gamma(n)
