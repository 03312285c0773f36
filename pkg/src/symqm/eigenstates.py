"""Closed-form eigenstates built from Laguerre families.

A family with tail ``t`` and index ``gamma`` has amplitudes

    a_{(n, t)} = e^{-E} L_n(2E),      L_n = Lag_n^gamma / Gamma(n + gamma + 1),

on its own tail, plus mixing components ``a_{(n + s', t')} = A_{t'} a_{(n, t)}``
on lighter tails ``t'`` with ``s' = (w - w') / 2``. Substituting this ansatz
into the recursion shows that every ``A_{t'}`` is fixed by

    A_{t'} s' (gamma - s') + sum_{t''} c(t'' -> t') A_{t''} = 0,

where ``c(t'' -> t')`` is the tail-changing coefficient of ``(aa)``. The
system is triangular in tail weight and independent of ``n``, ``E`` and the
cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.special

from .closed_form import (Family, LaguerreSpec, enumerate_families, enumerate_tails, fermion_index_sets,
                          gamma0, laguerre_eval, laguerre_roots, pure_fermionic_subsets,
                          scaled_laguerre_sequence)
from .fock_basis import CutBasis, Partition, enumerate_basis
from .hamiltonian import cached_congruence
from .recursion import lowering_action, recursion_row


class MixingAnsatzError(ValueError):
    """The mixing ansatz gives an inconsistent, underdetermined or cutoff-dependent system."""


class NotARootError(ValueError):
    """Finite-mode energy is not a zero of the family's quantization condition."""


class NoVacuumInSector(ValueError):
    """Sector cannot be built from purely fermionic bricks at this rank."""


def _family(n: int, family) -> Family:
    if isinstance(family, Family):
        fam = family
    else:
        fam = Family(tuple(int(x) for x in family))
    if len(fam.tail) != n - 2:
        raise ValueError(f"tail {fam.tail} does not have N-2 = {n - 2} entries")
    if any(x < 0 for x in fam.tail):
        raise ValueError(f"tail {fam.tail} has negative entries")
    return fam


def _weight(tail) -> int:
    return sum(k * t for k, t in enumerate(tail, start=3))


def _tail_of(p) -> tuple:
    return tuple(p)[1:]


def _at(tail, p2: int) -> Partition:
    return Partition((p2,) + tuple(tail))


# ----------------------------------------------------------------------
# exact Laguerre values


def laguerre_ratio_sequence(m: int, gamma, x) -> list:
    """``Gamma(gamma + 1) L_k(x)`` for ``k = 0..m``, exact for rational input.

    Same recurrence as :func:`closed_form.scaled_laguerre_sequence` but
    normalized to ``1`` at ``k = 0``, so values stay rational.
    """
    gamma, x = Fraction(gamma), Fraction(x)
    out = [Fraction(1)]
    prev = Fraction(0)
    for k in range(m):
        nxt = ((2 * k + gamma + 1 - x) * out[-1] - prev) / ((k + 1) * (k + gamma + 1))
        prev = out[-1]
        out.append(nxt)
    return out


# ----------------------------------------------------------------------
# mixing coefficients


@lru_cache(maxsize=None)
def _transitions(n: int, tail: tuple, p2: int = 0) -> tuple:
    """Tail-changing part of ``(aa)`` on ``|p2, tail>`` as ``((tail', c), ...)``."""
    out: dict = {}
    for q, c in lowering_action(_at(tail, p2), n).items():
        t = _tail_of(q)
        if t != tail:
            out[t] = out.get(t, 0) + c
    return tuple(sorted(out.items()))


def transition_coefficients(n: int, tail, p2: int = 0) -> dict:
    """``{t': c(tail -> t')}``; ``p2`` is a probe, the result does not depend on it."""
    return dict(_transitions(n, tuple(tail), p2))


def reachable_tails(n: int, tail) -> list:
    """Tails reached from ``tail`` by repeated tail-changing lowering, heaviest first."""
    tail = tuple(tail)
    seen = {tail}
    todo = [tail]
    while todo:
        t = todo.pop()
        for u in transition_coefficients(n, t):
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return sorted(seen, key=lambda t: (-_weight(t), t))


@dataclass(frozen=True)
class MixingCoeffs:
    """Exact mixing amplitudes ``A_{t'}`` relative to the family's own tail.

    ``A`` lists only the tails other than the family's own; its entry is
    ``1`` implicitly.
    """

    n: int
    family: Family
    A: dict = field(default_factory=dict)
    ansatz: str = "full"

    def coefficient(self, tail) -> Fraction:
        tail = tuple(tail)
        if tail == self.family.tail:
            return Fraction(1)
        return self.A.get(tail, Fraction(0))

    def shift(self, tail) -> int:
        """``s' = (w - w') / 2``: the ``p2`` offset of the mixing component."""
        return (self.family.weight - _weight(tail)) // 2

    def components(self) -> list:
        """``[(tail, shift, A)]`` including the family's own tail."""
        out = [(self.family.tail, 0, Fraction(1))]
        for t in sorted(self.A, key=lambda t: (-_weight(t), t)):
            if self.A[t]:
                out.append((t, self.shift(t), self.A[t]))
        return out


def mixing_from_transitions(n: int, family) -> MixingCoeffs:
    """Mixing amplitudes from the triangular closed system.

    ``A_{t'} = -sum_{t''} c(t'' -> t') A_{t''} / (s' (gamma - s'))``, solved
    from the heaviest tail down.
    """
    fam = _family(n, family)
    gamma = fam.gamma(n)
    tails = reachable_tails(n, fam.tail)
    amp = {fam.tail: Fraction(1)}
    for t in tails[1:]:
        s = (fam.weight - _weight(t)) // 2
        acc = Fraction(0)
        for u in tails:
            if u in amp and amp[u]:
                acc += transition_coefficients(n, u).get(t, 0) * amp[u]
        amp[t] = -acc / (s * (gamma - s))
    del amp[fam.tail]
    return MixingCoeffs(n, fam, {t: a for t, a in amp.items() if a}, "triangular")


def _candidate_tails(n: int, fam: Family, ansatz: str) -> list:
    w = fam.weight
    if ansatz == "full":
        cands = [t for t in enumerate_tails(n, w - 1) if (w - _weight(t)) % 2 == 0]
    elif ansatz == "template":
        # tails p - t for 0 <= t_k <= p_k, t != 0; odd weight shifts cannot occur
        ranges = [range(x + 1) for x in fam.tail]
        cands = []
        for sub in _product(ranges):
            t = tuple(a - b for a, b in zip(fam.tail, sub))
            if any(sub) and (w - _weight(t)) % 2 == 0:
                cands.append(t)
    else:
        raise ValueError(f"unknown ansatz {ansatz!r}")
    return sorted(set(cands), key=lambda t: (-_weight(t), t))


def _product(ranges):
    if not ranges:
        yield ()
        return
    for x in ranges[0]:
        for rest in _product(ranges[1:]):
            yield (x,) + rest


def _solve_exact(rows: list, rhs: list, k: int) -> list:
    """Exact solution of an overdetermined consistent system (Gauss-Jordan)."""
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
    if any(row[-1] != 0 for row in m[r:]):
        raise MixingAnsatzError("mixing system is inconsistent: the ansatz cannot satisfy the recursion")
    if len(piv_cols) < k:
        raise MixingAnsatzError("mixing system is underdetermined")
    sol = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        sol[c] = m[i][-1]
    return sol


_PROBES = (Fraction(1, 3), Fraction(7, 5))


def _mixing_system(n: int, fam: Family, cands: list, ncut: int) -> list:
    gamma = fam.gamma(n)
    rows, rhs = [], []
    for x in _PROBES:
        E = x / 2
        top = (ncut - fam.weight) // 2
        ell = laguerre_ratio_sequence(top, gamma, x)

        def piece(tail):
            s = (fam.weight - _weight(tail)) // 2
            return {_at(tail, k + s): ell[k] for k in range(top + 1)}

        base = piece(fam.tail)
        cols = [piece(t) for t in cands]
        for p in enumerate_basis(n, ncut - 2):
            r0 = recursion_row(base, p, n, E)
            rc = [recursion_row(col, p, n, E) for col in cols]
            if r0 or any(rc):
                rows.append(rc)
                rhs.append(-r0)
    return _solve_exact(rows, rhs, len(cands))


def solve_mixing_coeffs(n: int, family, ansatz: str = "full") -> MixingCoeffs:
    """Solve the mixing amplitudes from the recursion rows, exactly.

    The ansatz is substituted into every interior recursion row at two
    rational test energies and two cutoffs (``w + 4`` and ``w + 6``); the
    resulting overdetermined linear system is solved in rationals.

    Parameters
    ----------
    family : Family or tuple
        Bosonic family (tail ``(p3, ..., pN)``), tail weight at most 12.
    ansatz : {"full", "template"}
        ``"full"`` allows every lighter tail of matching parity;
        ``"template"`` allows only the tails ``p - t`` with ``0 <= t_k <= p_k``.

    Raises
    ------
    MixingAnsatzError
        If the system is inconsistent, underdetermined or cutoff dependent.

    Examples
    --------
    >>> solve_mixing_coeffs(3, (2,)).A
    {(0,): Fraction(-1, 24)}
    """
    fam = _family(n, family)
    if fam.nB:
        raise ValueError("mixing is only modelled for bosonic families")
    if fam.weight > 12:
        raise ValueError("tail weight above 12 is outside the supported range")
    cands = _candidate_tails(n, fam, ansatz)
    if not cands:
        return MixingCoeffs(n, fam, {}, ansatz)
    sols = [_mixing_system(n, fam, cands, fam.weight + d) for d in (4, 6)]
    if sols[0] != sols[1]:
        raise MixingAnsatzError("mixing amplitudes depend on the cutoff")
    return MixingCoeffs(n, fam, {t: a for t, a in zip(cands, sols[0]) if a}, ansatz)


@lru_cache(maxsize=None)
def _mixing(n: int, tail: tuple) -> MixingCoeffs:
    return mixing_from_transitions(n, tail)


# ----------------------------------------------------------------------
# states


@dataclass(frozen=True)
class FamilySolution:
    """Amplitudes of one closed-form eigenstate in the Fock basis.

    ``coeffs`` maps partitions to floats; ``mode`` is ``"finite"`` (with
    ``ncut``) or ``"continuum"`` (with series tolerance ``tol`` and regulator
    ``z``).
    """

    n: int
    family: Family
    E: float
    coeffs: dict
    mode: str
    mixing: MixingCoeffs
    ncut: int | None = None
    tol: float | None = None
    z: float | None = None
    fermions: tuple = ()

    @property
    def nF(self) -> int:
        return sum(self.fermions)

    @property
    def terms(self) -> int:
        """Number of Laguerre terms per tail."""
        return max((p[0] for p in self.coeffs if _tail_of(p) == self.family.tail), default=-1) + 1

    def to_vector(self, basis: CutBasis) -> np.ndarray:
        """Coefficients in the order of ``basis``; amplitudes outside it are dropped."""
        v = np.zeros(len(basis))
        for p, c in self.coeffs.items():
            i = basis.index.get(p)
            if i is not None:
                v[i] = c
        return v

    def to_json(self) -> dict:
        items = sorted(self.coeffs.items(), key=lambda kv: (kv[0].quanta, tuple(kv[0])))
        return {
            "family": list(self.family.tail),
            "nF": self.nF,
            "E": float(self.E),
            "coeffs": [{"p": list(p), "value": float(c)} for p, c in items],
        }


def _root_check(spec: LaguerreSpec, x: float, tol: float) -> None:
    val = abs(laguerre_eval(spec, x))
    scale = max(abs(laguerre_eval(spec, -x)), 1.0)
    if val > tol * scale:
        raise NotARootError(
            f"2E = {x} is not a zero of Lag_{spec.m}^{spec.gamma} (|value|/scale = {val / scale:.2e})")


def _orthonormal_terms(gamma: float, x: float, z: float, tol: float, max_terms: int) -> np.ndarray:
    """``p_k(x)``, orthonormal Laguerre values, until the regulated series converges."""
    vals = [1.0 / math.sqrt(scipy.special.gamma(gamma + 1)) if gamma < 170
            else math.exp(-0.5 * scipy.special.gammaln(gamma + 1))]
    prev = 0.0
    total = vals[0] ** 2
    k = 0
    while k < max_terms:
        off = math.sqrt(k * (k + gamma)) if k else 0.0
        nxt = ((2 * k + gamma + 1 - x) * vals[-1] - off * prev) / math.sqrt((k + 1) * (k + gamma + 1))
        prev = vals[-1]
        vals.append(nxt)
        k += 1
        total += nxt * nxt * z ** k
        if (prev * prev + nxt * nxt) * z ** k < tol * total:
            break
    return np.array(vals)


def build_family_state(n: int, family, E: float, mode: str = "finite", ncut: int | None = None,
                       tol: float = 1e-10, z: float = 0.99, root_tol: float = 1e-8,
                       max_terms: int = 200000) -> FamilySolution:
    """Closed-form eigenstate of a bosonic family.

    Parameters
    ----------
    mode : {"finite", "continuum"}
        ``"finite"`` requires ``ncut`` and a root ``E`` of the family; the
        state then lives in the cut basis. ``"continuum"`` accepts any
        ``E >= 0`` and truncates the Laguerre series once
        ``(p_k^2 + p_{k-1}^2) z^k`` drops below ``tol`` times the running
        regulated norm (``p_k`` the orthonormal Laguerre values).

    Raises
    ------
    NotARootError
        In finite mode, when ``2E`` is not a zero of the quantization condition.

    Examples
    --------
    >>> s = build_family_state(3, (0,), (5 - 5 ** 0.5) / 2, ncut=2)
    >>> sorted(tuple(p) for p in s.coeffs)
    [(0, 0), (1, 0)]
    """
    fam = _family(n, family)
    gamma = fam.gamma(n)
    mix = _mixing(n, fam.tail)
    x = 2.0 * float(E)
    if mode == "finite":
        if ncut is None:
            raise ValueError("finite mode needs ncut")
        m = fam.order(ncut)
        if m < 1:
            raise ValueError(f"family {fam.label()} has no states at ncut={ncut}")
        _root_check(LaguerreSpec(m, gamma), x, root_tol)
        ell = scaled_laguerre_sequence(m - 1, gamma, x)
    elif mode == "continuum":
        if E < 0:
            raise ValueError("continuum energies must be non-negative")
        if not 0 < z < 1:
            raise ValueError("z must lie in (0, 1)")
        g = float(gamma)
        ortho = _orthonormal_terms(g, x, z, tol, max_terms)
        k = np.arange(len(ortho))
        # L_k = p_k / sqrt(k! Gamma(k + gamma + 1))
        logscale = -0.5 * (scipy.special.gammaln(k + 1) + scipy.special.gammaln(k + g + 1))
        ell = ortho * np.exp(logscale)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    pref = math.exp(-float(E))
    coeffs = {}
    for tail, s, a in mix.components():
        fa = float(a)
        for k, v in enumerate(ell):
            coeffs[_at(tail, k + s)] = pref * fa * float(v)
    return FamilySolution(n, fam, float(E), coeffs, mode, mix,
                          ncut=ncut if mode == "finite" else None,
                          tol=tol if mode == "continuum" else None,
                          z=z if mode == "continuum" else None)


def family_states(n: int, ncut: int) -> list:
    """Finite-mode states for every bosonic family and every root, sorted by energy."""
    out = []
    for fam, m in enumerate_families(n, ncut):
        for r in laguerre_roots(LaguerreSpec(m, fam.gamma(n))):
            out.append(build_family_state(n, fam, r / 2, ncut=ncut))
    out.sort(key=lambda s: (s.E, _weight(s.family.tail), s.family.tail))
    return out


def state_residual(state: FamilySolution, ncut: int | None = None) -> float:
    """``||(H - E S) psi||_{S^-1} / ||psi||_S`` in the cut basis."""
    ncut = state.ncut if ncut is None else ncut
    if ncut is None:
        raise ValueError("a cutoff is required")
    basis = enumerate_basis(state.n, ncut)
    cg = cached_congruence(state.n, ncut)
    y = cg.to_orthonormal(state.to_vector(basis))
    return float(np.linalg.norm(cg.a @ y - state.E * y) / np.linalg.norm(y))


def s_overlap_matrix(states: list, ncut: int) -> np.ndarray:
    """Gram matrix of the states, normalized to unit diagonal."""
    n = states[0].n
    basis = enumerate_basis(n, ncut)
    cg = cached_congruence(n, ncut)
    y = np.column_stack([cg.to_orthonormal(s.to_vector(basis)) for s in states])
    y = y / np.linalg.norm(y, axis=0)
    return y.T @ y


# ----------------------------------------------------------------------
# fermionic dressing and vacua


def dress_fermionic(state: FamilySolution, fermion_indices) -> FamilySolution:
    """Attach purely fermionic bricks ``(f^dagger^k)``, ``k`` in ``{3, 5, ..., 2N-1}``.

    The bosonic amplitudes are unchanged; only the fermion content is tagged.

    Raises
    ------
    ValueError
        Repeated or invalid indices.
    """
    idx = [int(k) for k in fermion_indices]
    allowed = set(fermion_index_sets(state.n))
    bad = [k for k in idx if k not in allowed]
    if bad:
        raise ValueError(f"fermionic brick indices {bad} not in {sorted(allowed)}")
    merged = list(state.fermions) + idx
    if len(set(merged)) != len(merged):
        raise ValueError("each fermionic brick can be used at most once")
    return replace(state, fermions=tuple(sorted(merged)))


@dataclass(frozen=True)
class VacuumProfile:
    """``E -> 0`` limit of the dressed empty-tail state.

    ``suppression`` maps every nonempty tail (up to the budget) to the exponent
    ``w / 2`` of the factor ``(2E)^{w/2}`` that suppresses that family
    relative to the empty-tail one.
    """

    state: FamilySolution
    suppression: dict
    sectors: tuple


def vacuum_profile(n: int, sector=(), budget: int = 8, tol: float = 1e-10, z: float = 0.99) -> VacuumProfile:
    """Vacuum-candidate profile in a sector built from purely fermionic bricks.

    Parameters
    ----------
    sector : int or iterable of int
        Either the fermion number ``nF`` or the brick indices.

    Raises
    ------
    NoVacuumInSector
        When no set of distinct purely fermionic bricks reaches the sector.
    """
    if isinstance(sector, (int, np.integer)):
        subsets = pure_fermionic_subsets(n, int(sector))
        if not subsets:
            raise NoVacuumInSector(f"no vacuum in sector nF={sector} at N={n}")
        chosen = subsets[0]
    else:
        chosen = tuple(sorted(int(k) for k in sector))
        allowed = set(fermion_index_sets(n))
        if len(set(chosen)) != len(chosen) or any(k not in allowed for k in chosen):
            raise NoVacuumInSector(f"no vacuum in sector {list(chosen)} at N={n}")
        subsets = [chosen]
    base = build_family_state(n, (0,) * (n - 2), 0.0, mode="continuum", tol=tol, z=z)
    state = dress_fermionic(base, chosen)
    supp = {t: Fraction(_weight(t), 2) for t in enumerate_tails(n, budget) if any(t)}
    return VacuumProfile(state, supp, tuple(tuple(s) for s in subsets))


# ----------------------------------------------------------------------
# continuum overlaps


@dataclass(frozen=True)
class OverlapResult:
    series: float
    closed: float
    terms: int

    @property
    def relative_difference(self) -> float:
        return abs(self.series - self.closed) / max(abs(self.closed), 1e-300)


def _check_overlap_args(E, E2, z):
    if not 0 < z < 1:
        raise ValueError("z must lie in (0, 1)")
    if E <= 0 or E2 <= 0:
        raise ValueError("energies must be positive")


def continuum_overlap(n: int, E: float, E2: float, z: float, tol: float = 1e-16,
                      max_terms: int = 1000000) -> OverlapResult:
    """Regulated overlap ``sum_k a_k(E) a_k(E2) <k|k> z^k`` of empty-tail states.

    ``<k|k> = k! Gamma(k + gamma0 + 1) / Gamma(gamma0 + 1)`` is the norm of
    ``|k, 0, ...>``. The series is summed with orthonormal Laguerre values;
    the closed form is the Hille-Hardy kernel

        e^{-E-E2} / Gamma(gamma0 + 1) (1 - z)^{-1} exp(-2z(E + E2)/(1 - z))
        (4 E E2 z)^{-gamma0/2} I_gamma0(4 sqrt(E E2 z) / (1 - z)).
    """
    _check_overlap_args(E, E2, z)
    g = float(gamma0(n))
    x, y = 2.0 * E, 2.0 * E2
    lg = scipy.special.gammaln(g + 1)
    px, py = [math.exp(-0.5 * lg)] * 2
    qx = qy = 0.0
    total = px * py
    k = 0
    zk = 1.0
    quiet = 0
    while k < max_terms:
        den = math.sqrt((k + 1) * (k + g + 1))
        off = math.sqrt(k * (k + g)) if k else 0.0
        nx = ((2 * k + g + 1 - x) * px - off * qx) / den
        ny = ((2 * k + g + 1 - y) * py - off * qy) / den
        qx, px, qy, py = px, nx, py, ny
        k += 1
        zk *= z
        term = px * py * zk
        total += term
        env = math.sqrt((px * px + qx * qx) * (py * py + qy * qy)) * zk
        quiet = quiet + 1 if env < tol * abs(total) else 0
        if quiet >= 2:
            break
    series = math.exp(-E - E2 - lg) * total
    return OverlapResult(series, hille_hardy_overlap(n, E, E2, z), k + 1)


def hille_hardy_overlap(n: int, E: float, E2: float, z: float) -> float:
    """Closed Bessel-function form of :func:`continuum_overlap`."""
    _check_overlap_args(E, E2, z)
    g = float(gamma0(n))
    u = 4.0 * math.sqrt(E * E2 * z) / (1 - z)
    log = (-E - E2 - scipy.special.gammaln(g + 1) - math.log(1 - z) - 2 * z * (E + E2) / (1 - z)
           - 0.5 * g * math.log(4 * E * E2 * z) + u)
    return math.exp(log) * scipy.special.ive(g, u)


def gaussian_overlap(n: int, E: float, E2: float, z: float) -> float:
    """Leading ``z -> 1`` behaviour of the overlap, with ``eps = (1 - z)/4``.

    ``e^{E+E2-2sqrt(E E2)} / (2 sqrt(pi) Gamma(gamma0+1)) (4 E E2)^{-gamma0/2-1/4}
    (4 eps)^{-1/2} exp(-(sqrt(2E) - sqrt(2E2))^2 / (4 eps))``
    """
    _check_overlap_args(E, E2, z)
    g = float(gamma0(n))
    eps = (1 - z) / 4
    log = (E + E2 - 2 * math.sqrt(E * E2) - scipy.special.gammaln(g + 1)
           - (g / 2 + 0.25) * math.log(4 * E * E2) - 0.5 * math.log(4 * eps)
           - (math.sqrt(2 * E) - math.sqrt(2 * E2)) ** 2 / (4 * eps))
    return math.exp(log) / (2 * math.sqrt(math.pi))
