"""Brute-force oscillator representation used to validate the symbolic engine.

The ``N^2 - 1`` adjoint oscillators are represented by sparse matrices on the
occupation-number space truncated at a total number of quanta. Traces are
formed with explicit generators ``T_A = lambda_A / 2`` (generalized Gell-Mann
matrices), so ``tr(T_A T_B) = delta_AB / 2``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .fock_basis import Partition
from .trace_algebra.expr import TraceExpr
from .trace_algebra.words import ANNIHILATE, CREATE


class OracleScaleError(ValueError):
    """Requested rank or quanta exceed what the dense oracle supports."""


def su_generators(n: int) -> list:
    """Hermitian traceless generators with ``tr(T_A T_B) = delta_AB / 2``."""
    gens = []
    for j in range(n):
        for k in range(j + 1, n):
            m = np.zeros((n, n), complex)
            m[j, k] = m[k, j] = 0.5
            gens.append(m)
            m = np.zeros((n, n), complex)
            m[j, k] = -0.5j
            m[k, j] = 0.5j
            gens.append(m)
    for l in range(1, n):
        d = np.zeros(n)
        d[:l] = 1.0
        d[l] = -l
        gens.append(np.diag(d) * np.sqrt(2.0 / (l * (l + 1))) / 2)
    return gens


class DenseOracle:
    """Explicit Fock-space representation at rank ``n``, truncated at ``qmax`` quanta.

    Parameters
    ----------
    n : int
        Rank; 2 or 3.
    qmax : int
        Truncation of the total occupation number (at most 8).
    """

    MAX_N = 3
    MAX_Q = 8

    def __init__(self, n: int, qmax: int = 8):
        if not 2 <= n <= self.MAX_N:
            raise OracleScaleError(f"dense oracle supports N in 2..{self.MAX_N}, got {n}")
        if not 0 <= qmax <= self.MAX_Q:
            raise OracleScaleError(f"dense oracle supports at most {self.MAX_Q} quanta, got {qmax}")
        self.n = n
        self.qmax = qmax
        self.gens = su_generators(n)
        self.modes = len(self.gens)
        states = [
            s
            for q in range(qmax + 1)
            for s in itertools.product(range(q + 1), repeat=self.modes)
            if sum(s) == q
        ]
        self.states = states
        self.level = np.array([sum(s) for s in states])
        index = {s: i for i, s in enumerate(states)}
        self.dim = len(states)
        self.create = []
        for a in range(self.modes):
            rows, cols, vals = [], [], []
            for i, s in enumerate(states):
                t = list(s)
                t[a] += 1
                t = tuple(t)
                if t in index:
                    rows.append(index[t])
                    cols.append(i)
                    vals.append(np.sqrt(t[a]))
            self.create.append(sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim)))
        self.annihilate = [c.T.tocsr() for c in self.create]
        # matrix elements X_ij = sum_A (T_A)_ij op_A
        self._x = {
            CREATE: [[self._combine(self.create, i, j) for j in range(n)] for i in range(n)],
            ANNIHILATE: [[self._combine(self.annihilate, i, j) for j in range(n)] for i in range(n)],
        }
        self.vacuum = np.zeros(self.dim, complex)
        self.vacuum[0] = 1.0

    def _combine(self, ops, i, j):
        out = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for t, op in zip(self.gens, ops):
            if t[i, j] != 0:
                out = out + t[i, j] * op
        return out

    # ------------------------------------------------------------------
    def _top(self, v) -> int:
        nz = np.nonzero(np.abs(v) > 0)[0]
        return int(self.level[nz].max()) if len(nz) else 0

    def apply_block(self, block, v: np.ndarray) -> np.ndarray:
        """Apply the normal-ordered product of the traces in ``block``.

        Sums over explicit matrix indices, applying every annihilation letter
        before any creation letter (depth-first, reusing partial results).
        """
        letters = []  # (letter, word id, position)
        closing = []
        for wi, w in enumerate(block):
            for pos, x in enumerate(w):
                letters.append((x, wi, pos))
            closing.append(len(w))
        raised = sum(1 for x, _, _ in letters if x == CREATE)
        lowered = len(letters) - raised
        if self._top(v) - lowered + raised > self.qmax:
            raise OracleScaleError("operator would leave the truncated space")
        order = [t for t in letters if t[0] == ANNIHILATE] + [t for t in letters if t[0] == CREATE]
        n = self.n
        out = np.zeros_like(v)

        def rec(k, idx, vec):
            nonlocal out
            if k == len(order):
                out = out + vec
                return
            x, wi, pos = order[k]
            # letter (x, wi, pos) carries indices (i_pos, i_{pos+1 mod len})
            nxt = (pos + 1) % closing[wi]
            for i in range(n):
                if idx.get((wi, pos), i) != i:
                    continue
                for j in range(n):
                    if idx.get((wi, nxt), j) != j:
                        continue
                    if pos == nxt and i != j:
                        continue
                    mat = self._x[x][i][j]
                    if mat.nnz == 0:
                        continue
                    w = mat @ vec
                    if not np.any(w):
                        continue
                    new = dict(idx)
                    new[(wi, pos)] = i
                    new[(wi, nxt)] = j
                    rec(k + 1, new, w)

        rec(0, {}, v)
        return out

    def apply(self, e: TraceExpr, v: np.ndarray) -> np.ndarray:
        """Apply an expression (any operator order) to a vector."""
        if e.n != self.n:
            raise ValueError("rank mismatch")
        out = np.zeros(self.dim, complex)
        for key, c in e.terms.items():
            w = v
            for block in reversed(key):
                w = self.apply_block(block, w)
            out = out + complex(c) * w
        return out

    def state(self, p) -> np.ndarray:
        p = Partition(p)
        if p.quanta > self.qmax:
            raise OracleScaleError("state exceeds the truncated space")
        v = self.vacuum
        for k, pk in enumerate(p, start=2):
            for _ in range(pk):
                v = self.apply_block((((CREATE,) * k),), v)
        return v

    def hamiltonian(self, v: np.ndarray) -> np.ndarray:
        """Component form ``sum_A (a+_A a_A / 2 - a+_A a+_A / 4 - a_A a_A / 4) + (N^2-1)/4``."""
        if self._top(v) + 2 > self.qmax:
            raise OracleScaleError("H would leave the truncated space")
        out = 0.25 * (self.n ** 2 - 1) * v
        for c, a in zip(self.create, self.annihilate):
            out = out + 0.5 * (c @ (a @ v)) - 0.25 * (c @ (c @ v)) - 0.25 * (a @ (a @ v))
        return out

    def inner(self, p, q) -> float:
        return float(np.vdot(self.state(p), self.state(q)).real)

    def matrix_element(self, p, q) -> float:
        """``<p|H|q>``."""
        return float(np.vdot(self.state(p), self.hamiltonian(self.state(q))).real)


@lru_cache(maxsize=4)
def get_oracle(n: int, qmax: int = 8) -> DenseOracle:
    return DenseOracle(n, qmax)


def oracle_inner_product(p, q, n: int) -> float:
    """``<p|q>`` from explicit oscillator matrices (N in {2, 3}, quanta <= 8)."""
    p, q = Partition(p), Partition(q)
    if max(p.quanta, q.quanta) > DenseOracle.MAX_Q:
        raise OracleScaleError("quanta above oracle limit")
    return get_oracle(n).inner(p, q)
