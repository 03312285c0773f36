"""Verification suites run by ``symqm verify``.

Each suite returns a list of :class:`Check` records. A check compares the
engine with an independent computation or with a published identity.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .eigenstates import continuum_overlap, gaussian_overlap
from .fock_basis import Partition, enumerate_basis, inner_product
from .hamiltonian import hamiltonian_matrix, numeric_spectrum
from .recursion import recursion_residual, recursion_row
from .reference_forms import (published_aa_commutator, published_aa_power_commutator,
                              published_mixed_commutator, published_su3_recursion, published_su4_recursion)
from .trace_algebra import TraceExpr, commutator


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "detail": self.detail}


def _brick_power(k: int, m: int, n: int) -> TraceExpr:
    return TraceExpr.creation_brick(k, n, power=m)


def _aa(n: int) -> TraceExpr:
    return TraceExpr.parse("(a2)", n)


def appendix_checks(ranks=(2, 3, 4, 5)) -> list:
    """Engine commutators against the published commutator identities."""
    out = []
    for n in ranks:
        for k in range(2, 7):
            eng = commutator(_aa(n), _brick_power(k, 1, n))
            pub = published_aa_commutator(k, n)
            out.append(Check(f"[(aa),(a+^{k})] N={n}", eng == pub,
                             {"engine": str(eng), "published": str(pub)}))
        for k in range(2, 9):
            for m in range(2, 8 // k + 1):
                eng = commutator(_aa(n), _brick_power(k, m, n))
                pub = published_aa_power_commutator(k, m, n)
                out.append(Check(f"[(aa),(a+^{k})^{m}] N={n}", eng == pub,
                                 {"engine": str(eng), "published": str(pub)}))
        for a, b, m in itertools.product((1, 2, 3), (2, 3), (1, 2)):
            eng = commutator(TraceExpr.parse(f"(A{a}a1)", n), _brick_power(b, m, n))
            pub = published_mixed_commutator(a, b, m, n)
            out.append(Check(f"[(a+^{a} a),(a+^{b})^{m}] N={n}", eng == pub,
                             {"engine": str(eng), "published": str(pub)}))
    return out


def recursion_checks(seed: int = 0) -> list:
    """Generic recursion against the published SU(3)/SU(4) forms and numeric eigenvectors."""
    rng = random.Random(seed)
    out = []
    for n, pub, ncut in ((3, published_su3_recursion, 14), (4, published_su4_recursion, 14)):
        basis = list(enumerate_basis(n, ncut))
        coeffs = {tuple(p): Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for p in basis}
        E = Fraction(rng.randint(1, 40), 7)
        bad = []
        for p in basis:
            if p.quanta > ncut - 2:
                continue
            a = recursion_row({Partition(k): v for k, v in coeffs.items()}, p, n, E)
            b = pub(coeffs, tuple(p), E)
            if a != b:
                bad.append({"p": list(p), "generic": str(a), "published": str(b)})
        out.append(Check(f"published SU({n}) recursion", not bad,
                         {"rows_checked": sum(1 for p in basis if p.quanta <= ncut - 2),
                          "mismatches": len(bad), "first": bad[:3]}))
    for n, ncut in ((2, 20), (3, 20), (4, 12), (5, 10)):
        sp = numeric_spectrum(n, ncut)
        worst = 0.0
        for i, E in enumerate(sp.eigenvalues):
            c = {p: sp.eigenvectors[j, i] for j, p in enumerate(sp.basis.states)}
            worst = max(worst, recursion_residual(c, n, ncut, E, where="all", relative=True))
        out.append(Check(f"numeric eigenvectors satisfy recursion N={n} ncut={ncut}", worst <= 1e-8,
                         {"max_relative_residual": worst}))
    return out


def oracle_checks(max_quanta: int = 6, tol: float = 1e-10) -> list:
    """Gram and Hamiltonian elements against the dense oscillator oracle."""
    from .oracle import get_oracle

    out = []
    for n in (2, 3):
        orc = get_oracle(n)
        basis = enumerate_basis(n, max_quanta)
        h = hamiltonian_matrix(basis)
        vecs = [orc.state(p) for p in basis]
        hv = [orc.hamiltonian(v) for v in vecs]
        worst_s = worst_h = 0.0
        for i, j in itertools.product(range(len(basis)), repeat=2):
            s_or = float(np.vdot(vecs[i], vecs[j]).real)
            worst_s = max(worst_s, abs(float(inner_product(basis[i], basis[j], n)) - s_or))
            h_or = float(np.vdot(vecs[i], hv[j]).real)
            worst_h = max(worst_h, abs(float(h[i, j]) - h_or))
        out.append(Check(f"Gram vs oracle N={n}", worst_s <= tol, {"max_abs_error": worst_s}))
        out.append(Check(f"Hamiltonian vs oracle N={n}", worst_h <= tol, {"max_abs_error": worst_h}))
    return out


def overlap_checks(tol: float = 1e-8) -> list:
    """Regulated overlap: series against Bessel closed form, and the Gaussian limit."""
    out = []
    for n in (3, 4):
        worst = 0.0
        for E, E2, z in itertools.product((0.5, 1.0, 2.0), (0.5, 1.0, 2.0), (0.3, 0.6, 0.9)):
            worst = max(worst, continuum_overlap(n, E, E2, z).relative_difference)
        out.append(Check(f"overlap series vs closed form N={n}", worst <= tol, {"max_relative_difference": worst}))
        ratios = []
        for E, E2 in ((1.0, 1.2), (0.5, 0.7), (2.0, 2.5)):
            r = continuum_overlap(n, E, E2, 0.99)
            ratios.append(r.closed / gaussian_overlap(n, E, E2, 0.99))
        out.append(Check(f"Gaussian z->1 form N={n}", all(abs(r - 1) <= 0.1 for r in ratios),
                         {"ratios": [float(r) for r in ratios]}))
    return out


SUITES = {
    "appendix": appendix_checks,
    "recursion": recursion_checks,
    "oracle": oracle_checks,
    "overlap": overlap_checks,
}


def run_suite(name: str) -> list:
    if name == "all":
        return [c for key in SUITES for c in SUITES[key]()]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return SUITES[name]()
