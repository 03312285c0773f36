import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import eval_genlaguerre, gamma

from symqm.closed_form import Family, LaguerreSpec, gamma0, laguerre_roots
from symqm.eigenstates import (MixingAnsatzError, NoVacuumInSector, NotARootError, build_family_state,
                               continuum_overlap, dress_fermionic, family_states, gaussian_overlap,
                               hille_hardy_overlap, laguerre_ratio_sequence, mixing_from_transitions,
                               reachable_tails, s_overlap_matrix, solve_mixing_coeffs, state_residual,
                               transition_coefficients, vacuum_profile)
from symqm.fock_basis import enumerate_basis, inner_product
from symqm.hamiltonian import numeric_spectrum


def test_ratio_sequence_is_exact_laguerre():
    g, x = Fraction(13, 2), Fraction(7, 5)
    seq = laguerre_ratio_sequence(6, g, x)
    for k, v in enumerate(seq):
        want = eval_genlaguerre(k, float(g), float(x)) * gamma(float(g) + 1) / gamma(k + float(g) + 1)
        assert float(v) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_empty_tail_has_no_mixing(n):
    assert solve_mixing_coeffs(n, (0,) * (n - 2)).A == {}


def test_su3_two_threes():
    m = solve_mixing_coeffs(3, (2,))
    assert m.A == {(0,): Fraction(-1, 24)}
    assert m.shift((0,)) == 3
    assert solve_mixing_coeffs(3, (2,), ansatz="template").A == m.A


def test_su3_two_threes_against_numeric_eigenvector():
    ncut = 10
    fam = Family((2,))
    E = laguerre_roots(fam.spec(ncut))[0] / 2
    sp = numeric_spectrum(3, ncut)
    k = int(np.argmin(np.abs(sp.eigenvalues - E)))
    assert sp.eigenvalues[k] == pytest.approx(E, rel=1e-10)
    c = dict(zip(sp.basis, sp.eigenvectors[:, k]))
    for n in range(0, 3):
        assert c[(n + 3, 0)] / c[(n, 2)] == pytest.approx(-1 / 24, rel=1e-8)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_two_threes_need_the_four_brick(n):
    tail = (2,) + (0,) * (n - 3)
    m = solve_mixing_coeffs(n, tail)
    four = (0, 1) + (0,) * (n - 4)
    assert set(m.A) == {four, (0,) * (n - 2)}
    # independent hand reduction of the two-step chain (2,0,..) -> (0,1,..) -> (0,0,..)
    g0 = gamma0(n)
    b = Fraction(-9, 2) / (g0 + 5)
    c, d = Fraction(-9, 2 * n), 2 * n - Fraction(3, n)
    assert m.A[four] == b
    assert m.A[(0,) * (n - 2)] == -(c + d * b) / (3 * g0 + 9)
    with pytest.raises(MixingAnsatzError, match="inconsistent"):
        solve_mixing_coeffs(n, tail, ansatz="template")


@pytest.mark.parametrize("n,tail", [(3, (2,)), (3, (4,)), (4, (2, 0)), (4, (0, 2)), (4, (2, 1)), (5, (2, 0, 0)),
                                    (5, (1, 0, 1)), (6, (2, 0, 0, 0))])
def test_linear_solve_equals_triangular_closed_system(n, tail):
    assert solve_mixing_coeffs(n, tail).A == mixing_from_transitions(n, tail).A


@pytest.mark.parametrize("n,tail", [(4, (2, 0)), (4, (0, 2)), (5, (1, 0, 1))])
def test_transitions_do_not_depend_on_p2(n, tail):
    base = transition_coefficients(n, tail, 0)
    for p2 in (1, 3):
        assert transition_coefficients(n, tail, p2) == base


def test_reachable_tails_lower_weight():
    tails = reachable_tails(4, (2, 0))
    assert tails == [(2, 0), (0, 1), (0, 0)]


def test_finite_state_example():
    E = (5 - 5 ** 0.5) / 2
    s = build_family_state(3, (0,), E, ncut=2)
    v = s.to_vector(enumerate_basis(3, 2))
    prof = np.array([eval_genlaguerre(k, 3, 2 * E) / gamma(k + 4) for k in range(2)])
    assert v / v[0] == pytest.approx(prof / prof[0])
    num = numeric_spectrum(3, 2).eigenvectors[:, 0]
    assert num / num[0] == pytest.approx(v / v[0])
    assert s.coeffs[(0, 0)] == pytest.approx(math.exp(-E) / gamma(4))


def test_not_a_root():
    with pytest.raises(NotARootError):
        build_family_state(3, (0,), 1.0, ncut=2)


def test_mixing_component_in_state():
    n, ncut = 4, 10
    fam = Family((2, 0))
    E = laguerre_roots(fam.spec(ncut))[0] / 2
    s = build_family_state(n, fam, E, ncut=ncut)
    A = float(solve_mixing_coeffs(n, (2, 0)).A[(0, 0)])
    for k in range(fam.order(ncut)):
        assert s.coeffs[(k + 3, 0, 0)] == pytest.approx(A * s.coeffs[(k, 2, 0)])
    assert state_residual(s) <= 1e-10


@pytest.mark.parametrize("n,ncut", [(2, 10), (3, 11), (4, 10)])
def test_family_states_are_eigenstates(n, ncut):
    states = family_states(n, ncut)
    assert len(states) == len(enumerate_basis(n, ncut))
    assert max(state_residual(s) for s in states) <= 1e-9
    o = s_overlap_matrix(states, ncut)
    e = np.array([s.E for s in states])
    distinct = np.abs(e[:, None] - e[None, :]) > 1e-8
    assert np.max(np.abs(o[distinct]), initial=0) <= 1e-8
    assert np.linalg.matrix_rank(o) == len(states)


def test_support_outside_family_is_zero():
    s = build_family_state(4, (0, 1), laguerre_roots(Family((0, 1)).spec(10))[1] / 2, ncut=10)
    allowed = set(reachable_tails(4, (0, 1)))
    assert all(tuple(p)[1:] in allowed for p in s.coeffs)


def test_continuum_zero_energy_profile():
    s = build_family_state(3, (0,), 0.0, mode="continuum")
    g = 3
    for k in range(6):
        assert s.coeffs[(k, 0)] == pytest.approx(eval_genlaguerre(k, g, 0) / gamma(k + g + 1), rel=1e-10)
    assert s.terms > 100


def test_continuum_norm_matches_overlap():
    n, E, z = 3, 0.8, 0.5
    s = build_family_state(n, (0,), E, mode="continuum", z=0.99, tol=1e-14)
    total = sum(c * c * float(inner_product(p, p, n)) * z ** p[0] for p, c in s.coeffs.items() if p[0] < 60)
    assert total == pytest.approx(continuum_overlap(n, E, E, z).closed, rel=1e-10)


def test_dressing():
    s = build_family_state(3, (0,), 2.0, ncut=0)
    assert dress_fermionic(s, []) == s
    d = dress_fermionic(s, [3])
    assert d.nF == 3 and d.coeffs == s.coeffs
    assert dress_fermionic(d, [5]).nF == 8
    with pytest.raises(ValueError):
        dress_fermionic(s, [3, 3])
    with pytest.raises(ValueError):
        dress_fermionic(d, [3])
    with pytest.raises(ValueError):
        dress_fermionic(s, [7])


def test_vacuum_sectors():
    for nF in (0, 3, 5, 8):
        assert vacuum_profile(3, nF).state.nF == nF
    for nF in (1, 2, 4, 6, 7):
        with pytest.raises(NoVacuumInSector):
            vacuum_profile(3, nF)
    assert [vacuum_profile(2, k).state.nF for k in (0, 3)] == [0, 3]
    with pytest.raises(NoVacuumInSector):
        vacuum_profile(2, [5])


def test_vacuum_suppression_exponents():
    v = vacuum_profile(4, 0)
    assert v.suppression[(2, 0)] == 3
    assert v.suppression[(0, 1)] == 2
    assert (0, 0) not in v.suppression


@pytest.mark.parametrize("n", [3, 4])
def test_overlap_series_matches_bessel(n):
    for E in (0.5, 1.0, 2.0):
        for E2 in (0.5, 1.0, 2.0):
            for z in (0.3, 0.6, 0.9):
                r = continuum_overlap(n, E, E2, z)
                assert r.series == pytest.approx(r.closed, rel=1e-8)


def test_overlap_small_z_limit():
    E, E2 = 1.0, 1.5
    want = math.exp(-E - E2) / gamma(float(gamma0(3)) + 1) ** 2
    assert continuum_overlap(3, E, E2, 1e-12).series == pytest.approx(want, rel=1e-9)


@pytest.mark.parametrize("E,E2", [(1.0, 1.2), (0.5, 0.7), (2.0, 2.4)])
def test_gaussian_form_near_one(E, E2):
    ratio = hille_hardy_overlap(3, E, E2, 0.99) / gaussian_overlap(3, E, E2, 0.99)
    assert abs(ratio - 1) <= 0.1


def test_overlap_argument_errors():
    with pytest.raises(ValueError):
        continuum_overlap(3, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        continuum_overlap(3, -1.0, 1.0, 0.5)


def test_state_json():
    s = dress_fermionic(build_family_state(3, (0,), (5 - 5 ** 0.5) / 2, ncut=2), [3])
    j = s.to_json()
    assert set(j) == {"family", "nF", "E", "coeffs"}
    assert j["nF"] == 3 and j["family"] == [0]
    assert [c["p"] for c in j["coeffs"]] == [[0, 0], [1, 0]]
