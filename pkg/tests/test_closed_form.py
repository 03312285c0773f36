import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_genlaguerre, roots_genlaguerre

from symqm.closed_form import (BrickDataUnavailable, BrickTable, Family, LaguerreSpec, compare_spectra,
                               enumerate_families, gamma0, laguerre_eval, laguerre_roots, pure_fermionic_subsets,
                               scaled_laguerre_sequence, theta_bosonic, theta_fermionic)
from symqm.fock_basis import count_states


@pytest.mark.parametrize("m,g,x,want", [(1, 3, 4.0, 0.0), (2, 3, 5.0, -2.5), (0, 7, 3.3, 1.0)])
def test_laguerre_eval_examples(m, g, x, want):
    assert laguerre_eval(LaguerreSpec(m, g), x) == pytest.approx(want, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 40), st.sampled_from([Fraction(1, 2), 3, Fraction(13, 2), 11, 25]), st.floats(0, 60))
def test_laguerre_eval_matches_scipy(m, g, x):
    want = eval_genlaguerre(m, float(g), x)
    assert laguerre_eval(LaguerreSpec(m, g), x) == pytest.approx(want, rel=1e-9, abs=1e-9 * max(1, abs(want)))


def test_gamma_must_exceed_minus_one():
    with pytest.raises(ValueError):
        LaguerreSpec(2, -1)


@pytest.mark.parametrize("m,g", [(1, 3), (2, 3), (7, Fraction(13, 2)), (30, 12), (60, 3)])
def test_roots_match_scipy(m, g):
    got = laguerre_roots(LaguerreSpec(m, g))
    want = roots_genlaguerre(m, float(g))[0]
    assert np.allclose(got, np.sort(want), rtol=1e-10)
    assert np.all(np.diff(got) > 0)


def test_quadratic_roots():
    assert laguerre_roots(LaguerreSpec(2, 3)) == pytest.approx([5 - 5 ** 0.5, 5 + 5 ** 0.5])


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_linear_root_is_vacuum_level(n):
    assert laguerre_roots(LaguerreSpec(1, gamma0(n)))[0] == pytest.approx((n * n - 1) / 2)


def test_scaled_sequence_satisfies_recursion():
    g, x = 5.5, 3.7
    L = scaled_laguerre_sequence(10, g, x)
    for k in range(1, 10):
        assert L[k - 1] - (2 * k + g + 1 - x) * L[k] + (k + 1) * (k + g + 1) * L[k + 1] == pytest.approx(0, abs=1e-12)


def test_families_su3_ncut6():
    fams = [(f.tail, m) for f, m in enumerate_families(3, 6)]
    assert fams == [((0,), 4), ((1,), 2), ((2,), 1)]


def test_families_su2_single():
    assert [f.tail for f, _ in enumerate_families(2, 11)] == [()]


def test_families_su4_ncut7():
    fams = {f.tail: m for f, m in enumerate_families(4, 7)}
    assert fams == {(0, 0): 4, (1, 0): 3, (0, 1): 2, (2, 0): 1, (1, 1): 1}


def test_family_gamma():
    assert Family((0,)).gamma() == 3
    assert Family((2, 0)).gamma() == Fraction(15, 2) - 1 + 6
    assert Family((0,), nB=2).gamma() == 5


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 12))
def test_zero_count_equals_dimension(n, ncut):
    assert len(theta_bosonic(n, ncut)) == count_states(n, ncut)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_smallest_level_in_empty_tail_family(n):
    for ncut in range(0, 11):
        sp = theta_bosonic(n, ncut)
        assert not any(sp.entries[0].family.tail)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ground_level_decreases_with_cutoff(n):
    lows = [theta_bosonic(n, c).energies[0] for c in range(0, 40, 2)]
    assert np.all(np.diff(lows) < 0)


@pytest.mark.parametrize("n,ncut", [(2, 14), (3, 12), (4, 10), (5, 8)])
def test_matches_numeric(n, ncut):
    rep = compare_spectra(n, ncut)
    assert rep.match, rep.to_json()


def test_brick_table_round_trip(tmp_path):
    t = BrickTable(3, 2, ())
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"N": 3, "nF": 2, "bricks": [{"alpha": 1, "nB": 2}]}))
    t = BrickTable.from_json(path)
    assert t.to_json() == {"N": 3, "nF": 2, "bricks": [{"alpha": 1, "nB": 2}]}
    with pytest.raises(ValueError):
        BrickTable.from_json({"N": 3, "nF": 2, "bricks": [{"alpha": 1, "nB": 0}, {"alpha": 1, "nB": 2}]})


def test_synthetic_table_level():
    t = BrickTable.from_json({"N": 3, "nF": 2, "bricks": [{"alpha": 1, "nB": 2}]})
    sp = theta_fermionic(3, 2, table=t)
    assert sp.energies == pytest.approx([3.0])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_pure_fermionic_sector_copies_bosonic(n):
    assert np.allclose(theta_fermionic(n, 8, nF=3).energies, theta_bosonic(n, 8).energies)


def test_missing_brick_data():
    with pytest.raises(BrickDataUnavailable, match="brick data unavailable"):
        theta_fermionic(3, 4, nF=4)


def test_pure_subsets():
    assert pure_fermionic_subsets(3, 8) == [(3, 5)]
    assert pure_fermionic_subsets(2, 3) == [(3,)]
    assert pure_fermionic_subsets(2, 5) == []
