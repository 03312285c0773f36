from fractions import Fraction

import numpy as np
import pytest

from symqm.trace_algebra import annihilate, create, elementary_symmetric, partition_poly, power_sum, reduce_poly
from symqm.trace_algebra.polynomial import poly_to_partitions


def _evaluate(poly, x):
    tr = {}
    total = 0
    for key, c in poly.items():
        term = complex(c)
        for k in key:
            if k not in tr:
                tr[k] = np.trace(np.linalg.matrix_power(x, k))
            term *= tr[k]
        total += term
    return total


def _traceless(n, rng):
    m = rng.normal(size=(n, n))
    return m - np.trace(m) / n * np.eye(n)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_power_sums_match_random_matrices(n, rng):
    x = _traceless(n, rng)
    for k in range(0, 3 * n):
        want = np.trace(np.linalg.matrix_power(x, k)) if k else n
        got = _evaluate(power_sum(k, n), x)
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_elementary_symmetric_match_characteristic_polynomial(n, rng):
    x = _traceless(n, rng)
    coeffs = np.poly(x)  # x^n - e1 x^{n-1} + e2 x^{n-2} - ...
    for i in range(n + 1):
        assert abs(_evaluate(elementary_symmetric(i, n), x) - (-1) ** i * coeffs[i]) <= 1e-9


def test_power_sum_examples():
    assert power_sum(4, 3) == {(2, 2): Fraction(1, 2)}
    assert power_sum(3, 2) == {}
    assert power_sum(1, 5) == {}
    with pytest.raises(ValueError):
        power_sum(3, 1)


def test_reduce_is_identity_on_reduced():
    p = {(2, 3): Fraction(2), (4,): Fraction(-1)}
    assert reduce_poly(p, 4) == p


def test_poly_to_partitions_rejects_unreduced():
    with pytest.raises(ValueError):
        poly_to_partitions({(5,): Fraction(1)}, 4)


def test_annihilate_brick_on_own_state():
    # tr(a^2) tr(a+^2)|0> = (N^2 - 1)/2 |0>
    for n in (2, 3, 4):
        assert annihilate(2, create(2, {(): Fraction(1)}, n), n) == {(): Fraction(n * n - 1, 2)}


def test_partition_poly():
    assert partition_poly((1, 0, 2)) == {(2, 4, 4): Fraction(1)}
