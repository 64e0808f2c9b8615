from itertools import combinations
from math import gcd

import pytest

from stokesdata.cyclotomic_order import (RootOfUnity, bezout, closed_form_ev, compare_ev,
                                         compare_odd, enumerate_ev, odd_min, trig_sign)
from stokesdata.errors import UsageError


def coprime(bound):
    return [(p, n - p) for n in range(2, bound + 1) for p in range(1, n) if gcd(p, n - p) == 1]


def test_trig_sign_examples():
    assert trig_sign(9, "sin", 1) == 1
    assert trig_sign(9, "cos_diff", 1, -1) == 0
    assert trig_sign(9, "cos_diff", 1, 2) == 1
    assert trig_sign(4, "sin", 2) == 0
    with pytest.raises(UsageError):
        trig_sign(9, "tan", 1)


def test_compare_examples():
    assert compare_ev(4, 5, 0, 7) == -1
    assert compare_ev(4, 5, 7, 2) == -1
    assert compare_ev(4, 5, 3, 3) == 0
    assert compare_odd(4, 5, 7, 2) == 1


def test_enumerate_examples():
    t = enumerate_ev(4, 5)
    assert list(t.even_order) == [0, 7, 2, 5, 4, 3, 6, 1, 8]
    assert (t.a, t.b) == (7, 3)
    assert list(t.odd_order) == [8, 1, 6, 3, 4, 5, 2, 7, 0]
    t = enumerate_ev(1, 1)
    assert list(t.even_order) == [0, 1] and t.zeta_max == 1
    t = enumerate_ev(2, 1)
    assert list(t.even_order) == [0, 2, 1] and t.a == 2
    with pytest.raises(UsageError):
        enumerate_ev(2, 4)


def test_odd_min_examples():
    assert odd_min(1, 1) == (RootOfUnity(2, 1), 1)
    assert odd_min(4, 5) == (RootOfUnity(9, 8), 8)
    assert odd_min(2, 1) == (RootOfUnity(3, 1), 1)


@pytest.mark.parametrize("p,q", coprime(30))
def test_order_matches_closed_form(p, q):
    t = enumerate_ev(p, q)
    n = p + q
    assert list(t.even_order) == closed_form_ev(p, q)
    assert t.even_order[0] == 0 and t.odd_order[-1] == 0
    assert t.odd_order[0] == odd_min(p, q)[1]
    a, b = bezout(p, q)
    assert a * p == 1 + b * n
    if n % 2 == 0:
        assert t.zeta_max == n // 2


@pytest.mark.parametrize("p,q", coprime(12))
def test_compare_is_strict_total_order(p, q):
    n = p + q
    for j, k in combinations(range(n), 2):
        c = compare_ev(p, q, j, k)
        assert c in (-1, 1) and compare_ev(p, q, k, j) == -c
    # depends only on the points xi^{pj}
    for j in range(n):
        for k in range(n):
            assert compare_ev(p, q, j, k) == compare_ev(p, q, j + n, k - n)


def test_root_of_unity_algebra():
    z = RootOfUnity(9, 7)
    assert (z * z).exponent == 5
    assert (z ** -1).exponent == 2
    assert abs(z.to_complex() ** 9 - 1) < 1e-12
