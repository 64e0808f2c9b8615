from math import gcd

import pytest

from stokesdata.errors import UnsupportedCaseError, UsageError
from stokesdata.stokes_combinatorics import (DEFAULT_CONVENTIONS, ConventionSet, c_map,
                                             c_map_by_intervals, convention_search_space,
                                             index_functions, interval_empty, neighbour_case,
                                             run_extrema, sector_indices, single_field_variants,
                                             trichotomy)


def coprime(bound):
    return [(p, n - p) for n in range(2, bound + 1) for p in range(1, n) if gcd(p, n - p) == 1]


def test_index_tables_4_5():
    prof = index_functions(4, 5)
    assert prof.table("ev", "in") == [0, 1, 1, 2, 2, 3, 3, 4, 4]
    assert prof.table("ev", "out") == [0, 0, 1, 1, 2, 2, 3, 3, 4]
    assert prof.table("odd", "in") == [0, 0, 1, 1, 2, 2, 3, 3, 4]
    assert prof.table("odd", "out") == [-1, 0, 0, 1, 1, 2, 2, 3, 3]


def test_interval_empty_examples():
    assert [interval_empty(4, 5, k) for k in (1, 2, 0)] == [True, False, False]


def test_run_extrema_examples():
    assert run_extrema(index_functions(2, 1), "odd", 1)[0] == 0
    assert run_extrema(index_functions(2, 1), "odd", 2)[1] == 3
    assert run_extrema(index_functions(1, 1), "ev", 0)[1] == 1
    with pytest.raises(UsageError):
        run_extrema(index_functions(1, 1), "middle", 0)


def test_c_map_examples():
    assert [c_map(4, 3, "ev", k)[0] for k in range(7)] == [0, 0, 1, 1, 2, 2, 0]
    assert [c_map(4, 3, "ev", k)[1] for k in range(7)] == [0, 1, 1, 2, 2, 3, 3]
    assert c_map(2, 1, "odd", 1) == (0, 0)
    for p, q in coprime(10):
        assert c_map(p, q, "ev", 0) == (0, 0)


def test_trichotomy_examples():
    assert trichotomy(4, 3, 1) == "iii"
    assert trichotomy(4, 1, 0) == "ii"
    assert trichotomy(5, 2, 0) == "ii"
    with pytest.raises(UnsupportedCaseError):
        trichotomy(3, 4, 0)


def test_sector_examples():
    assert sector_indices(4, 1, 0) == (0, 3, 4)
    assert sector_indices(5, 2, 0) == (0, 2, 3)
    assert sector_indices(5, 2, 1) == (4, 6, 6)
    with pytest.raises(UsageError):
        sector_indices(5, 2, 2)
    with pytest.raises(UnsupportedCaseError):
        sector_indices(2, 5, 0)


def test_convention_space():
    space = convention_search_space()
    assert len(space) == 32 and len({c.key() for c in space}) == 32
    assert DEFAULT_CONVENTIONS.reading == "as_printed"
    assert len(single_field_variants(DEFAULT_CONVENTIONS)) == 7
    doc = DEFAULT_CONVENTIONS.with_reading("cross_referenced").to_doc()
    assert ConventionSet.from_doc(doc) == DEFAULT_CONVENTIONS.with_reading("cross_referenced")
    assert ConventionSet.from_doc({"reading": "cross_referenced"}).interval_closure == "half_open"
    with pytest.raises(UsageError):
        ConventionSet(ev_in_bracket="round")


PINNED = DEFAULT_CONVENTIONS.with_reading("cross_referenced")


@pytest.mark.parametrize("p,q", coprime(50))
def test_profile_invariants(p, q):
    n = p + q
    prof = index_functions(p, q)
    for k in range(-n, 2 * n + 1):
        assert prof.in_("ev", k) + prof.out("ev", k) == k
        assert prof.in_("odd", k) + prof.out("odd", k) == k - 1
    for k in range(n):
        assert 0 <= prof.in_("ev", k) <= q and 0 <= prof.out("ev", k) <= p
        assert 0 <= prof.in_("odd", k) <= q - 1 and -1 <= prof.out("odd", k) <= p - 1
    for par in ("ev", "odd"):
        for which in ("in", "out"):
            t = prof.table(par, which, range(-n, 2 * n + 1))
            assert all(a <= b for a, b in zip(t, t[1:]))


@pytest.mark.parametrize("p,q", coprime(50))
def test_interval_equivalence_half_open(p, q):
    for k in range(p + q):
        prof = index_functions(p, q, PINNED)
        assert interval_empty(p, q, k, PINNED) == (prof.in_("ev", k) == prof.in_("odd", k) + 1)


def test_interval_equivalence_closed_fails_at_ties():
    # the closed reading disagrees exactly where qk/(p+q) - 1/2 is an integer
    bad = [(p, q, k) for p, q in coprime(12) for k in range(p + q)
           if interval_empty(p, q, k) != (index_functions(p, q).in_("ev", k)
                                          == index_functions(p, q).in_("odd", k) + 1)]
    assert bad
    assert all((2 * q * k) % (p + q) == 0 and ((2 * q * k) // (p + q)) % 2 == 1 for p, q, k in bad)


@pytest.mark.parametrize("p,q", coprime(50))
def test_c_map_interval_characterization(p, q):
    n = p + q
    for parity in ("ev", "odd"):
        for k in range(n):
            ms, ns = c_map_by_intervals(p, q, parity, k)
            assert (ms, ns) == ([c_map(p, q, parity, k)[0]], [c_map(p, q, parity, k)[1]])
    if p != 1 and q != 1:
        assert len({c_map(p, q, "ev", k) for k in range(n)}) == n
    if p > q:
        outs = [c_map(p, q, "ev", k)[1] for k in range(n)]
        assert max(outs.count(v) for v in set(outs)) <= 2


@pytest.mark.parametrize("p,q", [(p, q) for p, q in coprime(50) if p > q])
def test_trichotomy_and_sectors(p, q):
    for k in range(p + q):
        case = trichotomy(p, q, k)
        assert neighbour_case(p, q, k) == [case]
    prof = index_functions(p, q, PINNED)
    sectors = [sector_indices(p, q, m) for m in range(q)]
    for m, (kmin, kmid, kmax) in enumerate(sectors):
        # the gap k_max - k_mid can be 0 (e.g. (2, 1)); only s >= 2 is structural
        assert kmin <= kmid <= kmax
        if m:
            assert kmid - sectors[m - 1][2] >= 2
    for k in range(p + q):
        inside = any(kmid <= k <= kmax for _, kmid, kmax in sectors)
        assert inside == (prof.in_("ev", k) - 1 == prof.in_("odd", k))


def test_sector_gap_can_vanish():
    kmin, kmid, kmax = sector_indices(2, 1, 0)
    assert kmid == kmax == 2
