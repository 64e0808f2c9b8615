"""Integer index calculus: in/out functions, run extrema, c-maps,
the three-case neighbour lemma and the sector indices.

Everything here is exact integer / Fraction arithmetic.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from functools import lru_cache

from .cyclotomic_order import check_coprime
from .errors import UnsupportedCaseError, UsageError


# ---------------------------------------------------------------------------
# conventions
# ---------------------------------------------------------------------------

# The three "reading" fields travel together in the calibration search:
# a reading is either the formulas exactly as typeset, or the reading
# obtained by cross-referencing each formula against the statements that
# use it.  The README explains why they are bundled.
READINGS = {
    "as_printed": {"interval_closure": "closed",
                   "unit_case_entry": "printed",
                   "explicit_monodromy_variant": "bounded_window"},
    "cross_referenced": {"interval_closure": "half_open",
                         "unit_case_entry": "general_rule",
                         "explicit_monodromy_variant": "unbounded_run"},
}

_CHOICES = {
    "ev_in_bracket": ("floor", "ceil"),
    "odd_in_bracket": ("floor", "ceil"),
    "nat_contains_zero": (True, False),
    "wrap_twist_direction": ("T_inv", "T"),
    "interval_closure": ("closed", "half_open"),
    "unit_case_entry": ("printed", "general_rule"),
    "explicit_monodromy_variant": ("bounded_window", "unbounded_run"),
}


@dataclass(frozen=True)
class ConventionSet:
    """Pinned resolution of the notational ambiguities.

    ev_in_bracket       floor(x + 1/2) or ceil(x + 1/2) for ev_in
    odd_in_bracket      floor(x) or ceil(x) for odd_in
    nat_contains_zero   whether 0 counts as a natural number
    wrap_twist_direction
                        'T_inv': slot j wraps to j + s n with T^{-s};
                        'T': with T^{s}
    interval_closure    'closed' [x - 1/2, x] or 'half_open' (x - 1/2, x]
                        in the identity-branch test of the sigma maps
    unit_case_entry     p = q = 1: 'printed' uses the displayed 2x2 matrices,
                        'general_rule' runs the general three-term formula
    explicit_monodromy_variant
                        'bounded_window': max_out with the same upper bound
                        as the sigma maps; 'unbounded_run': the full run
    """

    ev_in_bracket: str = "floor"
    odd_in_bracket: str = "floor"
    nat_contains_zero: bool = True
    wrap_twist_direction: str = "T_inv"
    interval_closure: str = "closed"
    unit_case_entry: str = "printed"
    explicit_monodromy_variant: str = "bounded_window"

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v not in _CHOICES[f.name]:
                raise UsageError(f"convention {f.name}={v!r} not in {_CHOICES[f.name]}")

    @property
    def reading(self) -> str | None:
        """Name of the bundled reading, or None for a mixed assignment."""
        own = {k: getattr(self, k) for k in READINGS["as_printed"]}
        for name, vals in READINGS.items():
            if own == vals:
                return name
        return None

    def to_doc(self) -> dict:
        d = asdict(self)
        d["reading"] = self.reading
        return d

    @classmethod
    def from_doc(cls, doc: dict) -> "ConventionSet":
        if not isinstance(doc, dict):
            raise UsageError("conventions document must be an object")
        d = {k: v for k, v in doc.items() if k in _CHOICES}
        if "reading" in doc and doc["reading"] is not None:
            if doc["reading"] not in READINGS:
                raise UsageError(f"unknown reading {doc['reading']!r}")
            for k, v in READINGS[doc["reading"]].items():
                d.setdefault(k, v)
        return cls(**d)

    def with_reading(self, reading: str) -> "ConventionSet":
        return replace(self, **READINGS[reading])

    def key(self) -> str:
        return ",".join(f"{k}={getattr(self, k)}" for k in _CHOICES)


DEFAULT_CONVENTIONS = ConventionSet()


def convention_search_space() -> list[ConventionSet]:
    """The 32 calibration candidates: 2^4 bracket/set/twist choices x 2 readings."""
    out = []
    for ev, odd, nat0, wrap, reading in itertools.product(
            _CHOICES["ev_in_bracket"], _CHOICES["odd_in_bracket"],
            _CHOICES["nat_contains_zero"], _CHOICES["wrap_twist_direction"], READINGS):
        out.append(ConventionSet(ev, odd, nat0, wrap, **READINGS[reading]))
    return out


def single_field_variants(conv: ConventionSet) -> list[tuple[str, ConventionSet]]:
    """conv with exactly one field flipped (ablation neighbours)."""
    out = []
    for name, choices in _CHOICES.items():
        for v in choices:
            if v != getattr(conv, name):
                out.append((name, replace(conv, **{name: v})))
    return out


# ---------------------------------------------------------------------------
# index functions
# ---------------------------------------------------------------------------

def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def ev_in(p: int, q: int, k: int, conv: ConventionSet = DEFAULT_CONVENTIONS) -> int:
    x = Fraction(q * k, p + q) + Fraction(1, 2)
    return _floor_frac(x) if conv.ev_in_bracket == "floor" else _ceil_frac(x)


def ev_out(p: int, q: int, k: int, conv: ConventionSet = DEFAULT_CONVENTIONS) -> int:
    return k - ev_in(p, q, k, conv)


def odd_in(p: int, q: int, k: int, conv: ConventionSet = DEFAULT_CONVENTIONS) -> int:
    x = Fraction(q * k, p + q)
    return _floor_frac(x) if conv.odd_in_bracket == "floor" else _ceil_frac(x)


def odd_out(p: int, q: int, k: int, conv: ConventionSet = DEFAULT_CONVENTIONS) -> int:
    return k - 1 - odd_in(p, q, k, conv)


PARITIES = ("ev", "odd")


@dataclass(frozen=True)
class IndexProfile:
    """Index tables on the window k in [lo, hi] with lo = -(p+q), hi = 2(p+q)."""

    p: int
    q: int
    conv: ConventionSet
    lo: int
    hi: int
    ev_in: tuple[int, ...]
    ev_out: tuple[int, ...]
    odd_in: tuple[int, ...]
    odd_out: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.p + self.q

    def _at(self, table, k: int) -> int:
        if not self.lo <= k <= self.hi:
            raise IndexError(f"k={k} outside the window [{self.lo}, {self.hi}]")
        return table[k - self.lo]

    def in_(self, parity: str, k: int) -> int:
        return self._at(self.ev_in if parity == "ev" else self.odd_in, k)

    def out(self, parity: str, k: int) -> int:
        return self._at(self.ev_out if parity == "ev" else self.odd_out, k)

    def min_in(self, parity: str, k: int) -> int:
        bound = Fraction(-self.n, 2 * self.q)
        v = self.in_(parity, k)
        j = k
        while j - 1 >= bound and self.in_(parity, j - 1) == v:
            j -= 1
        return j

    def max_out(self, parity: str, k: int, bounded: bool = True) -> int:
        """Greatest k'' >= k with constant out on [k, k''].

        bounded: additionally k'' < n + n/(2p).
        """
        bound = self.n + Fraction(self.n, 2 * self.p)
        v = self.out(parity, k)
        j = k
        while (not bounded or j + 1 < bound) and self.out(parity, j + 1) == v:
            j += 1
        return j

    def table(self, parity: str, which: str, ks=None) -> list[int]:
        ks = range(self.n) if ks is None else ks
        f = self.in_ if which == "in" else self.out
        return [f(parity, k) for k in ks]

    def to_doc(self) -> dict:
        ks = range(self.n)
        return {"p": self.p, "q": self.q,
                "k": list(ks),
                "ev_in": self.table("ev", "in"), "ev_out": self.table("ev", "out"),
                "odd_in": self.table("odd", "in"), "odd_out": self.table("odd", "out"),
                "ev_min_in": [self.min_in("ev", k) for k in ks],
                "ev_max_out": [self.max_out("ev", k) for k in ks],
                "odd_min_in": [self.min_in("odd", k) for k in ks],
                "odd_max_out": [self.max_out("odd", k) for k in ks]}


@lru_cache(maxsize=4096)
def index_functions(p: int, q: int, conv: ConventionSet = DEFAULT_CONVENTIONS) -> IndexProfile:
    check_coprime(p, q)
    n = p + q
    lo, hi = -n, 2 * n
    ks = range(lo, hi + 1)
    return IndexProfile(
        p, q, conv, lo, hi,
        tuple(ev_in(p, q, k, conv) for k in ks),
        tuple(ev_out(p, q, k, conv) for k in ks),
        tuple(odd_in(p, q, k, conv) for k in ks),
        tuple(odd_out(p, q, k, conv) for k in ks),
    )


def interval_empty(p: int, q: int, k: int, conv: ConventionSet = DEFAULT_CONVENTIONS) -> bool:
    """Whether [qk/n - 1/2, qk/n] (or its half-open variant) misses the naturals."""
    hi = Fraction(q * k, p + q)
    lo = hi - Fraction(1, 2)
    if conv.interval_closure == "closed":
        first = _ceil_frac(lo)
    else:
        first = _floor_frac(lo) + 1
    if not conv.nat_contains_zero:
        first = max(first, 1)
    else:
        first = max(first, 0)
    return first > hi


def run_extrema(profile: IndexProfile, parity: str, k: int) -> tuple[int, int]:
    if parity not in PARITIES:
        raise UsageError(f"parity must be one of {PARITIES}")
    return profile.min_in(parity, k), profile.max_out(parity, k)


def c_map(p: int, q: int, parity: str, k: int,
          conv: ConventionSet = DEFAULT_CONVENTIONS) -> tuple[int, int]:
    prof = index_functions(p, q, conv)
    return prof.in_(parity, k) % q, prof.out(parity, k) % p


# ---------------------------------------------------------------------------
# interval oracle (angles in units of pi, exact)
# ---------------------------------------------------------------------------

def arcs_meet_for_small_eps(center_a, half_a, center_b, half_b, drift: int, period=2) -> bool:
    """Open arcs (center_a ± half_a) and (center_b + drift*eps ± half_b) on
    R / period Z meet for every sufficiently small eps > 0.  Works for any
    exact number type (Fraction, or int after rescaling)."""
    H = half_a + half_b
    d0 = (center_b - center_a) % period
    for w in (-period, 0, period):
        x = d0 + w
        if -H < x < H or (x == -H and drift > 0) or (x == H and drift < 0):
            return True
    return False


def c_map_by_intervals(p: int, q: int, parity: str, k: int) -> tuple[list[int], list[int]]:
    """All m (resp. n) whose eps-shifted boundary interval meets the rotated
    reference interval; the c-map should be the unique element of each.

    Angles in units of pi.  Inner intervals: centre 2m/q (even) or
    (2m+1)/q (odd), half-width 1/(2q), shifted by -eps/q.  Outer: centre
    2n/p or (2n+1)/p, half-width 1/(2p), shifted by +eps/p.  The reference
    is the inner (resp. outer) zeroth even interval rotated by 2k/(p+q).
    Everything is scaled by D = 2pq(p+q) so the test runs on integers.
    """
    n = p + q
    D = 2 * p * q * n
    rot = 2 * k * (D // n)
    off = 0 if parity == "ev" else 1
    hq, hp = D // (2 * q), D // (2 * p)
    ms = [m for m in range(q)
          if arcs_meet_for_small_eps(rot, hq, (2 * m + off) * (D // q), hq, -1, 2 * D)]
    ns = [j for j in range(p)
          if arcs_meet_for_small_eps(rot, hp, (2 * j + off) * (D // p), hp, +1, 2 * D)]
    return ms, ns


# ---------------------------------------------------------------------------
# neighbour trichotomy and sectors
# ---------------------------------------------------------------------------

def trichotomy(p: int, q: int, k: int, conv: ConventionSet = DEFAULT_CONVENTIONS) -> str:
    """'i', 'ii' or 'iii' by the position of k/(p+q) in the m-th window."""
    check_coprime(p, q)
    if p <= q:
        raise UnsupportedCaseError("trichotomy needs p > q")
    n = p + q
    m = ev_in(p, q, k, conv) % q
    base = Fraction(m, q) - Fraction(1, 2 * q)
    y = (Fraction(k, n) - base) % 1
    if y < Fraction(1, n):
        return "i"
    if y < Fraction(1, q) - Fraction(1, n):
        return "ii"
    if y < Fraction(1, q):
        return "iii"
    raise AssertionError(f"k={k} lies outside its own window (m={m})")


def neighbour_case(p: int, q: int, k: int, conv: ConventionSet = DEFAULT_CONVENTIONS) -> list[str]:
    """Cases whose neighbour description matches the raw (unreduced) index tables."""
    i0, o0 = ev_in(p, q, k, conv), ev_out(p, q, k, conv)
    before = (ev_in(p, q, k - 1, conv) - i0, ev_out(p, q, k - 1, conv) - o0)
    after = (ev_in(p, q, k + 1, conv) - i0, ev_out(p, q, k + 1, conv) - o0)
    patterns = {"i": ((-1, 0), (0, 1)), "ii": ((0, -1), (0, 1)), "iii": ((0, -1), (1, 0))}
    return [c for c, pat in patterns.items() if pat == (before, after)]


def sector_indices(p: int, q: int, m: int) -> tuple[int, int, int]:
    """(k_min(m), k_mid(m), k_max(m))."""
    check_coprime(p, q)
    if p <= q and not (p == q == 1):
        raise UnsupportedCaseError("sector indices are defined for p > q")
    if not 0 <= m < q:
        raise UsageError(f"m={m} outside [0, {q - 1}]")
    return _k_min(p, q, m), _k_mid(p, q, m), _k_max(p, q, m)


def _k_min(p, q, m):
    return _ceil_frac(Fraction(m * (p + q), q))


def _k_mid(p, q, m):
    return _ceil_frac(Fraction((2 * m + 1) * (p + q), 2 * q))


def _k_max(p, q, m):
    return _ceil_frac(Fraction((m + 1) * (p + q), q) - 1)
