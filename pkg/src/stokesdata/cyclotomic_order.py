"""Exact order structure on the group of (p+q)-th roots of unity.

A root of unity is an integer exponent k mod n (n = p+q) standing for
xi^k with xi = exp(2 pi i / n).  All comparisons reduce to signs of sines
of rational multiples of pi, decided by integer arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from math import gcd

from .errors import UsageError


def check_coprime(p: int, q: int) -> None:
    if not (isinstance(p, int) and isinstance(q, int)) or p < 1 or q < 1:
        raise UsageError(f"p and q must be positive integers, got ({p!r}, {q!r})")
    if gcd(p, q) != 1:
        raise UsageError(f"p={p} and q={q} are not coprime")


@dataclass(frozen=True)
class RootOfUnity:
    modulus: int
    exponent: int

    def __post_init__(self):
        if self.modulus < 1:
            raise UsageError("modulus must be positive")
        if not 0 <= self.exponent < self.modulus:
            object.__setattr__(self, "exponent", self.exponent % self.modulus)

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        if other.modulus != self.modulus:
            raise UsageError("moduli differ")
        return RootOfUnity(self.modulus, self.exponent + other.exponent)

    def __pow__(self, e: int) -> "RootOfUnity":
        return RootOfUnity(self.modulus, self.exponent * e)

    def angle_fraction(self) -> Fraction:
        """arg / (2 pi) in [0, 1)."""
        return Fraction(self.exponent, self.modulus)

    def to_complex(self) -> complex:
        import cmath
        return cmath.exp(2j * cmath.pi * self.exponent / self.modulus)


# ---------------------------------------------------------------------------
# exact trigonometric signs
# ---------------------------------------------------------------------------

def sign_sin_pi(r: Fraction) -> int:
    """Sign of sin(pi r) for rational r."""
    r = Fraction(r) % 2
    if r.denominator == 1:
        return 0
    return 1 if r < 1 else -1


def sin_sign(n: int, A: int) -> int:
    """Sign of sin(2 pi A / n)."""
    return sign_sin_pi(Fraction(2 * A, n))


def cos_diff_sign(n: int, A: int, B: int) -> int:
    """Sign of cos(2 pi A/n) - cos(2 pi B/n).

    cos a - cos b = -2 sin((a+b)/2) sin((a-b)/2)
    """
    return -sign_sin_pi(Fraction(A + B, n)) * sign_sin_pi(Fraction(A - B, n))


def trig_sign(n: int, kind: str, A: int, B: int = 0) -> int:
    """Dispatch for the two supported expression shapes: 'sin' and 'cos_diff'."""
    if kind == "sin":
        return sin_sign(n, A)
    if kind == "cos_diff":
        return cos_diff_sign(n, A, B)
    raise UsageError(f"unknown trig expression {kind!r}")


# ---------------------------------------------------------------------------
# the even / odd orders
# ---------------------------------------------------------------------------

def _cmp_points(n: int, A: int, B: int) -> int:
    """Lexicographic sign of z = xi^A - xi^B: real part, then imaginary part.

    Returns +1 if (Re z > 0) or (Re z = 0 and Im z > 0), -1 for the mirrored
    case, 0 iff A = B mod n.
    """
    s = cos_diff_sign(n, A, B)
    if s:
        return s
    # Im z = sin(2 pi A/n) - sin(2 pi B/n) = 2 cos((a+b)/2) sin((a-b)/2)
    # cos(x) = sin(x + pi/2); (a+b)/2 = pi (A+B)/n
    c = sign_sin_pi(Fraction(A + B, n) + Fraction(1, 2))
    return c * sign_sin_pi(Fraction(A - B, n))


def compare_ev(p: int, q: int, j: int, k: int) -> int:
    """-1 if xi^j <_ev xi^k, 0 if equal, +1 otherwise.

    xi^j <_ev xi^k iff z = xi^{pj} - xi^{pk} is lexicographically positive
    (Re z > 0, ties broken by Im z > 0): the limit eps -> 0+ of
    Re(e^{-i eps} z) > 0.
    """
    check_coprime(p, q)
    n = p + q
    return -_cmp_points(n, p * j, p * k)


def compare_odd(p: int, q: int, j: int, k: int) -> int:
    return -compare_ev(p, q, j, k)


def bezout(p: int, q: int) -> tuple[int, int]:
    """(a, b) with a p = 1 + b (p+q) and 0 <= a < p+q."""
    n = p + q
    if n == 1:
        return 0, 0
    a = pow(p, -1, n) if n > 1 else 0
    b = (a * p - 1) // n
    return a, b


@dataclass(frozen=True)
class OrderingTable:
    p: int
    q: int
    even_order: tuple[int, ...]
    odd_order: tuple[int, ...]
    a: int
    b: int

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def zeta_max(self) -> int:
        return self.even_order[-1]

    def ev_rank(self) -> dict[int, int]:
        return {e: i for i, e in enumerate(self.even_order)}

    def odd_rank(self) -> dict[int, int]:
        return {e: i for i, e in enumerate(self.odd_order)}

    def to_doc(self) -> dict:
        return {"p": self.p, "q": self.q, "even_order": list(self.even_order),
                "odd_order": list(self.odd_order), "a": self.a, "b": self.b,
                "zeta_max": self.zeta_max}


def closed_form_ev(p: int, q: int) -> list[int]:
    """1, xi^a, xi^-a, xi^2a, xi^-2a, ... (n terms)."""
    n = p + q
    a, _ = bezout(p, q)
    seq = [0]
    j = 1
    while len(seq) < n:
        seq.append((j * a) % n)
        if len(seq) < n:
            seq.append((-j * a) % n)
        j += 1
    return seq


@lru_cache(maxsize=None)
def enumerate_ev(p: int, q: int) -> OrderingTable:
    check_coprime(p, q)
    n = p + q
    ev = sorted(range(n), key=cmp_to_key(lambda j, k: compare_ev(p, q, j, k)))
    a, b = bezout(p, q)
    if a * p != 1 + b * n:
        raise AssertionError("Bezout relation failed")
    if ev != closed_form_ev(p, q):
        raise AssertionError(f"even order {ev} disagrees with closed form {closed_form_ev(p, q)}")
    if n % 2 == 0 and ev[-1] != n // 2:
        raise AssertionError("maximum of the even order is not -1")
    return OrderingTable(p, q, tuple(ev), tuple(reversed(ev)), a, b)


def odd_min(p: int, q: int) -> tuple[RootOfUnity, int]:
    """Minimum of the odd order and the offset odd_k_min."""
    check_coprime(p, q)
    n = p + q
    a, _ = bezout(p, q)
    if n % 2 == 0:
        k = n // 2
    else:
        k = (-a * (n - 1) // 2) % n
    return RootOfUnity(n, k), k
