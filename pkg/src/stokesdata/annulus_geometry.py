"""Morse geometry on the annulus for f(X) = q X^{p+q} - (p+q) X^q + p.

g(x) = f(x) / x^q and G = arg g in [0, 2 pi).  The regions B are
translates zeta * G^{-1}(window) of angular windows of width pi; counting
roots of unity inside them reproduces the even/odd orders.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .cyclotomic_order import bezout, check_coprime
from .errors import GeometryError, UsageError
from .laplace_formal import ElementaryInput, order_at, theta_grid

TWO_PI = 2 * math.pi
WIDEN = 1e-12


def _wrap(a: float) -> float:
    a = math.fmod(a, TWO_PI)
    if a < 0:
        a += TWO_PI
    return 0.0 if a >= TWO_PI else a


def unit_root(n: int, k: int) -> complex:
    """exp(2 pi i k / n), placed from the exact rational angle."""
    k %= n
    if k == 0:
        return 1 + 0j
    if 2 * k == n:
        return -1 + 0j
    if 4 * k == n:
        return 1j
    if 4 * k == 3 * n:
        return -1j
    t = TWO_PI * k / n
    return complex(math.cos(t), math.sin(t))


@dataclass(frozen=True)
class AnnulusPoint:
    log_r: float
    theta_x: float

    def __post_init__(self):
        if not math.isfinite(self.log_r):
            raise UsageError("log radius must be finite")

    @classmethod
    def from_complex(cls, x: complex) -> "AnnulusPoint":
        if x == 0:
            raise UsageError("the origin is not on the annulus")
        return cls(math.log(abs(x)), _wrap(cmath.phase(x)))

    @property
    def r(self) -> float:
        return math.exp(self.log_r)

    def to_complex(self) -> complex:
        return cmath.rect(self.r, self.theta_x)


# ---------------------------------------------------------------------------
# f and its roots
# ---------------------------------------------------------------------------

def f_poly(p: int, q: int) -> list[int]:
    """Integer coefficients, lowest degree first."""
    check_coprime(p, q)
    n = p + q
    c = [0] * (n + 1)
    c[0] += p
    c[q] -= n
    c[n] += q
    return c


def f_eval(p: int, q: int, x: complex) -> complex:
    n = p + q
    return q * x ** n - n * x ** q + p


def deflate_double_one(coeffs: list[int]) -> list[int]:
    """Exact division by (X - 1)^2 (twice synthetic division by X - 1)."""
    c = list(coeffs)
    for _ in range(2):
        hi = c[::-1]
        out = [hi[0]]
        for a in hi[1:]:
            out.append(a + out[-1])
        if out[-1] != 0:
            raise ArithmeticError("X = 1 is not a root")
        c = out[:-1][::-1]
    return c


@dataclass
class RootReport:
    double_root: complex
    inner_roots: list
    outer_roots: list
    residual: float
    margin: float

    def to_doc(self) -> dict:
        enc = lambda zs: [[z.real, z.imag] for z in zs]
        return {"double_root": [self.double_root.real, self.double_root.imag],
                "inner_roots": enc(self.inner_roots), "outer_roots": enc(self.outer_roots),
                "residual": self.residual, "margin": self.margin}


def roots(p: int, q: int, tolerance: float = 1e-10) -> RootReport:
    coeffs = f_poly(p, q)
    h = deflate_double_one(coeffs)
    found = []
    if len(h) > 1:
        zs = np.roots(h[::-1])
        hp = np.polynomial.Polynomial(h)
        dh = hp.deriv()
        for z in zs:
            z = complex(z)
            for _ in range(50):
                d = dh(z)
                if d == 0:
                    break
                step = hp(z) / d
                z -= step
                if abs(step) < tolerance * 1e-3 * max(1.0, abs(z)):
                    break
            found.append(complex(z))
    residual = max((abs(f_eval(p, q, z)) for z in found), default=0.0)
    margin = min((abs(abs(z) - 1) for z in found), default=math.inf)
    if margin < 1e-6:
        raise GeometryError(f"a root lies within {margin:.3g} of the unit circle")
    key = lambda z: (round(abs(z), 12), round(_wrap(cmath.phase(z)), 12))
    inner = sorted((z for z in found if abs(z) < 1), key=key)
    outer = sorted((z for z in found if abs(z) > 1), key=key)
    if len(inner) != q - 1 or len(outer) != p - 1:
        raise GeometryError(f"expected {q - 1} inner and {p - 1} outer roots, "
                            f"found {len(inner)} and {len(outer)}")
    return RootReport(1 + 0j, inner, outer, residual, margin)


# ---------------------------------------------------------------------------
# g, G, critical points
# ---------------------------------------------------------------------------

def g_eval(p: int, q: int, x: complex) -> complex:
    if x == 0:
        raise GeometryError("g is undefined at 0")
    fx = f_eval(p, q, x)
    if abs(fx) < 1e-14 * max(1.0, abs(x) ** (p + q)):
        raise GeometryError(f"g vanishes at {x}: G is undefined at roots of f")
    return fx / x ** q


def g_prime(p: int, q: int, x: complex) -> complex:
    """Closed form p q x^{-q-1} (x^{p+q} - 1)."""
    return p * q * x ** (-q - 1) * (x ** (p + q) - 1)


def G_eval(p: int, q: int, x: complex) -> float:
    return _wrap(cmath.phase(g_eval(p, q, x)))


@dataclass(frozen=True)
class CriticalPoint:
    k: int
    kappa: int
    value: float
    closed_form: float


def critical_data(p: int, q: int, tol: float = 1e-9) -> list[CriticalPoint]:
    """G at each xi^k, k != 0, against pi/2 + kappa pi/(p+q), kappa = p k mod (p+q)."""
    check_coprime(p, q)
    n = p + q
    a, _ = bezout(p, q)
    out = []
    for k in range(1, n):
        kappa = (p * k) % n
        if (a * kappa - k) % n:
            raise GeometryError(f"k = a kappa fails at k={k}")
        val = G_eval(p, q, unit_root(n, k))
        closed = math.pi / 2 + kappa * math.pi / n
        if abs(val - closed) > tol:
            raise GeometryError(f"critical value mismatch at k={k}: {val} vs {closed}")
        out.append(CriticalPoint(k, kappa, val, closed))
    return out


# ---------------------------------------------------------------------------
# the regions B and the counting oracle
# ---------------------------------------------------------------------------

def window_center(p: int, q: int, zeta: int, parity: str, eps: float) -> float:
    n = p + q
    shift = 0.0 if parity == "even" else math.pi
    return q * TWO_PI * (zeta % n) / n + eps + shift


def b_member(p: int, q: int, zeta: int, parity: str, eps: float, point) -> bool:
    """Is the point in zeta * G^{-1}(q arg zeta + eps + (-pi/2, pi/2))?

    The odd window is shifted by pi.  ``point`` is an AnnulusPoint or a
    complex number.
    """
    if parity not in ("even", "odd"):
        raise UsageError("parity must be 'even' or 'odd'")
    x = point.to_complex() if isinstance(point, AnnulusPoint) else complex(point)
    n = p + q
    y = x * unit_root(n, -zeta)
    d = _wrap(G_eval(p, q, y) - window_center(p, q, zeta, parity, eps) + math.pi)
    return math.pi / 2 - WIDEN < d < 3 * math.pi / 2 + WIDEN


def count_critical(p: int, q: int, zeta: int, ell: int, phi_q=1, eps: float | None = None) -> int:
    """Number of points of mu_{p+q} other than zeta (the translated double
    root) inside the region for zeta at theta_ell."""
    n = p + q
    if eps is None:
        eps = theta_grid(ElementaryInput(p, q, phi_q)).epsilon
    parity = "even" if ell % 2 == 0 else "odd"
    return sum(1 for k in range(n) if k != zeta % n
               and b_member(p, q, zeta, parity, eps, unit_root(n, k)))


def counts_along_order(p: int, q: int, ell: int, phi_q=1) -> tuple[list[int], list[int]]:
    """(order_at(ell), counts in that order)."""
    inp = ElementaryInput(p, q, phi_q)
    grid = theta_grid(inp)
    order = order_at(inp, ell, grid)
    return order, [count_critical(p, q, z, ell, phi_q, grid.epsilon) for z in order]


def level_radius(p: int, q: int, theta_x: float) -> float | None:
    """Positive r with q r^{p+q} sin(p theta) = p sin(q theta), if any."""
    sp = math.sin(p * theta_x)
    if abs(sp) < 1e-15:
        raise GeometryError("sin(p theta) = 0: degenerate ray")
    ratio = (p / q) * math.sin(q * theta_x) / sp
    if ratio <= 0:
        return None
    return ratio ** (1.0 / (p + q))


# ---------------------------------------------------------------------------
# rasterization
# ---------------------------------------------------------------------------

THETA_OFFSET = 1e-3  # keeps grid nodes off the real axis, shared by all resolutions


def raster_nodes(resolution: int, R: float):
    """log r nodes (resolution + 1 rings) and theta nodes (resolution spokes)."""
    L = math.log(R)
    logs = [-L + 2 * L * i / resolution for i in range(resolution + 1)]
    thetas = [TWO_PI * j / resolution + THETA_OFFSET for j in range(resolution)]
    return logs, thetas


def raster_b(p: int, q: int, zeta: int, ell: int, eps: float, resolution: int = 128,
             R: float = 4.0) -> list[list[bool]]:
    """Membership grid, rows = rings from r = 1/R outwards."""
    if resolution < 64:
        raise UsageError("resolution must be at least 64")
    parity = "even" if ell % 2 == 0 else "odd"
    logs, thetas = raster_nodes(resolution, R)
    grid = []
    for lr in logs:
        row = []
        for th in thetas:
            try:
                row.append(b_member(p, q, zeta, parity, eps, AnnulusPoint(lr, th)))
            except GeometryError:
                row.append(False)
        grid.append(row)
    return grid


def circular_runs(row: list[bool]) -> list[tuple[int, int]]:
    """Maximal runs of True on a circular row as (start, length)."""
    m = len(row)
    if all(row):
        return [(0, m)]
    if not any(row):
        return []
    start = next(i for i in range(m) if not row[i]) + 1
    runs, i = [], 0
    while i < m:
        j = (start + i) % m
        if row[j]:
            length = 0
            while length < m and row[(j + length) % m]:
                length += 1
            runs.append((j, length))
            i += length
        else:
            i += 1
    return sorted(runs)


def boundary_interval_counts(grid: list[list[bool]]) -> tuple[int, int]:
    """(# arcs on the innermost ring, # arcs on the outermost ring)."""
    return len(circular_runs(grid[0])), len(circular_runs(grid[-1]))


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def render_b_svg(p: int, q: int, zeta: int = 0, ell: int = 0, eps: float | None = None,
                 resolution: int = 128, R: float = 4.0, size: int = 512) -> str:
    """SVG of the region on the annulus 1/R <= r <= R, drawn in polar
    coordinates with radius linear in log r.  Roots of f and the points of
    mu_{p+q} are marked."""
    check_coprime(p, q)
    if resolution < 64:
        raise UsageError("resolution must be at least 64")
    if eps is None:
        eps = theta_grid(ElementaryInput(p, q, 1)).epsilon
    n = p + q
    grid = raster_b(p, q, zeta, ell, eps, resolution, R)
    logs, _ = raster_nodes(resolution, R)
    L = math.log(R)
    c = size / 2
    r_in, r_out = 0.08 * size, 0.48 * size
    dlog = 2 * L / resolution
    dth = TWO_PI / resolution

    def rad(lr: float) -> float:
        return r_in + (lr + L) / (2 * L) * (r_out - r_in)

    def pt(lr: float, th: float) -> str:
        rr = rad(lr)
        return f"{_fmt(c + rr * math.cos(th))},{_fmt(c - rr * math.sin(th))}"

    manifest = (f'{{"p": {p}, "q": {q}, "zeta_exponent": {zeta}, "ell": {ell}, '
                f'"epsilon": {eps!r}, "resolution": {resolution}, "R": {R!r}}}')
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f"<!-- plot-manifest {manifest} -->",
           f'<rect width="{size}" height="{size}" fill="white"/>',
           f'<circle cx="{_fmt(c)}" cy="{_fmt(c)}" r="{_fmt(r_out)}" fill="none" stroke="#999"/>',
           f'<circle cx="{_fmt(c)}" cy="{_fmt(c)}" r="{_fmt(r_in)}" fill="none" stroke="#999"/>',
           '<g class="region" fill="#4a7bd0" stroke="none">']
    for i, row in enumerate(grid):
        lo = max(logs[i] - dlog / 2, -L)
        hi = min(logs[i] + dlog / 2, L)
        for start, length in circular_runs(row):
            t0 = TWO_PI * start / resolution + THETA_OFFSET - dth / 2
            ts = [t0 + dth * s for s in range(length + 1)]
            pts = [pt(hi, t) for t in ts] + [pt(lo, t) for t in reversed(ts)]
            out.append(f'<path data-ring="{i}" d="M{" L".join(pts)} Z"/>')
    out.append("</g>")
    out.append(f'<circle cx="{_fmt(c)}" cy="{_fmt(c)}" r="{_fmt(rad(0.0))}" fill="none" '
               f'stroke="#333" stroke-dasharray="4 3"/>')
    for k in range(n):
        z = unit_root(n, k)
        x, y = pt(0.0, cmath.phase(z)).split(",")
        out.append(f'<circle class="mu" data-k="{k}" cx="{x}" cy="{y}" r="4" fill="black"/>')
    rep = roots(p, q)
    for cls, zs in (("root-inner", rep.inner_roots), ("root-outer", rep.outer_roots)):
        for z in zs:
            x, y = pt(max(-L, min(L, math.log(abs(z)))), cmath.phase(z)).split(",")
            out.append(f'<circle class="{cls}" cx="{x}" cy="{y}" r="5" fill="none" '
                       f'stroke="#c0392b" stroke-width="2"/>')
    x, y = pt(0.0, 0.0).split(",")
    out.append(f'<rect class="root-double" x="{_fmt(float(x) - 5)}" y="{_fmt(float(y) - 5)}" '
               f'width="10" height="10" fill="none" stroke="#c0392b" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
