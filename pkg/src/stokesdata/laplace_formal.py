"""Formal invariants of the local Laplace transform of an elementary
connection with monomial phase phi = phi_q u^{-q}, and the grid of
generic directions on the eta-circle.

Angles are floats in [0, 2 pi).  The leading coefficients are exact
(GaussianRational) whenever phi_q is given exactly.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .cyclotomic_order import check_coprime
from .errors import GeometryError, UsageError
from .exact_linalg import GaussianRational

TWO_PI = 2 * math.pi
TIE_TOL = 1e-9


def _wrap(a: float) -> float:
    a = math.fmod(a, TWO_PI)
    if a < 0:
        a += TWO_PI
    # fmod can return 2 pi - tiny; fold it
    return 0.0 if a >= TWO_PI else a


def _as_scalar(x):
    """Exact GaussianRational if possible, else complex."""
    try:
        return GaussianRational.coerce(x)
    except (UsageError, TypeError):
        return complex(x)


@dataclass(frozen=True)
class ElementaryInput:
    p: int
    q: int
    phi_q: object = 1
    pair: object = None

    def __post_init__(self):
        check_coprime(self.p, self.q)
        if complex(_as_scalar(self.phi_q)) == 0:
            raise UsageError("phi_q must be nonzero")

    @property
    def phi(self) -> complex:
        return complex(_as_scalar(self.phi_q))

    @property
    def arg_phi(self) -> float:
        return _wrap(cmath.phase(self.phi))


@dataclass(frozen=True)
class LaplaceFormalData:
    p_hat: int
    rho_hat_lead: object
    phi_hat_lead: object
    twist_sign: int
    T_hat: object
    coefficients: tuple  # c_k for k = 0..p+q-1

    def to_doc(self) -> dict:
        return {"p_hat": self.p_hat, "rho_hat_lead": _scalar_doc(self.rho_hat_lead),
                "phi_hat_lead": _scalar_doc(self.phi_hat_lead), "twist_sign": self.twist_sign}


def _scalar_doc(x) -> dict:
    z = complex(x)
    doc = {"re": z.real, "im": z.imag}
    if isinstance(x, GaussianRational):
        doc["exact"] = x.to_quad()
    return doc


def laplace_invariants(inp: ElementaryInput) -> LaplaceFormalData:
    p, q = inp.p, inp.q
    n = p + q
    phi = _as_scalar(inp.phi_q)
    if isinstance(phi, GaussianRational):
        rho = GaussianRational(p) / (GaussianRational(q) * phi)
        lead = GaussianRational(n) * phi / GaussianRational(p)
    else:
        rho = p / (q * phi)
        lead = n * phi / p
    sign = -1 if q % 2 else 1
    T_hat = None
    if inp.pair is not None and inp.pair.dim:
        T_hat = inp.pair.T.scale(sign)
    lead_c = complex(lead)
    coeffs = tuple(lead_c * cmath.exp(-2j * math.pi * q * k / n) for k in range(n))
    return LaplaceFormalData(n, rho, lead, sign, T_hat, coeffs)


def stokes_directions(c, q: int) -> list[float]:
    """The 2q directions where Re(c e^{-i q theta}) changes sign."""
    c = complex(c)
    if c == 0:
        raise UsageError("identical exponential factors have no Stokes directions")
    base = cmath.phase(c) - math.pi / 2
    return sorted(_wrap((base + j * math.pi) / q) for j in range(2 * q))


def all_stokes_directions(inp: ElementaryInput) -> list[float]:
    data = laplace_invariants(inp)
    cs = data.coefficients
    out = []
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            out.extend(stokes_directions(cs[i] - cs[j], inp.q))
    return sorted(out)


@dataclass(frozen=True)
class ThetaGrid:
    theta0: float
    thetas: tuple
    epsilon: float
    directions: tuple

    def to_doc(self) -> dict:
        return {"theta0": self.theta0, "thetas": list(self.thetas), "epsilon": self.epsilon}


def _circ_dist(a: float, b: float) -> float:
    d = abs(_wrap(a - b))
    return min(d, TWO_PI - d)


def theta_grid(inp: ElementaryInput) -> ThetaGrid:
    """theta0 = (arg phi_q + pi + eps)/q and theta_l = theta0 + l pi/q.

    At eps = 0 the grid may sit on Stokes directions; eps is taken as half
    the smallest strictly positive forward gap (in q theta units) from the
    unperturbed grid to a direction, capped at pi/(2(p+q)) so the same eps
    also stays below the first critical value in the annulus picture.
    """
    p, q = inp.p, inp.q
    dirs = all_stokes_directions(inp)
    base = [(inp.arg_phi + math.pi + l * math.pi) / q for l in range(2 * q)]
    gap = math.inf
    for b in base:
        for d in dirs:
            fwd = _wrap(d - b)
            if fwd > 1e-12 and TWO_PI - fwd > 1e-12:
                gap = min(gap, fwd)
    eps = min(q * gap / 2 if gap < math.inf else 1.0, math.pi / (2 * (p + q)))
    theta0 = _wrap((inp.arg_phi + math.pi + eps) / q)
    thetas = tuple(_wrap(theta0 + l * math.pi / q) for l in range(2 * q))
    margin = min((_circ_dist(t, d) for t in thetas for d in dirs), default=math.inf)
    if margin < TIE_TOL:
        raise GeometryError("grid direction meets a Stokes direction")
    return ThetaGrid(theta0, thetas, eps, tuple(dirs))


def dominance(inp: ElementaryInput, ell: int, grid: ThetaGrid | None = None) -> list[float]:
    """Re(c_k e^{-i q theta_ell}) for every exponent k."""
    grid = grid or theta_grid(inp)
    data = laplace_invariants(inp)
    rot = cmath.exp(-1j * inp.q * grid.thetas[ell % (2 * inp.q)])
    return [(c * rot).real for c in data.coefficients]


def order_at(inp: ElementaryInput, ell: int, grid: ThetaGrid | None = None) -> list[int]:
    """Exponents of mu_{p+q} sorted by increasing dominance at theta_ell."""
    vals = dominance(inp, ell, grid)
    perm = sorted(range(len(vals)), key=lambda k: vals[k])
    for a, b in zip(perm, perm[1:]):
        if vals[b] - vals[a] < TIE_TOL:
            raise GeometryError(f"dominance tie between exponents {a} and {b} at ell={ell}")
    return perm


def formal_doc(inp: ElementaryInput) -> dict:
    data = laplace_invariants(inp)
    grid = theta_grid(inp)
    doc = data.to_doc()
    doc.update({"theta0": grid.theta0, "epsilon": grid.epsilon,
                "thetas": list(grid.thetas),
                "stokes_directions": sorted(set(round(d, 12) for d in grid.directions))})
    if data.T_hat is not None:
        doc["T_hat"] = data.T_hat.to_doc()
    return doc
