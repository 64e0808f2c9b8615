"""Exact linear algebra over the Gaussian rationals Q(i).

Matrices are stored as a common positive denominator plus a grid of
Gaussian integers (plain ``int`` when the imaginary part vanishes), so the
hot loops run on Python integers.  Elimination is fraction-free
(Bareiss-style Gauss-Jordan) and the characteristic polynomial uses the
division-free Berkowitz recursion.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from .errors import UsageError


# ---------------------------------------------------------------------------
# Gaussian integers (internal ring for elimination)
# ---------------------------------------------------------------------------

class GaussInt:
    """a + bi with integer a, b and b != 0 (b == 0 collapses to int)."""

    __slots__ = ("a", "b")

    def __init__(self, a: int, b: int):
        self.a = a
        self.b = b

    def __repr__(self):
        return f"GaussInt({self.a}, {self.b})"

    def __eq__(self, other):
        if isinstance(other, GaussInt):
            return self.a == other.a and self.b == other.b
        return False  # b != 0, so never equal to an int

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return True

    def __neg__(self):
        return GaussInt(-self.a, -self.b)

    def __add__(self, o):
        if isinstance(o, GaussInt):
            return _gi(self.a + o.a, self.b + o.b)
        return GaussInt(self.a + o, self.b)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, GaussInt):
            return _gi(self.a - o.a, self.b - o.b)
        return GaussInt(self.a - o, self.b)

    def __rsub__(self, o):
        return GaussInt(o - self.a, -self.b)

    def __mul__(self, o):
        if isinstance(o, GaussInt):
            return _gi(self.a * o.a - self.b * o.b, self.a * o.b + self.b * o.a)
        if o == 0:
            return 0
        return GaussInt(self.a * o, self.b * o)

    __rmul__ = __mul__

    def __floordiv__(self, o):
        # exact division only
        return _gdiv(self.a, self.b, o)

    def __rfloordiv__(self, o):
        return _gdiv(o, 0, self)


def _gi(a: int, b: int):
    return a if b == 0 else GaussInt(a, b)


def _parts(z) -> tuple[int, int]:
    if isinstance(z, GaussInt):
        return z.a, z.b
    return z, 0


def _gdiv(a: int, b: int, d):
    c, e = _parts(d)
    if e == 0:
        qa, ra = divmod(a, c)
        qb, rb = divmod(b, c)
        if ra or rb:
            raise ArithmeticError("inexact Gaussian division")
        return _gi(qa, qb)
    nrm = c * c + e * e
    na, ra = divmod(a * c + b * e, nrm)
    nb, rb = divmod(b * c - a * e, nrm)
    if ra or rb:
        raise ArithmeticError("inexact Gaussian division")
    return _gi(na, nb)


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------

class GaussianRational:
    """Exact scalar re + im*i with Fraction parts."""

    __slots__ = ("real", "imag")

    def __init__(self, real=0, imag=0):
        self.real = Fraction(real)
        self.imag = Fraction(imag)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x, 0)
        if isinstance(x, GaussInt):
            return cls(x.a, x.b)
        if isinstance(x, complex):
            if x.real != int(x.real) or x.imag != int(x.imag):
                raise UsageError("floats are not accepted as exact scalars")
            return cls(int(x.real), int(x.imag))
        if isinstance(x, float):
            raise UsageError("floats are not accepted as exact scalars")
        raise TypeError(f"cannot coerce {x!r} to GaussianRational")

    @classmethod
    def from_quad(cls, quad: Sequence[int]) -> "GaussianRational":
        if len(quad) != 4 or not all(isinstance(v, int) and not isinstance(v, bool) for v in quad):
            raise UsageError(f"entry must be four integers, got {quad!r}")
        rn, rd, im_n, im_d = quad
        if rd <= 0 or im_d <= 0:
            raise UsageError("denominators must be positive")
        return cls(Fraction(rn, rd), Fraction(im_n, im_d))

    def to_quad(self) -> list[int]:
        return [self.real.numerator, self.real.denominator,
                self.imag.numerator, self.imag.denominator]

    def is_zero(self) -> bool:
        return self.real == 0 and self.imag == 0

    def is_real(self) -> bool:
        return self.imag == 0

    def conjugate(self):
        return GaussianRational(self.real, -self.imag)

    def norm(self) -> Fraction:
        return self.real * self.real + self.imag * self.imag

    def __add__(self, o):
        o = _coerce_or_none(o)
        if o is None:
            return NotImplemented
        return GaussianRational(self.real + o.real, self.imag + o.imag)

    __radd__ = __add__

    def __sub__(self, o):
        o = _coerce_or_none(o)
        if o is None:
            return NotImplemented
        return GaussianRational(self.real - o.real, self.imag - o.imag)

    def __rsub__(self, o):
        o = _coerce_or_none(o)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, o):
        o = _coerce_or_none(o)
        if o is None:
            return NotImplemented
        return GaussianRational(self.real * o.real - self.imag * o.imag,
                                self.real * o.imag + self.imag * o.real)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _coerce_or_none(o)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero in Q(i)")
        return self * o.inverse()

    def __rtruediv__(self, o):
        o = _coerce_or_none(o)
        if o is None:
            return NotImplemented
        return o / self

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero has no inverse")
        return GaussianRational(self.real / n, -self.imag / n)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = GaussianRational(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __neg__(self):
        return GaussianRational(-self.real, -self.imag)

    def __eq__(self, o):
        o = _coerce_or_none(o)
        if o is None:
            return NotImplemented
        return self.real == o.real and self.imag == o.imag

    def __hash__(self):
        if self.imag == 0:
            return hash(self.real)
        return hash((self.real, self.imag))

    def __complex__(self):
        return complex(float(self.real), float(self.imag))

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        if self.imag == 0:
            return str(self.real)
        if self.real == 0:
            return f"{self.imag}i"
        sign = "+" if self.imag > 0 else "-"
        return f"{self.real}{sign}{abs(self.imag)}i"


def _coerce_or_none(x):
    try:
        return GaussianRational.coerce(x)
    except (TypeError, UsageError):
        return None


ZERO = GaussianRational(0)
ONE = GaussianRational(1)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

class RationalPolynomial:
    """Polynomial over Q(i), coefficients lowest degree first."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable):
        cs = [GaussianRational.coerce(c) for c in coefficients]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coefficients = tuple(cs)

    @classmethod
    def x(cls):
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def __eq__(self, o):
        if not isinstance(o, RationalPolynomial):
            return NotImplemented
        return self.coefficients == o.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __add__(self, o):
        o = _as_poly(o)
        n = max(len(self.coefficients), len(o.coefficients))
        a = self.coefficients + (ZERO,) * (n - len(self.coefficients))
        b = o.coefficients + (ZERO,) * (n - len(o.coefficients))
        return RationalPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial(-c for c in self.coefficients)

    def __sub__(self, o):
        return self + (-_as_poly(o))

    def __rsub__(self, o):
        return _as_poly(o) - self

    def __mul__(self, o):
        o = _as_poly(o)
        if self.is_zero() or o.is_zero():
            return RationalPolynomial([])
        out = [ZERO] * (len(self.coefficients) + len(o.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a.is_zero():
                continue
            for j, b in enumerate(o.coefficients):
                out[i + j] = out[i + j] + a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = RationalPolynomial([1])
        for _ in range(e):
            out = out * self
        return out

    def __call__(self, z):
        acc = ZERO
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def to_doc(self) -> list[list[int]]:
        return [c.to_quad() for c in self.coefficients]

    def __repr__(self):
        return f"RationalPolynomial({self})"

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for d in range(self.degree, -1, -1):
            c = self.coefficients[d]
            if c.is_zero():
                continue
            mono = "" if d == 0 else ("x" if d == 1 else f"x^{d}")
            if c.is_real():
                v = c.real
                sign = "-" if v < 0 else "+"
                mag = abs(v)
                body = str(mag) if (mag != 1 or not mono) else ""
            else:
                sign, body = "+", f"({c})"
            if body and mono:
                body += "*"
            terms.append((sign, body + mono))
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, t in terms[1:]:
            s += f" {sign} {t}"
        return s


def _as_poly(o) -> RationalPolynomial:
    if isinstance(o, RationalPolynomial):
        return o
    return RationalPolynomial([o])


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _content(x) -> int:
    if isinstance(x, GaussInt):
        return gcd(x.a, x.b)
    return abs(x)


class ExactMatrix:
    """Immutable rows x cols matrix over Q(i).

    Internally ``entry[i][j] = _num[i][j] / _den`` with ``_den > 0`` and the
    gcd of the denominator and every numerator component equal to 1.
    """

    __slots__ = ("rows", "cols", "_den", "_num", "_hash")

    def __init__(self, rows: int, cols: int, entries: Iterable = ()):
        flat = [GaussianRational.coerce(e) for e in entries]
        if len(flat) != rows * cols:
            raise UsageError(f"expected {rows * cols} entries, got {len(flat)}")
        den = 1
        for e in flat:
            den = _lcm(den, _lcm(e.real.denominator, e.imag.denominator))
        num = []
        for i in range(rows):
            row = []
            for e in flat[i * cols:(i + 1) * cols]:
                a = e.real.numerator * (den // e.real.denominator)
                b = e.imag.numerator * (den // e.imag.denominator)
                row.append(_gi(a, b))
            num.append(row)
        self._set(rows, cols, den, num)

    def _set(self, rows, cols, den, num):
        g = den
        for row in num:
            for x in row:
                if g == 1:
                    break
                if x:
                    g = gcd(g, _content(x))
        if g != 1:
            num = [[x // g if x else 0 for x in row] for row in num]
            den //= g
        self.rows = rows
        self.cols = cols
        self._den = den
        self._num = tuple(tuple(row) for row in num)
        self._hash = None

    @classmethod
    def _raw(cls, rows: int, cols: int, den: int, num) -> "ExactMatrix":
        m = cls.__new__(cls)
        if den < 0:
            den = -den
            num = [[-x for x in row] for row in num]
        m._set(rows, cols, den, num)
        return m

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise UsageError("ragged matrix rows")
        return cls(len(rows), cols, [e for r in rows for e in r])

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls._raw(n, n, 1, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls._raw(rows, cols, 1, [[0] * cols for _ in range(rows)])

    @classmethod
    def diag(cls, values: Sequence) -> "ExactMatrix":
        n = len(values)
        return cls(n, n, [values[i] if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def block_diag(cls, blocks: Sequence["ExactMatrix"]) -> "ExactMatrix":
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        grid = [[None] * len(blocks) for _ in blocks]
        for i, b in enumerate(blocks):
            for j, c in enumerate(blocks):
                grid[i][j] = b if i == j else cls.zeros(b.rows, c.cols)
        if not blocks:
            return cls.zeros(n, m)
        return cls.from_blocks(grid)

    @classmethod
    def from_blocks(cls, grid: Sequence[Sequence["ExactMatrix"]]) -> "ExactMatrix":
        """Assemble from a rectangular grid of matrices with matching sizes."""
        if not grid:
            return cls.zeros(0, 0)
        heights = [row[0].rows for row in grid]
        widths = [b.cols for b in grid[0]]
        den = 1
        for row in grid:
            for j, b in enumerate(row):
                if b.cols != widths[j]:
                    raise UsageError("block column widths disagree")
                den = _lcm(den, b._den)
        num = []
        for i, row in enumerate(grid):
            for b in row:
                if b.rows != heights[i]:
                    raise UsageError("block row heights disagree")
            for r in range(heights[i]):
                line = []
                for b in row:
                    f = den // b._den
                    line.extend(x * f if x else 0 for x in b._num[r])
                num.append(line)
        return cls._raw(sum(heights), sum(widths), den, num)

    # -- access -------------------------------------------------------------
    def __getitem__(self, ij) -> GaussianRational:
        i, j = ij
        a, b = _parts(self._num[i][j])
        return GaussianRational(Fraction(a, self._den), Fraction(b, self._den))

    @property
    def entries(self) -> list[list[GaussianRational]]:
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_real(self) -> bool:
        return not any(isinstance(x, GaussInt) for row in self._num for x in row)

    def is_zero(self) -> bool:
        return not any(x for row in self._num for x in row)

    def column(self, j: int) -> "ExactMatrix":
        return self.submatrix(range(self.rows), [j])

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "ExactMatrix":
        rows, cols = list(rows), list(cols)
        return ExactMatrix._raw(len(rows), len(cols), self._den,
                                [[self._num[i][j] for j in cols] for i in rows])

    def hstack(self, *others: "ExactMatrix") -> "ExactMatrix":
        mats = (self,) + others
        if any(m.rows != self.rows for m in mats):
            raise UsageError("hstack: row counts differ")
        return ExactMatrix.from_blocks([list(mats)]) if self.rows else \
            ExactMatrix.zeros(0, sum(m.cols for m in mats))

    def vstack(self, *others: "ExactMatrix") -> "ExactMatrix":
        mats = (self,) + others
        if any(m.cols != self.cols for m in mats):
            raise UsageError("vstack: column counts differ")
        den = 1
        for m in mats:
            den = _lcm(den, m._den)
        num = []
        for m in mats:
            f = den // m._den
            num.extend([x * f if x else 0 for x in row] for row in m._num)
        return ExactMatrix._raw(sum(m.rows for m in mats), self.cols, den, num)

    # -- arithmetic ---------------------------------------------------------
    def __eq__(self, o):
        if not isinstance(o, ExactMatrix):
            return NotImplemented
        return (self.rows, self.cols, self._den, self._num) == (o.rows, o.cols, o._den, o._num)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._den, self._num))
        return self._hash

    def _combine(self, o: "ExactMatrix", sign: int) -> "ExactMatrix":
        if self.shape != o.shape:
            raise UsageError(f"shape mismatch {self.shape} vs {o.shape}")
        den = _lcm(self._den, o._den)
        f, g = den // self._den, (den // o._den) * sign
        num = [[x * f + y * g for x, y in zip(r, s)] for r, s in zip(self._num, o._num)]
        return ExactMatrix._raw(self.rows, self.cols, den, num)

    def __add__(self, o):
        return self._combine(o, 1)

    def __sub__(self, o):
        return self._combine(o, -1)

    def __neg__(self):
        return ExactMatrix._raw(self.rows, self.cols, self._den,
                                [[-x for x in row] for row in self._num])

    def scale(self, c) -> "ExactMatrix":
        c = GaussianRational.coerce(c)
        d = _lcm(c.real.denominator, c.imag.denominator)
        z = _gi(c.real.numerator * (d // c.real.denominator),
                c.imag.numerator * (d // c.imag.denominator))
        return ExactMatrix._raw(self.rows, self.cols, self._den * d,
                                [[x * z if x else 0 for x in row] for row in self._num])

    def __matmul__(self, o):
        return mat_mul(self, o)

    def __mul__(self, o):
        if isinstance(o, ExactMatrix):
            return mat_mul(self, o)
        return self.scale(o)

    def __rmul__(self, o):
        return self.scale(o)

    def __pow__(self, e: int) -> "ExactMatrix":
        if not self.is_square():
            raise UsageError("power of a non-square matrix")
        if e < 0:
            return inverse(self) ** (-e)
        out = ExactMatrix.identity(self.rows)
        base = self
        while e:
            if e & 1:
                out = out @ base
            base = base @ base
            e >>= 1
        return out

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix._raw(self.cols, self.rows, self._den,
                                [list(col) for col in zip(*self._num)] if self.rows else
                                [[] for _ in range(self.cols)])

    @property
    def T(self):
        return self.transpose()

    # -- serialization -------------------------------------------------------
    def to_doc(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [self[i, j].to_quad() for i in range(self.rows) for j in range(self.cols)]}

    @classmethod
    def from_doc(cls, doc) -> "ExactMatrix":
        if not isinstance(doc, dict) or not {"rows", "cols", "entries"} <= set(doc):
            raise UsageError("matrix document needs rows, cols, entries")
        rows, cols, entries = doc["rows"], doc["cols"], doc["entries"]
        if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 0 or cols < 0:
            raise UsageError("rows and cols must be non-negative integers")
        if not isinstance(entries, list):
            raise UsageError("entries must be a list")
        # accept either a flat row-major list or a nested grid of quadruples
        if entries and isinstance(entries[0], list) and entries[0] and isinstance(entries[0][0], list):
            entries = [e for row in entries for e in row]
        if len(entries) != rows * cols:
            raise UsageError(f"expected {rows * cols} entries, got {len(entries)}")
        return cls(rows, cols, [GaussianRational.from_quad(e) for e in entries])

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols}, {self.pretty()})"

    def pretty(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(self[i, j]) for j in range(self.cols)) + "]"
                               for i in range(self.rows)) + "]"


# ---------------------------------------------------------------------------
# Core elimination
# ---------------------------------------------------------------------------

def _ff_gauss_jordan(num: Sequence[Sequence], ncols: int | None = None):
    """Fraction-free Gauss-Jordan on an integer / Gaussian-integer grid.

    Returns (R, pivots, d, swaps): every pivot column of R equals d times a
    unit vector, so R/d is the reduced row echelon form.  Only the first
    ``ncols`` columns are used for pivoting.
    """
    M = [list(r) for r in num]
    m = len(M)
    width = len(M[0]) if M else 0
    if ncols is None:
        ncols = width
    prev = 1
    pr_i = 0
    pivots = []
    swaps = 0
    for c in range(ncols):
        if pr_i == m:
            break
        r = pr_i
        while r < m and not M[r][c]:
            r += 1
        if r == m:
            continue
        if r != pr_i:
            M[pr_i], M[r] = M[r], M[pr_i]
            swaps += 1
        prow = M[pr_i]
        pv = prow[c]
        for i in range(m):
            if i == pr_i:
                continue
            row = M[i]
            f = row[c]
            if f:
                M[i] = [(pv * x - f * y) // prev for x, y in zip(row, prow)]
            elif prev != pv:
                M[i] = [(pv * x) // prev if x else 0 for x in row]
        prev = pv
        pivots.append(c)
        pr_i += 1
    return M, pivots, prev, swaps


def rank(m: ExactMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    _, piv, _, _ = _ff_gauss_jordan(m._num)
    return len(piv)


def mat_mul(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    if a.cols != b.rows:
        raise UsageError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    bt = list(zip(*b._num)) if b.rows else [()] * b.cols
    num = []
    for row in a._num:
        nz = [(k, x) for k, x in enumerate(row) if x]
        line = []
        for col in bt:
            s = 0
            for k, x in nz:
                y = col[k]
                if y:
                    s = s + x * y
            line.append(s)
        num.append(line)
    return ExactMatrix._raw(a.rows, b.cols, a._den * b._den, num)


def nullspace(m: ExactMatrix) -> ExactMatrix:
    """Basis of {v : m v = 0} as columns (cols x k matrix)."""
    n = m.cols
    if m.rows == 0:
        return ExactMatrix.identity(n)
    R, piv, d, _ = _ff_gauss_jordan(m._num)
    free = [j for j in range(n) if j not in set(piv)]
    vecs = []
    for f in free:
        v = [0] * n
        v[f] = d
        for i, c in enumerate(piv):
            x = R[i][f]
            v[c] = -x if x else 0
        vecs.append(v)
    if not vecs:
        return ExactMatrix.zeros(n, 0)
    return ExactMatrix._raw(len(vecs), n, 1, vecs).transpose()


def column_basis(m: ExactMatrix) -> ExactMatrix:
    """A maximal linearly independent subset of the columns of m."""
    if m.cols == 0 or m.rows == 0:
        return ExactMatrix.zeros(m.rows, 0)
    _, piv, _, _ = _ff_gauss_jordan(m._num)
    return m.submatrix(range(m.rows), piv)


def _coordinate_support(m: ExactMatrix):
    """Set of row indices if the columns of m are distinct unit vectors."""
    seen = set()
    for j in range(m.cols):
        hits = [i for i in range(m.rows) if m._num[i][j]]
        if len(hits) != 1 or m._num[hits[0]][j] != m._den:
            return None
        seen.add(hits[0])
    return seen if len(seen) == m.cols else None


def subspace_intersection(basis_a: ExactMatrix, basis_b: ExactMatrix) -> ExactMatrix:
    """Column basis of span(A) ∩ span(B); 0-column matrix if trivial."""
    if basis_a.rows != basis_b.rows:
        raise UsageError("ambient dimensions differ")
    n = basis_a.rows
    if basis_a.cols == 0 or basis_b.cols == 0:
        return ExactMatrix.zeros(n, 0)
    support = _coordinate_support(basis_a)
    if support is not None:
        # span(A) is a coordinate subspace: solve B c = 0 off the support
        outside = [i for i in range(n) if i not in support]
        if not outside:
            return column_basis(basis_b)
        ker = nullspace(basis_b.submatrix(outside, range(basis_b.cols)))
        if ker.cols == 0:
            return ExactMatrix.zeros(n, 0)
        return column_basis(basis_b @ ker)
    ker = nullspace(basis_a.hstack(-basis_b))
    if ker.cols == 0:
        return ExactMatrix.zeros(n, 0)
    coeff = ker.submatrix(range(basis_a.cols), range(ker.cols))
    return column_basis(basis_a @ coeff)


def subspace_sum(basis_a: ExactMatrix, basis_b: ExactMatrix) -> ExactMatrix:
    if basis_a.rows != basis_b.rows:
        raise UsageError("ambient dimensions differ")
    return column_basis(basis_a.hstack(basis_b))


def det(m: ExactMatrix) -> GaussianRational:
    if not m.is_square():
        raise UsageError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return ONE
    R, piv, d, swaps = _ff_gauss_jordan(m._num)
    if len(piv) < n:
        return ZERO
    a, b = _parts(d)
    sign = -1 if swaps % 2 else 1
    den = m._den ** n
    return GaussianRational(Fraction(sign * a, den), Fraction(sign * b, den))


def is_invertible(m: ExactMatrix) -> bool:
    return m.is_square() and rank(m) == m.rows


def inverse(m: ExactMatrix) -> ExactMatrix:
    if not m.is_square():
        raise UsageError("inverse of a non-square matrix")
    n = m.rows
    if n == 0:
        return m
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(m._num)]
    R, piv, d, _ = _ff_gauss_jordan(aug, n)
    if len(piv) < n:
        raise ZeroDivisionError("matrix is singular")
    # m = num/den, R[:, n:] = d * num^{-1}  =>  m^{-1} = den * R[:, n:] / d
    right = [[x * m._den if x else 0 for x in row[n:]] for row in R]
    a, b = _parts(d)
    if b == 0:
        return ExactMatrix._raw(n, n, a, right)
    # divide by a Gaussian integer: multiply by its conjugate over the norm
    conj = GaussInt(a, -b)
    return ExactMatrix._raw(n, n, a * a + b * b, [[x * conj if x else 0 for x in row] for row in right])


# ---------------------------------------------------------------------------
# Characteristic polynomial and similarity
# ---------------------------------------------------------------------------

def _berkowitz(A: Sequence[Sequence]) -> list:
    """det(xI - A) over a commutative ring, coefficients highest degree first."""
    n = len(A)
    if n == 0:
        return [1]
    v = [1, -A[0][0]]
    for k in range(1, n):
        R = A[k][:k]
        C = [A[i][k] for i in range(k)]
        a = A[k][k]
        t = [1, -a]
        w = C
        for _ in range(k):
            t.append(-sum((x * y for x, y in zip(R, w) if x and y), 0))
            w = [sum((A[i][j] * w[j] for j in range(k) if A[i][j] and w[j]), 0) for i in range(k)]
        v = [sum((t[i - j] * v[j] for j in range(min(i, k) + 1) if t[i - j] and v[j]), 0)
             for i in range(k + 2)]
    return v


def charpoly(m: ExactMatrix) -> RationalPolynomial:
    """Monic det(xI - m)."""
    if not m.is_square():
        raise UsageError("charpoly of a non-square matrix")
    n = m.rows
    hi = _berkowitz([list(r) for r in m._num])
    d = m._den
    coeffs = []
    # chi_m(x) = d^{-n} chi_num(d x)
    for j in range(n + 1):
        a, b = _parts(hi[n - j])
        scale = Fraction(1, d ** (n - j))
        coeffs.append(GaussianRational(a * scale, b * scale))
    return RationalPolynomial(coeffs)


def poly_of_matrix(f: RationalPolynomial, m: ExactMatrix) -> ExactMatrix:
    n = m.rows
    out = ExactMatrix.zeros(n, n)
    eye = ExactMatrix.identity(n)
    for c in reversed(f.coefficients):
        out = out @ m + eye.scale(c)
    return out


@lru_cache(maxsize=512)
def _irreducible_factors(p: RationalPolynomial, over_gaussian: bool):
    """(factor, multiplicity) pairs; over Q for real input, else over Q(i)."""
    import sympy

    x = sympy.Symbol("x")
    expr = sum((sympy.Rational(c.real.numerator, c.real.denominator)
                + sympy.I * sympy.Rational(c.imag.numerator, c.imag.denominator)) * x ** k
               for k, c in enumerate(p.coefficients))
    if over_gaussian:
        _, facs = sympy.factor_list(expr, x, extension=sympy.I)
    else:
        _, facs = sympy.factor_list(expr, x)
    out = []
    for f, mult in facs:
        cs = sympy.Poly(f, x).all_coeffs()[::-1]
        conv = []
        for c in cs:
            re, im = sympy.re(c), sympy.im(c)
            conv.append(GaussianRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q))))
        out.append((RationalPolynomial(conv), mult))
    return tuple(out)


def irreducible_factors(p: RationalPolynomial) -> tuple:
    real = all(c.is_real() for c in p.coefficients)
    return _irreducible_factors(p, not real)


def conjugacy_equivalent(a: ExactMatrix, b: ExactMatrix) -> bool:
    """True iff a and b are similar over Q(i).

    Decided by equal characteristic polynomials plus, for each irreducible
    factor f of multiplicity e, rank(f(a)^j) == rank(f(b)^j) for j = 1..e.
    Real matrices are factored over Q: similarity over Q(i) of rational
    matrices coincides with similarity over Q.
    """
    if not (a.is_square() and b.is_square()) or a.rows != b.rows:
        raise UsageError("conjugacy needs square matrices of the same size")
    if a.rows == 0:
        return True
    cp = charpoly(a)
    if cp != charpoly(b):
        return False
    over_gaussian = not (a.is_real() and b.is_real())
    for f, mult in _irreducible_factors(cp, over_gaussian):
        fa, fb = poly_of_matrix(f, a), poly_of_matrix(f, b)
        pa, pb = fa, fb
        for j in range(1, mult + 1):
            if rank(pa) != rank(pb):
                return False
            if j < mult:
                pa, pb = pa @ fa, pb @ fb
    return True


def rank_sequence(m: ExactMatrix, upto: int) -> list[int]:
    """[rank(m^1), ..., rank(m^upto)]."""
    out = []
    p = m
    for j in range(upto):
        out.append(rank(p))
        if j + 1 < upto:
            p = p @ m
    return out


def jordan_sizes_from_ranks(n: int, ranks: Sequence[int]) -> list[int]:
    """Jordan block sizes at one eigenvalue from r_j = rank((A - λ)^j).

    Number of blocks of size >= j is r_{j-1} - r_j (r_0 = n).
    """
    r = [n] + list(ranks)
    # pad until stable
    at_least = [r[j - 1] - r[j] for j in range(1, len(r))]
    sizes = []
    for j, cnt in enumerate(at_least, start=1):
        nxt = at_least[j] if j < len(at_least) else 0
        sizes.extend([j] * (cnt - nxt))
    return sorted(sizes, reverse=True)
