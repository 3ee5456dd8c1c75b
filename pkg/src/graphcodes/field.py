"""Finite fields GF(p^m) with integer-coded elements, plus small dense linear algebra.

Elements are carried as plain integer codes in [0, q).  Prime fields use the
residue itself; extension fields pack the polynomial coefficients in base p
(for p = 2 this is the usual bitmask), so code 0 is the additive identity and
code 1 the multiplicative identity in every field.  Extension-field products
go through precomputed exp/log tables built from a primitive reduction
polynomial; the default polynomial for each (p, m) is the one with the least
integer code, so codes are interchangeable between runs and implementations.

Matrices are numpy int64 arrays wrapped together with their field.  Gaussian
elimination picks the first nonzero pivot in column order (fields have no
magnitude, and a fixed rule keeps results deterministic).
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import (
    FieldMismatchError,
    InconsistentSystemError,
    UnderdeterminedSystemError,
    ZeroInversionError,
)

MAX_ORDER = 65536


def _factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, m) with q = p**m and p prime, or raise ValueError."""
    if q < 2 or q > MAX_ORDER:
        raise ValueError(f"field order must be in [2, {MAX_ORDER}], got {q}")
    p = 2
    while p * p <= q:
        if q % p == 0:
            m = 0
            r = q
            while r % p == 0:
                r //= p
                m += 1
            if r != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, m
        p += 1
    return q, 1  # q itself is prime


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def is_prime_power(q: int) -> bool:
    try:
        _factor_prime_power(q)
    except ValueError:
        return False
    return True


# ---------------------------------------------------------------------------
# base-p digit helpers for packed polynomial codes (general p; p=2 is XOR)


def _digit_add(a: int, b: int, p: int) -> int:
    out = 0
    mult = 1
    while a or b:
        out += ((a + b) % p) * mult
        a //= p
        b //= p
        mult *= p
    return out


def _digit_neg(a: int, p: int) -> int:
    out = 0
    mult = 1
    while a:
        d = a % p
        if d:
            out += (p - d) * mult
        a //= p
        mult *= p
    return out


def _digit_scale(a: int, c: int, p: int) -> int:
    out = 0
    mult = 1
    while a:
        out += ((a % p) * c % p) * mult
        a //= p
        mult *= p
    return out


def _mul_by_x(a: int, poly: int, p: int, m: int) -> int:
    """Multiply a packed polynomial by x and reduce by the monic poly code."""
    a *= p  # shift all digits up by one position
    lead = a // p**m
    if lead:
        a = _digit_add(a, _digit_neg(_digit_scale(poly, lead, p), p), p)
    return a


def _build_tables(p: int, m: int, poly: int):
    """Exp/log tables for GF(p^m), or None when poly is not primitive."""
    q = p**m
    exp = np.zeros(2 * (q - 1), dtype=np.int64)
    log = np.full(q, -1, dtype=np.int64)
    x = 1
    for i in range(q - 1):
        if x == 0 or log[x] >= 0:
            return None  # reducible or non-primitive: powers of x repeat early
        exp[i] = x
        log[x] = i
        x = _mul_by_x(x, poly, p, m)
    if x != 1:
        return None
    exp[q - 1 :] = exp[: q - 1]
    log[0] = 0  # dummy; zero operands are masked out before lookup
    return exp, log


def _default_poly(p: int, m: int) -> int:
    """Primitive reduction polynomial with the least integer code."""
    for code in range(p**m, 2 * p**m):
        if _build_tables(p, m, code) is not None:
            return code
    raise ValueError(f"no primitive polynomial found for GF({p}^{m})")


class GF:
    """The finite field GF(p^m), q = p^m <= 2^16, acting on integer codes.

    Scalar operations take and return ints; the *_arr variants operate
    elementwise on numpy int64 arrays (with broadcasting) for bulk work.
    Instances are immutable and safe to share across threads.
    """

    def __init__(self, q: int, poly: int | None = None):
        p, m = _factor_prime_power(q)
        self.q = q
        self.p = p
        self.m = m
        if m == 1:
            if poly is not None:
                raise ValueError("prime fields take no reduction polynomial")
            self.poly = None
            self._exp = None
            self._log = None
        else:
            if poly is None:
                poly = _default_poly(p, m)
            if not p**m <= poly < 2 * p**m:
                raise ValueError(f"reduction polynomial code {poly} is not monic of degree {m}")
            tables = _build_tables(p, m, poly)
            if tables is None:
                raise ValueError(f"polynomial code {poly} is not primitive over GF({p})")
            self.poly = poly
            self._exp, self._log = tables

    # -- identity / serialization ------------------------------------------

    @property
    def name(self) -> str:
        if self.m == 1:
            return f"gf({self.q})"
        mask = bin(self.poly) if self.p == 2 else str(self.poly)
        return f"gf({self.q}):{mask}"

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"GF({self.q})" if self.m == 1 else f"GF({self.q}, poly={self.poly})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and (self.q, self.poly) == (other.q, other.poly)

    def __hash__(self) -> int:
        return hash((self.q, self.poly))

    def __reduce__(self):
        return (field, (self.q, self.poly))

    # -- scalar arithmetic on codes ----------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return _digit_add(a, b, self.p)

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return _digit_neg(a, self.p)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return int(self._exp[int(self._log[a]) + int(self._log[b])])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroInversionError(f"inverse of zero in {self.name}")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return int(self._exp[(self.q - 1) - int(self._log[a])])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        out = 1
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    # -- elementwise array arithmetic (numpy int64) -------------------------

    def add_arr(self, a, b):
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return np.bitwise_xor(a, b)
        return self._digit_map2(a, b, lambda da, db: (da + db) % self.p)

    def neg_arr(self, a):
        if self.m == 1:
            return (-a) % self.p
        if self.p == 2:
            return np.array(a, dtype=np.int64, copy=True)
        return self._digit_map2(a, np.int64(0), lambda da, db: (-da) % self.p)

    def sub_arr(self, a, b):
        if self.m == 1:
            return (a - b) % self.p
        if self.p == 2:
            return np.bitwise_xor(a, b)
        return self._digit_map2(a, b, lambda da, db: (da - db) % self.p)

    def mul_arr(self, a, b):
        if self.m == 1:
            return (a * b) % self.p
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        prod = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, prod)

    def _digit_map2(self, a, b, fn):
        """Apply fn to corresponding base-p digits of packed codes a and b."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        mult = 1
        for _ in range(self.m):
            da = (a // mult) % self.p
            db = (b // mult) % self.p
            out += fn(da, db) * mult
            mult *= self.p
        return out

    def _sum_axis(self, a, axis):
        """Field sum along an axis of an int64 array."""
        if self.m == 1:
            return a.sum(axis=axis) % self.p
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        out = np.zeros(np.delete(np.array(a.shape), axis), dtype=np.int64)
        mult = 1
        for _ in range(self.m):
            out += (((a // mult) % self.p).sum(axis=axis) % self.p) * mult
            mult *= self.p
        return out

    def dot(self, a, v):
        """Matrix-vector product over the field: a (r x c) @ v (c,)."""
        a = np.asarray(a, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if self.m == 1:
            return (a @ v) % self.p
        return self._sum_axis(self.mul_arr(a, v[None, :]), axis=1)

    def matmul(self, a, b):
        """Matrix product over the field: a (r x k) @ b (k x c)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a @ b) % self.p
        return self._sum_axis(self.mul_arr(a[:, :, None], b[None, :, :]), axis=1)

    # -- elements ------------------------------------------------------------

    def element(self, code: int) -> "FieldElement":
        return FieldElement(self, code)

    def elements(self):
        """All q elements in canonical code order (0 first, 1 second)."""
        return (FieldElement(self, c) for c in range(self.q))

    def validate(self, code: int) -> int:
        if not isinstance(code, (int, np.integer)) or not 0 <= code < self.q:
            raise ValueError(f"{code!r} is not an element code of {self.name}")
        return int(code)

    def validate_arr(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if a.size and (a.min() < 0 or a.max() >= self.q):
            raise ValueError(f"array contains codes outside {self.name}")
        return a


@functools.lru_cache(maxsize=None)
def _default_poly_cached(p: int, m: int) -> int:
    return _default_poly(p, m)


@functools.lru_cache(maxsize=None)
def _field_cached(q: int, poly: int | None) -> GF:
    return GF(q, poly)


def field(q: int, poly: int | None = None) -> GF:
    """Shared GF instance for the given order (tables built once)."""
    p, m = _factor_prime_power(q)
    if m > 1 and poly is None:
        poly = _default_poly_cached(p, m)
    return _field_cached(q, poly)


def parse_field(text: str) -> GF:
    """Parse 'gf(q)' or 'gf(q):<polycode>' (polycode decimal or 0b...)."""
    s = text.strip().lower()
    if not s.startswith("gf("):
        raise ValueError(f"bad field string {text!r}")
    body = s[3:]
    close = body.find(")")
    if close < 0:
        raise ValueError(f"bad field string {text!r}")
    q = int(body[:close])
    rest = body[close + 1 :]
    poly = None
    if rest:
        if not rest.startswith(":"):
            raise ValueError(f"bad field string {text!r}")
        poly = int(rest[1:], 0)
    return field(q, poly)


class FieldElement:
    """A single field element; arithmetic checks that fields match."""

    __slots__ = ("gf", "code")

    def __init__(self, gf: GF, code: int):
        self.gf = gf
        self.code = gf.validate(code)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.gf != self.gf:
                raise FieldMismatchError(f"{self.gf.name} vs {other.gf.name}")
            return other.code
        if isinstance(other, (int, np.integer)):
            return self.gf.validate(int(other))
        return NotImplemented

    def __add__(self, other):
        c = self._coerce(other)
        return NotImplemented if c is NotImplemented else FieldElement(self.gf, self.gf.add(self.code, c))

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        return NotImplemented if c is NotImplemented else FieldElement(self.gf, self.gf.sub(self.code, c))

    def __rsub__(self, other):
        c = self._coerce(other)
        return NotImplemented if c is NotImplemented else FieldElement(self.gf, self.gf.sub(c, self.code))

    def __mul__(self, other):
        c = self._coerce(other)
        return NotImplemented if c is NotImplemented else FieldElement(self.gf, self.gf.mul(self.code, c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = self._coerce(other)
        return NotImplemented if c is NotImplemented else FieldElement(self.gf, self.gf.div(self.code, c))

    def __neg__(self):
        return FieldElement(self.gf, self.gf.neg(self.code))

    def __pow__(self, e: int):
        return FieldElement(self.gf, self.gf.pow(self.code, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.gf, self.gf.inv(self.code))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.gf == other.gf and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self.code == int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.gf, self.code))

    def __repr__(self):
        return f"{self.gf.name}[{self.code}]"


# ---------------------------------------------------------------------------
# matrices


class Matrix:
    """Dense matrix over a GF, stored as a numpy int64 array of codes."""

    def __init__(self, gf: GF, rows):
        self.gf = gf
        a = np.array(rows, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        self.a = gf.validate_arr(a)

    @classmethod
    def zeros(cls, gf: GF, rows: int, cols: int) -> "Matrix":
        return cls(gf, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, gf: GF, n: int) -> "Matrix":
        return cls(gf, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def copy(self) -> "Matrix":
        return Matrix(self.gf, self.a.copy())

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.gf == other.gf
            and self.a.shape == other.a.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __repr__(self):
        return f"Matrix({self.gf.name}, {self.rows}x{self.cols})"

    def matvec(self, v) -> np.ndarray:
        v = self.gf.validate_arr(v)
        if v.shape != (self.cols,):
            raise ValueError("vector length does not match column count")
        return self.gf.dot(self.a, v)

    def rank(self) -> int:
        work = self.a.copy()
        return len(_rref(self.gf, work, work.shape[1]))

    def solve(self, b) -> np.ndarray:
        """Solve self @ x = b; requires a unique solution.

        Raises InconsistentSystemError when no x satisfies the system and
        UnderdeterminedSystemError when the column rank is deficient.
        """
        b = self.gf.validate_arr(b)
        if b.ndim == 1:
            return self.solve_many(b.reshape(-1, 1))[:, 0]
        return self.solve_many(b)

    def solve_many(self, b: np.ndarray) -> np.ndarray:
        """Solve self @ X = B column-by-column in one elimination pass."""
        b = self.gf.validate_arr(b)
        if b.shape[0] != self.rows:
            raise ValueError("right-hand side has wrong number of rows")
        aug = np.concatenate([self.a, b], axis=1)
        pivots = _rref(self.gf, aug, self.cols)
        r = len(pivots)
        if np.any(aug[r:, self.cols :]):
            raise InconsistentSystemError("no solution satisfies all constraints")
        if r < self.cols:
            raise UnderdeterminedSystemError(f"column rank {r} < {self.cols}")
        return aug[: self.cols, self.cols :]

    def nullspace(self) -> np.ndarray:
        """Basis of the right null space, one vector per row of the result."""
        work = self.a.copy()
        pivots = _rref(self.gf, work, self.cols)
        free = [c for c in range(self.cols) if c not in set(pivots)]
        basis = np.zeros((len(free), self.cols), dtype=np.int64)
        for k, fc in enumerate(free):
            basis[k, fc] = 1
            for r, pc in enumerate(pivots):
                basis[k, pc] = self.gf.neg(int(work[r, fc]))
        return basis


def _rref(gf: GF, m: np.ndarray, pivot_cols: int) -> list[int]:
    """In-place reduced row echelon form; pivots only in the first pivot_cols.

    Pivot choice is the first nonzero entry scanning down each column in
    order, so the result is deterministic for a given input.
    """
    rows = m.shape[0]
    r = 0
    pivots: list[int] = []
    for c in range(pivot_cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        pv = int(m[r, c])
        if pv != 1:
            m[r] = gf.mul_arr(m[r], np.int64(gf.inv(pv)))
        colvals = m[:, c].copy()
        colvals[r] = 0
        tofix = np.nonzero(colvals)[0]
        if tofix.size:
            m[tofix] = gf.sub_arr(m[tofix], gf.mul_arr(colvals[tofix][:, None], m[r][None, :]))
        pivots.append(c)
        r += 1
    return pivots


def vandermonde(gf: GF, points, nrows: int) -> Matrix:
    """nrows x len(points) matrix with entry (t, l) = points[l]**t.

    Points must be pairwise distinct and nonzero, which makes any nrows
    columns linearly independent.
    """
    pts = gf.validate_arr(points)
    if nrows < 1:
        raise ValueError("need at least one row")
    if np.any(pts == 0):
        raise ValueError("evaluation points must be nonzero")
    if len(set(pts.tolist())) != pts.size:
        raise ValueError("evaluation points must be distinct")
    rows = [np.ones(pts.size, dtype=np.int64)]
    for _ in range(1, nrows):
        rows.append(gf.mul_arr(rows[-1], pts))
    return Matrix(gf, np.stack(rows))
