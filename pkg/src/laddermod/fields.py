"""Exact scalar arithmetic and dense matrices.

Two field backends: arbitrary-precision rationals (fractions.Fraction) and a
prime field F_p whose elements overload the usual operators, so everything
downstream is written once against +, -, *, / and ==.

No floats anywhere.
"""

from __future__ import annotations

from fractions import Fraction


class Fp:
    """Element of F_p, value kept in [0, p)."""

    __slots__ = ("v", "p")

    def __init__(self, v, p):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ValueError("mixed characteristics %d and %d" % (self.p, other.p))
            return other
        if isinstance(other, int):
            return Fp(other, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Fp(self.v + o.v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Fp(self.v - o.v, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Fp(o.v - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Fp(self.v * o.v, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.v == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return Fp(self.v * pow(o.v, self.p - 2, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else o / self

    def __neg__(self):
        return Fp(-self.v, self.p)

    def __eq__(self, other):
        if isinstance(other, Fp):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return self.v == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash(self.v)

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return "Fp(%d,%d)" % (self.v, self.p)


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class RationalField:
    name = "rational"

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def of(self, n, d=1):
        return Fraction(n, d)

    def parse(self, text):
        return Fraction(text)

    def fmt(self, x):
        return str(x)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("rational")

    def __repr__(self):
        return "RationalField()"


class PrimeField:
    def __init__(self, p):
        if not _is_prime(p):
            raise ValueError("field order %r is not prime" % (p,))
        self.p = p
        self.name = "prime %d" % p

    def zero(self):
        return Fp(0, self.p)

    def one(self):
        return Fp(1, self.p)

    def of(self, n, d=1):
        return Fp(n, self.p) / Fp(d, self.p)

    def parse(self, text):
        if "/" in text:
            n, d = text.split("/")
            return self.of(int(n), int(d))
        return Fp(int(text), self.p)

    def fmt(self, x):
        return str(x.v)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("prime", self.p))

    def __repr__(self):
        return "PrimeField(%d)" % self.p


QQ = RationalField()


def field_by_name(name):
    """Parse a field spec string: 'rational' or 'prime <p>'."""
    parts = name.strip().split()
    if parts == ["rational"]:
        return QQ
    if len(parts) == 2 and parts[0] == "prime":
        return PrimeField(int(parts[1]))
    raise ValueError("unknown field spec %r" % name)


class Matrix:
    """Immutable dense matrix, row-major. Shapes with 0 rows or columns are fine."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field, rows, cols, data):
        data = tuple(data)
        if len(data) != rows * cols:
            raise ValueError("need %d entries, got %d" % (rows * cols, len(data)))
        self.field = field
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def from_rows(cls, field, rows_of_entries, cols=None):
        rows = len(rows_of_entries)
        if rows == 0:
            if cols is None:
                cols = 0
            return cls(field, 0, cols, ())
        cols = len(rows_of_entries[0])
        flat = []
        for r in rows_of_entries:
            if len(r) != cols:
                raise ValueError("ragged rows")
            flat.extend(r)
        return cls(field, rows, cols, flat)

    @classmethod
    def from_int_rows(cls, field, rows_of_ints, cols=None):
        return cls.from_rows(
            field, [[field.of(x) for x in row] for row in rows_of_ints], cols=cols
        )

    @classmethod
    def identity(cls, field, n):
        one, zero = field.one(), field.zero()
        return cls(field, n, n, [one if i == j else zero for i in range(n) for j in range(n)])

    @classmethod
    def zero(cls, field, rows, cols):
        z = field.zero()
        return cls(field, rows, cols, [z] * (rows * cols))

    def get(self, i, j):
        return self.data[i * self.cols + j]

    def row(self, i):
        return self.data[i * self.cols : (i + 1) * self.cols]

    def col(self, j):
        return tuple(self.data[i * self.cols + j] for i in range(self.rows))

    def to_lists(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
            and self.field == other.field
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __mul__(self, other):
        return mat_mul(self, other)

    def __repr__(self):
        body = "; ".join(
            " ".join(self.field.fmt(x) for x in self.row(i)) for i in range(self.rows)
        )
        return "Matrix(%dx%d: %s)" % (self.rows, self.cols, body)

    def is_zero(self):
        z = self.field.zero()
        return all(x == z for x in self.data)

    def rank(self):
        work = self.to_lists()
        zero = self.field.zero()
        r = 0
        for j in range(self.cols):
            piv = next((i for i in range(r, self.rows) if work[i][j] != zero), None)
            if piv is None:
                continue
            work[r], work[piv] = work[piv], work[r]
            inv = work[r][j]
            for i in range(r + 1, self.rows):
                if work[i][j] != zero:
                    f = work[i][j] / inv
                    work[i] = [a - f * b for a, b in zip(work[i], work[r])]
            r += 1
            if r == self.rows:
                break
        return r


def mat_mul(a, b):
    if a.cols != b.rows:
        raise ValueError("shape mismatch %dx%d * %dx%d" % (a.rows, a.cols, b.rows, b.cols))
    if a.field != b.field:
        raise ValueError("field mismatch")
    zero = a.field.zero()
    out = []
    bcols = b.cols
    for i in range(a.rows):
        arow = a.row(i)
        for j in range(bcols):
            s = zero
            for k in range(a.cols):
                x = arow[k]
                if x != zero:
                    s = s + x * b.data[k * bcols + j]
            out.append(s)
    return Matrix(a.field, a.rows, b.cols, out)


def mat_inverse(a):
    if a.rows != a.cols:
        raise ValueError("not square")
    n = a.rows
    zero, one = a.field.zero(), a.field.one()
    work = a.to_lists()
    inv = Matrix.identity(a.field, n).to_lists()
    for j in range(n):
        piv = next((i for i in range(j, n) if work[i][j] != zero), None)
        if piv is None:
            raise ValueError("singular matrix")
        work[j], work[piv] = work[piv], work[j]
        inv[j], inv[piv] = inv[piv], inv[j]
        f = work[j][j]
        if f != one:
            work[j] = [x / f for x in work[j]]
            inv[j] = [x / f for x in inv[j]]
        for i in range(n):
            if i != j and work[i][j] != zero:
                f = work[i][j]
                work[i] = [x - f * y for x, y in zip(work[i], work[j])]
                inv[i] = [x - f * y for x, y in zip(inv[i], inv[j])]
    return Matrix.from_rows(a.field, inv, cols=n)


def mat_solve(a, b):
    """Solve a @ x = b for x, requiring a to have full column rank.

    Raises ValueError when the rank is deficient or the system is inconsistent.
    """
    if a.rows != b.rows:
        raise ValueError("row count mismatch")
    if a.field != b.field:
        raise ValueError("field mismatch")
    zero = a.field.zero()
    work = [list(a.row(i)) + list(b.row(i)) for i in range(a.rows)]
    n = a.cols
    pivot_rows = []
    r = 0
    for j in range(n):
        piv = next((i for i in range(r, a.rows) if work[i][j] != zero), None)
        if piv is None:
            raise ValueError("matrix does not have full column rank")
        work[r], work[piv] = work[piv], work[r]
        f = work[r][j]
        work[r] = [x / f for x in work[r]]
        for i in range(a.rows):
            if i != r and work[i][j] != zero:
                g = work[i][j]
                work[i] = [x - g * y for x, y in zip(work[i], work[r])]
        pivot_rows.append(r)
        r += 1
    for i in range(r, a.rows):
        if any(x != zero for x in work[i][n:]):
            raise ValueError("inconsistent system")
    sol = [work[i][n:] for i in pivot_rows]
    return Matrix.from_rows(a.field, sol, cols=b.cols)


def is_barcode_form(a):
    """Check the rigid pivot shape.

    Returns (True, c) where c is the 1-indexed tuple of pivot columns, or
    (False, None). Accepted matrices have some top block of rows that are unit
    vectors with strictly increasing pivot columns, and all remaining rows zero.
    """
    zero, one = a.field.zero(), a.field.one()
    pivots = []
    seen_zero_row = False
    for i in range(a.rows):
        row = a.row(i)
        nz = [j for j, x in enumerate(row) if x != zero]
        if not nz:
            seen_zero_row = True
            continue
        if seen_zero_row:
            return False, None
        if len(nz) > 1 or row[nz[0]] != one:
            return False, None
        j = nz[0]
        if pivots and j <= pivots[-1]:
            return False, None
        pivots.append(j)
    return True, tuple(p + 1 for p in pivots)
