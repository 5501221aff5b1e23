"""Exact scalars and linear algebra over a field.

Rationals are ``gmpy2.mpq`` (always in lowest terms with a positive
denominator).  Prime-field residues are instances of a per-prime subclass of
:class:`Zp`.  Nothing here ever touches floating point.

Vectors are sparse dicts ``{index: scalar}`` without stored zeros.
"""

from __future__ import annotations

import re
from functools import lru_cache

import gmpy2
from gmpy2 import mpq

from .kernel import axpy, rank_mod, reduce_vector

# largest prime below 2**31; products of two residues fit in int64
CERT_PRIME = 2147483629

_SCALAR_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


class Zp:
    """Residue modulo a prime.  Use :func:`GF` to get a field."""

    __slots__ = ("v",)
    p = 0

    def __init__(self, v):
        if isinstance(v, Zp):
            v = v.v
        elif not isinstance(v, int):
            q = mpq(v)
            num, den = int(q.numerator), int(q.denominator)
            if den % self.p == 0:
                raise ZeroDivisionError(f"{v} has no residue mod {self.p}")
            v = num * pow(den, -1, self.p)
        self.v = v % self.p

    def _coerce(self, other):
        if isinstance(other, Zp):
            return other.v
        if isinstance(other, int):
            return other
        return type(self)(other).v

    def __add__(self, other):
        return type(self)(self.v + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return type(self)(self.v - self._coerce(other))

    def __rsub__(self, other):
        return type(self)(self._coerce(other) - self.v)

    def __mul__(self, other):
        return type(self)(self.v * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other) % self.p
        if o == 0:
            raise ZeroDivisionError("division by zero residue")
        return type(self)(self.v * pow(o, -1, self.p))

    def __rtruediv__(self, other):
        return type(self)(self._coerce(other)) / self

    def __neg__(self):
        return type(self)(-self.v)

    def __pos__(self):
        return self

    def __bool__(self):
        return self.v != 0

    def __eq__(self, other):
        try:
            return self.v == self._coerce(other) % self.p
        except (TypeError, ValueError, ZeroDivisionError):
            return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"{self.v} mod {self.p}"

    def __str__(self):
        return str(self.v)


class Field:
    """A base field: the rationals (``p=None``) or GF(p)."""

    def __init__(self, p: int | None = None):
        self.p = p
        if p is None:
            self.elem = mpq
            self.name = "rational"
        else:
            if not gmpy2.is_prime(p):
                raise ValueError(f"{p} is not prime")
            self.elem = type(f"GF{p}", (Zp,), {"__slots__": (), "p": p})
            self.name = f"GF({p})"
        self.zero = self.elem(0)
        self.one = self.elem(1)

    @property
    def is_rational(self) -> bool:
        return self.p is None

    def __call__(self, x):
        if isinstance(x, str):
            return self.parse(x)
        return self.elem(x)

    def parse(self, text: str):
        m = _SCALAR_RE.match(text)
        if not m:
            raise ValueError(f"not a scalar: {text!r}")
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ZeroDivisionError(f"zero denominator in {text!r}")
        return self.elem(mpq(num, den))

    def format(self, x) -> str:
        """Exact string ``"n/d"`` (or ``"n"``) for a scalar."""
        if self.p is None:
            q = mpq(x)
            if q.denominator == 1:
                return str(q.numerator)
            return f"{q.numerator}/{q.denominator}"
        return str(self.elem(x).v)

    def to_mod(self, x, p: int):
        """Integer residue of ``x`` mod ``p``, or None if p divides a denominator."""
        if self.p is not None:
            return int(x.v) % p if self.p == p else None
        q = mpq(x)
        den = int(q.denominator)
        if den % p == 0:
            return None
        return int(q.numerator) * pow(den, -1, p) % p

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return f"Field({self.name})"


QQ = Field()


@lru_cache(maxsize=None)
def GF(p: int) -> Field:
    return Field(p)


# ---------------------------------------------------------------- vectors

def vec_add(u: dict, v: dict, c=1) -> dict:
    """u + c*v as a new vector."""
    out = dict(u)
    axpy(out, v, c)
    return out


def vec_scale(v: dict, c) -> dict:
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


class Echelon:
    """Incrementally built echelon basis of a subspace.

    With ``track=True`` every basis vector remembers how it was obtained as a
    combination of the inserted vectors (keyed by insertion label), which is
    what :meth:`express` and :meth:`kernel` need.
    """

    def __init__(self, field: Field = QQ, track: bool = False):
        self.field = field
        self.track = track
        self.basis: dict = {}
        self.combos: dict = {}
        self.independent: list = []  # labels of inserted vectors that were new
        self.relations: list = []  # (label, combo) for dependent insertions

    @property
    def rank(self) -> int:
        return len(self.basis)

    def add(self, vec: dict, label=None) -> bool:
        """Insert ``vec``; return True if it enlarged the span."""
        v = dict(vec)
        combo = {label: self.field.one} if self.track else None
        k = reduce_vector(v, self.basis, combo, self.combos)
        if k == -1:
            if self.track:
                self.relations.append((label, combo))
            return False
        inv = 1 / v[k]
        self.basis[k] = {j: x * inv for j, x in v.items()}
        if self.track:
            self.combos[k] = {j: x * inv for j, x in combo.items()}
        self.independent.append(label)
        return True

    def reduce(self, vec: dict) -> dict:
        """Residue of ``vec`` modulo the span (deterministic representative)."""
        v = dict(vec)
        reduce_vector(v, self.basis)
        return v

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def express(self, vec: dict):
        """Coefficients ``x`` (by label) with ``sum x[l] * inserted[l] == vec``.

        Only independent labels are used.  Returns None if ``vec`` is not in
        the span.  Requires ``track=True``.
        """
        v = dict(vec)
        combo: dict = {}
        reduce_vector(v, self.basis, combo, self.combos)
        if v:
            return None
        return {k: -x for k, x in combo.items()}

    def kernel(self) -> list:
        """Relations among the inserted vectors, one per dependent insertion."""
        return [c for _, c in self.relations]


# ---------------------------------------------------------------- matrices

class ScalarMatrix:
    """Immutable matrix over a field.

    Storage is a tuple of sparse row dicts when fewer than a quarter of the
    entries are nonzero and dense row tuples otherwise; results never depend
    on which was picked.
    """

    DENSITY = 0.25

    def __init__(self, nrows: int, ncols: int, rows, field: Field = QQ):
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        sparse = []
        nnz = 0
        for r in rows:
            if isinstance(r, dict):
                d = {j: field(x) for j, x in r.items() if x}
            else:
                if len(r) != ncols:
                    raise ValueError("row length does not match column count")
                d = {j: field(x) for j, x in enumerate(r) if x}
            if any(not (0 <= j < ncols) for j in d):
                raise ValueError("column index out of range")
            sparse.append(d)
            nnz += len(d)
        if len(sparse) != nrows:
            raise ValueError("row count does not match")
        total = nrows * ncols
        if total and nnz / total >= self.DENSITY:
            z = field.zero
            self._dense = tuple(tuple(d.get(j, z) for j in range(ncols)) for d in sparse)
            self._sparse = None
        else:
            self._dense = None
            self._sparse = tuple(sparse)

    @classmethod
    def from_rows(cls, rows, field: Field = QQ) -> "ScalarMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, rows, field)

    @classmethod
    def from_columns(cls, nrows: int, columns, field: Field = QQ) -> "ScalarMatrix":
        rows = [dict() for _ in range(nrows)]
        for j, col in enumerate(columns):
            for i, x in col.items():
                if x:
                    rows[i][j] = x
        return cls(nrows, len(columns), rows, field)

    @classmethod
    def identity(cls, n: int, field: Field = QQ) -> "ScalarMatrix":
        return cls(n, n, [{i: field.one} for i in range(n)], field)

    @classmethod
    def zero(cls, nrows: int, ncols: int, field: Field = QQ) -> "ScalarMatrix":
        return cls(nrows, ncols, [{} for _ in range(nrows)], field)

    @property
    def storage(self) -> str:
        return "dense" if self._dense is not None else "sparse"

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def row(self, i: int) -> dict:
        if self._sparse is not None:
            return dict(self._sparse[i])
        return {j: x for j, x in enumerate(self._dense[i]) if x}

    def sparse_rows(self) -> list:
        return [self.row(i) for i in range(self.nrows)]

    def columns(self) -> list:
        cols = [dict() for _ in range(self.ncols)]
        for i in range(self.nrows):
            for j, x in self.row(i).items():
                cols[j][i] = x
        return cols

    def __getitem__(self, ij):
        i, j = ij
        return self.row(i).get(j, self.field.zero)

    def tolist(self) -> list:
        z = self.field.zero
        return [[self.row(i).get(j, z) for j in range(self.ncols)] for i in range(self.nrows)]

    def transpose(self) -> "ScalarMatrix":
        return ScalarMatrix(self.ncols, self.nrows, self.columns(), self.field)

    def __matmul__(self, other):
        if isinstance(other, ScalarMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            orows = other.sparse_rows()
            out = []
            for i in range(self.nrows):
                acc: dict = {}
                for k, x in self.row(i).items():
                    axpy(acc, orows[k], x)
                out.append(acc)
            return ScalarMatrix(self.nrows, other.ncols, out, self.field)
        v = list(other)
        if len(v) != self.ncols:
            raise ValueError("vector length mismatch")
        z = self.field.zero
        return [sum((x * v[j] for j, x in self.row(i).items()), z) for i in range(self.nrows)]

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return ScalarMatrix(self.nrows, self.ncols,
                            [vec_add(self.row(i), other.row(i)) for i in range(self.nrows)], self.field)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "ScalarMatrix":
        c = self.field(c)
        return ScalarMatrix(self.nrows, self.ncols, [vec_scale(self.row(i), c) for i in range(self.nrows)],
                            self.field)

    def __eq__(self, other):
        if not isinstance(other, ScalarMatrix):
            return NotImplemented
        return self.shape == other.shape and all(self.row(i) == other.row(i) for i in range(self.nrows))

    def __hash__(self):
        return hash((self.shape, tuple(tuple(sorted(self.row(i).items())) for i in range(self.nrows))))

    def is_identity(self) -> bool:
        return self.nrows == self.ncols and self == ScalarMatrix.identity(self.nrows, self.field)

    def format_rows(self) -> list:
        """Row-major exact strings, as emitted in reports."""
        return [[self.field.format(x) for x in r] for r in self.tolist()]

    def __repr__(self):
        return f"ScalarMatrix({self.format_rows()})"


def _rref_sparse(rows: list, ncols: int, field: Field):
    basis: dict = {}
    for r in rows:
        v = dict(r)
        k = reduce_vector(v, basis)
        if k != -1:
            inv = 1 / v[k]
            basis[k] = {j: x * inv for j, x in v.items()}
    pivots = sorted(basis)
    pivset = set(pivots)
    # back substitution, highest pivot first
    for p in reversed(pivots):
        row = basis[p]
        for q in [j for j in row if j in pivset and j != p]:
            axpy(row, basis[q], -row[q])
    return pivots, [basis[p] for p in pivots]


def rref(m: ScalarMatrix):
    """Return ``(rank, pivots, reduced)`` with ``reduced`` the unique RREF of ``m``."""
    pivots, prow = _rref_sparse(m.sparse_rows(), m.ncols, m.field)
    rows = prow + [{} for _ in range(m.nrows - len(prow))]
    return len(pivots), pivots, ScalarMatrix(m.nrows, m.ncols, rows, m.field)


def kernel_basis(m: ScalarMatrix) -> list:
    """Basis of ``{v : m v = 0}`` as dense lists, one per free column."""
    f = m.field
    pivots, prow = _rref_sparse(m.sparse_rows(), m.ncols, f)
    pivset = set(pivots)
    out = []
    for free in range(m.ncols):
        if free in pivset:
            continue
        v = [f.zero] * m.ncols
        v[free] = f.one
        for p, row in zip(pivots, prow):
            x = row.get(free)
            if x:
                v[p] = -x
        out.append(v)
    return out


def solve(m: ScalarMatrix, b):
    """Solve ``m x = b``.

    Returns ``(particular, nullspace)`` with the free variables of the RREF set
    to zero in ``particular``, or None when the system is inconsistent.
    """
    b = [m.field(x) for x in b]
    if len(b) != m.nrows:
        raise ValueError(f"right-hand side has length {len(b)}, matrix has {m.nrows} rows")
    f = m.field
    n = m.ncols
    rows = m.sparse_rows()
    for i, x in enumerate(b):
        if x:
            rows[i][n] = x
    pivots, prow = _rref_sparse(rows, n + 1, f)
    if pivots and pivots[-1] == n:
        return None
    x = [f.zero] * n
    for p, row in zip(pivots, prow):
        x[p] = row.get(n, f.zero)
    return x, kernel_basis(m)


def invert(m: ScalarMatrix):
    """Inverse of a square matrix, or None when singular."""
    if m.nrows != m.ncols:
        raise ValueError(f"cannot invert a {m.nrows}x{m.ncols} matrix")
    n = m.nrows
    f = m.field
    rows = m.sparse_rows()
    for i in range(n):
        rows[i][n + i] = f.one
    pivots, prow = _rref_sparse(rows, 2 * n, f)
    if len(pivots) < n or pivots[n - 1] >= n:
        return None
    inv_rows = [{j - n: x for j, x in row.items() if j >= n} for row in prow[:n]]
    return ScalarMatrix(n, n, inv_rows, f)


def determinant(m: ScalarMatrix):
    """Determinant by elimination (used by tests of the classical case)."""
    if m.nrows != m.ncols:
        raise ValueError("determinant of a non-square matrix")
    a = [list(r) for r in m.tolist()]
    n = m.nrows
    det = m.field.one
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return m.field.zero
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def rank_of_columns(columns: list, nrows: int, field: Field = QQ) -> int:
    """Exact rank of a matrix given by sparse columns."""
    e = Echelon(field)
    for c in columns:
        e.add(c)
    return e.rank


def modular_rank(columns: list, nrows: int, field: Field = QQ, p: int = CERT_PRIME):
    """Rank of the reduction mod ``p``, a lower bound for the exact rank.

    Returns None when some entry has a denominator divisible by ``p``.
    """
    if field.p is not None:
        p = field.p
    cols = []
    for c in columns:
        d = {}
        for k, x in c.items():
            r = field.to_mod(x, p)
            if r is None:
                return None
            if r:
                d[k] = r
        cols.append(d)
    return rank_mod(cols, nrows, p)
