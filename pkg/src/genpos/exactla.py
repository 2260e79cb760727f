"""Exact dense linear algebra over Q or a prime field GF(p).

Every routine takes ``p``: ``None`` selects the rationals (entries are ``int``
or ``fractions.Fraction``), an int selects GF(p) (entries are residues).
Nothing here ever touches floating point.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

# largest prime below 2^31: products of two residues fit in int64
SCREEN_PRIME = 2147483629


class Matrix:
    """A dense row-major matrix that remembers its column count when empty."""

    __slots__ = ("rows", "ncols")

    def __init__(self, rows: Iterable[Sequence], ncols: int | None = None):
        self.rows = [list(r) for r in rows]
        if ncols is None:
            if not self.rows:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(self.rows[0])
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError(f"ragged row of length {len(r)}, expected {ncols}")

    @classmethod
    def from_flat(cls, nrows: int, ncols: int, entries: Sequence) -> Matrix:
        if len(entries) != nrows * ncols:
            raise ValueError("entries length must equal rows * cols")
        return cls([entries[i * ncols:(i + 1) * ncols] for i in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> Matrix:
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def entries(self) -> list:
        return [x for r in self.rows for x in r]

    def transpose(self) -> Matrix:
        return Matrix(_transpose_rows(self.rows, self.ncols), self.nrows)

    def stack(self, other: Matrix) -> Matrix:
        if other.ncols != self.ncols:
            raise ValueError("column counts differ")
        return Matrix(self.rows + other.rows, self.ncols)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.ncols == other.ncols
                and self.rows == other.rows)

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols})"


def _transpose_rows(rows, ncols):
    return [list(c) for c in zip(*rows)] if rows else [[] for _ in range(ncols)]


# -- scalars ---------------------------------------------------------------

@dataclass(frozen=True)
class Fp:
    """An element of GF(p); ``value`` is always reduced into [0, p)."""
    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ValueError("mixing elements of different prime fields")
            return other.value
        return int(other)

    def __add__(self, other):
        return Fp(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return Fp(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return Fp(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return Fp(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Fp(-self.value, self.p)

    def inverse(self) -> Fp:
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return Fp(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        return self * Fp(self._coerce(other), self.p).inverse()

    def __eq__(self, other):
        if isinstance(other, Fp):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value


def to_rational(x) -> Fraction | int:
    """Canonical exact rational from an int, Fraction or string like "-3/4"."""
    if isinstance(x, bool):
        raise TypeError("bool is not a field scalar")
    if isinstance(x, int):
        return x
    q = Fraction(x)
    return q.numerator if q.denominator == 1 else q


def to_residue(x, p: int) -> int:
    q = Fraction(x) if not isinstance(x, int) else x
    if isinstance(q, int):
        return q % p
    if q.denominator % p == 0:
        raise ZeroDivisionError(f"denominator of {x} vanishes mod {p}")
    return q.numerator * pow(q.denominator, -1, p) % p


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, which covers any sane modulus."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, rng: random.Random) -> int:
    while True:
        n = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_prime(n):
            return n


# -- elimination -------------------------------------------------------------

def _integer_rows(rows):
    # scale each rational row to a primitive integer row; row scaling keeps rank
    out = []
    for r in rows:
        den = 1
        for x in r:
            if isinstance(x, Fraction) and x.denominator != 1:
                den = lcm(den, x.denominator)
        if den == 1:
            ir = [int(x) for x in r]
        else:
            ir = [int(x * den) for x in r]
        g = 0
        for x in ir:
            g = gcd(g, x)
            if g == 1:
                break
        if g > 1:
            ir = [x // g for x in ir]
        if g:
            out.append(ir)
    return out


def _bareiss_rank(rows, ncols):
    a = rows
    m = len(a)
    r = 0
    prev = 1
    for c in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        prow = a[r]
        pc = prow[c]
        for i in range(r + 1, m):
            row = a[i]
            f = row[c]
            if f:
                for j in range(c + 1, ncols):
                    row[j] = (pc * row[j] - f * prow[j]) // prev
            else:
                for j in range(c + 1, ncols):
                    row[j] = pc * row[j] // prev
            row[c] = 0
        prev = pc
        r += 1
    return r


def _modp_rref(rows, ncols, p):
    a = [[to_residue(x, p) for x in r] for r in rows]
    m = len(a)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        prow = [x * inv % p for x in a[r]]
        a[r] = prow
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                row = a[i]
                a[i] = [(x - f * y) % p for x, y in zip(row, prow)]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _rational_rref(rows, ncols):
    a = [[to_rational(x) for x in r] for r in rows]
    m = len(a)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        lead = a[r][c]
        prow = [to_rational(Fraction(x) / lead) if x else 0 for x in a[r]]
        a[r] = prow
        nz = [j for j in range(c, ncols) if prow[j]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                row = a[i]
                for j in nz:
                    row[j] = to_rational(row[j] - f * prow[j])
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rref(M: Matrix, p: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form (zero rows dropped) and the pivot columns."""
    if p is None:
        rows, piv = _rational_rref(M.rows, M.ncols)
    else:
        rows, piv = _modp_rref(M.rows, M.ncols, p)
    return Matrix(rows, M.ncols), piv


def _modp_rank_np(rows, ncols, p):
    a = np.array(rows, dtype=np.int64).reshape(len(rows), ncols) % p
    m = a.shape[0]
    r = 0
    for c in range(ncols):
        if r == m:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = a[r] * inv % p
        below = a[r + 1:]
        f = below[:, c].copy()
        mask = f != 0
        if mask.any():
            below[mask] = (below[mask] - np.outer(f[mask], a[r]) % p) % p
        r += 1
    return r


def _modp_rank(rows, ncols, p):
    if not rows or not ncols:
        return 0
    if p < 2**31:
        return _modp_rank_np([[to_residue(x, p) for x in r] for r in rows], ncols, p)
    return len(_modp_rref(rows, ncols, p)[1])


def rank(M: Matrix, p: int | None = None, cap: int | None = None) -> int:
    """Exact rank of ``M``.

    ``cap`` is an upper bound for the rank that the caller knows to hold (for
    instance the dimension of a space containing the row span).  Over Q the
    rank modulo a prime never exceeds the rational rank, so a modular rank
    that already reaches the bound settles the answer; otherwise fraction-free
    elimination over Z decides.
    """
    if p is not None:
        return _modp_rank(M.rows, M.ncols, p)
    rows = _integer_rows(M.rows)
    upper = min(len(rows), M.ncols)
    if cap is not None:
        upper = min(upper, cap)
    if upper == 0:
        return 0
    screen = _modp_rank_np([[x % SCREEN_PRIME for x in r] for r in rows],
                           M.ncols, SCREEN_PRIME)
    if screen >= upper:
        return upper
    return _bareiss_rank(rows, M.ncols)


def span_dim(vectors: Matrix, p: int | None = None, cap: int | None = None) -> int:
    """Dimension of the span of the rows."""
    return rank(vectors, p, cap)


def kernel_basis(M: Matrix, p: int | None = None) -> Matrix:
    """Rows spanning {v : M v^T = 0}, one per free column.

    The row for free column f has a 1 in position f, zeros in the other free
    positions and minus the RREF column f in the pivot positions.
    """
    R, pivots = rref(M, p)
    n = M.ncols
    pivset = set(pivots)
    out = []
    for f in range(n):
        if f in pivset:
            continue
        v = [0] * n
        v[f] = 1
        for row, c in zip(R.rows, pivots):
            x = row[f]
            if x:
                v[c] = (-x) % p if p is not None else -x
        out.append(v)
    return Matrix(out, n)


def matvec_zero(M: Matrix, v: Sequence, p: int | None = None) -> bool:
    """True when ``M v^T`` is the zero vector."""
    for row in M.rows:
        acc = sum(a * b for a, b in zip(row, v) if a and b)
        if (acc % p if p is not None else acc) != 0:
            return False
    return True


class Echelon:
    """Incrementally built subspace of k^n kept in fully reduced echelon form.

    ``basis`` keeps the vectors as they were inserted (only the independent
    ones), ``reduce`` is the canonical projection with kernel the subspace.
    """

    __slots__ = ("n", "p", "basis", "_rows", "_pivots")

    def __init__(self, n: int, p: int | None = None):
        self.n = n
        self.p = p
        self.basis: list[list] = []
        self._rows: list[list] = []
        self._pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> list[int]:
        return list(self._pivots)

    @property
    def free_columns(self) -> list[int]:
        ps = set(self._pivots)
        return [c for c in range(self.n) if c not in ps]

    @classmethod
    def full(cls, n: int, p: int | None = None) -> Echelon:
        """All of k^n, with the standard basis."""
        e = cls(n, p)
        e._rows = [[int(i == j) for j in range(n)] for i in range(n)]
        e._pivots = list(range(n))
        e.basis = [list(r) for r in e._rows]
        return e

    def copy(self) -> Echelon:
        e = Echelon(self.n, self.p)
        e.basis = list(self.basis)
        e._rows = [list(r) for r in self._rows]
        e._pivots = list(self._pivots)
        return e

    def reduce(self, vec: Sequence) -> list:
        p = self.p
        v = [x % p for x in vec] if p is not None else [to_rational(x) for x in vec]
        for row, c in zip(self._rows, self._pivots):
            f = v[c]
            if not f:
                continue
            if p is None:
                for j, y in enumerate(row):
                    if y:
                        v[j] = to_rational(v[j] - f * y)
            else:
                v = [(x - f * y) % p for x, y in zip(v, row)]
        return v

    def quotient_coords(self, vec: Sequence) -> list:
        """Coordinates of ``vec`` in k^n / self, indexed by the free columns."""
        v = self.reduce(vec)
        return [v[c] for c in self.free_columns]

    def __contains__(self, vec) -> bool:
        return not any(self.reduce(vec))

    def add(self, vec: Sequence) -> bool:
        """Insert ``vec``; return False when it already lies in the span."""
        if self.dim == self.n:
            return False
        v = self.reduce(vec)
        c = next((j for j, x in enumerate(v) if x), None)
        if c is None:
            return False
        p = self.p
        if p is None:
            lead = Fraction(v[c])
            v = [to_rational(x / lead) if x else 0 for x in v]
        else:
            inv = pow(v[c], -1, p)
            v = [x * inv % p for x in v]
        for i, row in enumerate(self._rows):
            f = row[c]
            if f:
                if p is None:
                    self._rows[i] = [to_rational(x - f * y) for x, y in zip(row, v)]
                else:
                    self._rows[i] = [(x - f * y) % p for x, y in zip(row, v)]
        self._rows.append(v)
        self._pivots.append(c)
        self.basis.append(list(vec))
        return True
