"""Dense matrices over commutative rings and their determinants, Pfaffians
and hafnians.

Entries may be ``int``, ``Fraction``, :class:`~pfaffform.poly.MultiPoly` or
even-degree :class:`~pfaffform.forms.PolyForm` values.  Nothing here divides
by a ring element except Bareiss elimination over the integers, where every
division is exact.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


class NotSquareError(ValueError):
    pass


class SymmetryError(ValueError):
    """Input to a Pfaffian/hafnian lacks the required (skew-)symmetry."""


def _is_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero()


class RingMatrix:
    """Rectangular matrix, stored row-major as a tuple of row tuples."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data, cols: int | None = None):
        data = tuple(tuple(r) for r in data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if any(len(r) != cols for r in data):
            raise ValueError("ragged matrix")
        self.rows = len(data)
        self.cols = cols
        self.data = data

    @classmethod
    def zeros(cls, rows: int, cols: int, zero=0) -> RingMatrix:
        return cls([[zero] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int, one=1, zero=0) -> RingMatrix:
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], n)

    @classmethod
    def diagonal(cls, entries, zero=0) -> RingMatrix:
        n = len(entries)
        return cls([[entries[i] if i == j else zero for j in range(n)] for i in range(n)], n)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def row(self, i):
        return self.data[i]

    def column(self, j):
        return tuple(r[j] for r in self.data)

    def __iter__(self):
        return iter(self.data)

    def __eq__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return all(a == b for ra, rb in zip(self.data, other.data) for a, b in zip(ra, rb))

    def __hash__(self):
        return hash(self.data)

    def __repr__(self):
        return f"RingMatrix({[list(map(str, r)) for r in self.data]})"

    def to_lists(self):
        return [list(r) for r in self.data]

    def map(self, f) -> RingMatrix:
        return RingMatrix([[f(x) for x in r] for r in self.data], self.cols)

    @property
    def T(self) -> RingMatrix:
        return RingMatrix([self.column(j) for j in range(self.cols)], self.rows)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RingMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)], self.cols)

    def __sub__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RingMatrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)], self.cols)

    def __neg__(self):
        return self.map(lambda x: -x)

    def scale(self, c) -> RingMatrix:
        return self.map(lambda x: x * c)

    def __matmul__(self, other: RingMatrix) -> RingMatrix:
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = [other.column(j) for j in range(other.cols)]
        out = []
        for r in self.data:
            nz = [(k, x) for k, x in enumerate(r) if not _is_zero(x)]
            row = []
            for col in ocols:
                acc = 0
                for k, x in nz:
                    y = col[k]
                    if not _is_zero(y):
                        acc = x * y + acc
                row.append(acc)
            out.append(row)
        return RingMatrix(out, other.cols)

    def hstack(self, other: RingMatrix) -> RingMatrix:
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return RingMatrix([ra + rb for ra, rb in zip(self.data, other.data)], self.cols + other.cols)

    def vstack(self, other: RingMatrix) -> RingMatrix:
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return RingMatrix(self.data + other.data, self.cols)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(_is_zero(x) for r in self.data for x in r)


def _check_indices(idx, n, what):
    for i in idx:
        if not 0 <= i < n:
            raise IndexError(f"{what} index {i} out of range 0..{n - 1}")


def minor(m: RingMatrix, rows=None, cols=None, mode: str = "remove") -> RingMatrix:
    """Submatrix of ``m`` (0-based indices).

    ``mode="remove"`` drops the given rows/columns; ``mode="keep"`` retains
    exactly them, in original order.  ``None`` means "no rows" for removal and
    "all rows" for keeping, so ``minor(m, rows, None, "keep")`` is ``M[A]``.
    """
    if mode not in ("remove", "keep"):
        raise ValueError("mode must be 'remove' or 'keep'")
    rows = () if rows is None and mode == "remove" else rows
    cols = () if cols is None and mode == "remove" else cols
    if rows is not None:
        _check_indices(rows, m.rows, "row")
    if cols is not None:
        _check_indices(cols, m.cols, "column")
    if mode == "remove":
        rs, cs = set(rows), set(cols)
        keep_r = [i for i in range(m.rows) if i not in rs]
        keep_c = [j for j in range(m.cols) if j not in cs]
    else:
        keep_r = range(m.rows) if rows is None else sorted(set(rows))
        keep_c = range(m.cols) if cols is None else sorted(set(cols))
    return RingMatrix([[m.data[i][j] for j in keep_c] for i in keep_r], len(keep_c))


# -- determinants ---------------------------------------------------------

def _is_scalar_matrix(m: RingMatrix) -> bool:
    return all(isinstance(x, (int, Fraction)) for r in m.data for x in r)


def bareiss(m: RingMatrix):
    """Fraction-free Bareiss elimination for integer (or rational) matrices."""
    n = m.rows
    if not m.is_square():
        raise NotSquareError(f"determinant of non-square {m.shape} matrix")
    if n == 0:
        return 1
    den = 1
    rows = [list(r) for r in m.data]
    if any(isinstance(x, Fraction) for r in rows for x in r):
        for r in rows:
            for x in r:
                if isinstance(x, Fraction):
                    den = den * x.denominator // _gcd(den, x.denominator)
        rows = [[int(x * den) for x in r] for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = rows[k][k]
        for i in range(k + 1, n):
            ri, rk = rows[i], rows[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pivot - ri[k] * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    det = sign * rows[n - 1][n - 1]
    if den != 1:
        return Fraction(det, den ** n)
    return det


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def det_expand(m: RingMatrix):
    """Determinant by Laplace expansion with memoisation over used columns.

    Works over any commutative ring and skips zero entries, so it is fast on
    the sparse graph matrices used here.  Rows are processed sparsest first.
    """
    n = m.rows
    if not m.is_square():
        raise NotSquareError(f"determinant of non-square {m.shape} matrix")
    if n == 0:
        return 1
    nz = [[(j, x) for j, x in enumerate(r) if not _is_zero(x)] for r in m.data]
    if any(not r for r in nz):
        return 0
    order = _row_order(nz, n)
    # sign of the row permutation
    perm_sign = 1
    seen = [False] * n
    for i in range(n):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = order[j]
                length += 1
            if length % 2 == 0:
                perm_sign = -perm_sign
    states: dict[int, object] = {0: perm_sign}
    for r in order:
        new: dict[int, object] = {}
        for mask, val in states.items():
            for j, x in nz[r]:
                bit = 1 << j
                if mask & bit:
                    continue
                term = x * val
                if bin(mask >> (j + 1)).count("1") & 1:
                    term = -term
                key = mask | bit
                if key in new:
                    new[key] = new[key] + term
                else:
                    new[key] = term
        states = {k: v for k, v in new.items() if not _is_zero(v)}
        if not states:
            return 0
    return states.get((1 << n) - 1, 0)


def _row_order(nz, n):
    """Greedy order: next row is the one introducing fewest new columns."""
    remaining = set(range(n))
    used = 0
    order = []
    while remaining:
        best = min(remaining, key=lambda r: (sum(1 for j, _ in nz[r] if not used >> j & 1), len(nz[r]), r))
        order.append(best)
        remaining.remove(best)
        for j, _ in nz[best]:
            used |= 1 << j
    return order


def determinant(m: RingMatrix):
    """Exact determinant; Bareiss for scalar matrices, sparse expansion otherwise."""
    if not m.is_square():
        raise NotSquareError(f"determinant of non-square {m.shape} matrix")
    if _is_scalar_matrix(m):
        return bareiss(m)
    return det_expand(m)


def adjugate(m: RingMatrix) -> RingMatrix:
    """Classical adjoint: ``adj(m) @ m == det(m) * 1``."""
    n = m.rows
    if not m.is_square():
        raise NotSquareError("adjugate of non-square matrix")
    if n == 0:
        return RingMatrix([], 0)
    if n == 1:
        return RingMatrix([[1]], 1)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            c = determinant(minor(m, [j], [i]))
            out[i][j] = -c if (i + j) % 2 else c
    return RingMatrix(out, n)


# -- Pfaffians and hafnians ----------------------------------------------

def _neg_equal(a, b) -> bool:
    return _is_zero(a + b)


def is_skew_symmetric(m: RingMatrix) -> bool:
    if not m.is_square():
        return False
    n = m.rows
    return all(_is_zero(m.data[i][i]) for i in range(n)) and all(
        _neg_equal(m.data[i][j], m.data[j][i]) for i in range(n) for j in range(i + 1, n)
    )


def is_symmetric(m: RingMatrix) -> bool:
    if not m.is_square():
        return False
    n = m.rows
    return all(m.data[i][j] == m.data[j][i] for i in range(n) for j in range(i + 1, n))


def _matching_sum(m: RingMatrix, signed: bool):
    n = m.rows
    data = m.data

    @lru_cache(maxsize=None)
    def rec(mask: int):
        # mask: set of indices still to be matched
        if mask == 0:
            return 1
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        total = 0
        pos = 0
        j = i + 1
        while j < n:
            if rest >> j & 1:
                x = data[i][j]
                if not _is_zero(x):
                    sub = rec(rest & ~(1 << j))
                    if not (isinstance(sub, int) and sub == 0):
                        term = x * sub
                        if signed and pos % 2:
                            term = -term
                        total = term + total
                pos += 1
            j += 1
        return total

    result = rec((1 << n) - 1)
    rec.cache_clear()
    return result


def pfaffian(m: RingMatrix):
    """Pfaffian as a signed sum over perfect matchings; zero in odd dimension."""
    if not m.is_square():
        raise NotSquareError("Pfaffian of non-square matrix")
    if not is_skew_symmetric(m):
        raise SymmetryError("Pfaffian needs a skew-symmetric matrix")
    if m.rows % 2:
        return 0
    return _matching_sum(m, signed=True)


def hafnian(m: RingMatrix):
    """Hafnian: unsigned sum over perfect matchings of a symmetric matrix."""
    if not m.is_square():
        raise NotSquareError("hafnian of non-square matrix")
    if m.rows % 2:
        raise ValueError("hafnian needs even dimension")
    if not is_symmetric(m):
        raise SymmetryError("hafnian needs a symmetric matrix")
    return _matching_sum(m, signed=False)
