"""Dense linear algebra over prime fields F_q.

Matrices are small (desk-scale), so elimination runs on plain Python
integer lists; numpy is used for storage and for batched products.
Pivoting always takes the first nonzero entry in a column, which makes
ranks, echelon forms and `solve_left` outputs reproducible bit for bit.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, FieldError

MAX_MODULUS = 65521


@lru_cache(maxsize=None)
def is_prime(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


def check_modulus(q) -> int:
    """Validate a field order and return it as an int."""
    if isinstance(q, bool) or not isinstance(q, (int, np.integer)):
        raise FieldError(f"field order must be an integer, got {q!r}")
    q = int(q)
    if not 2 <= q <= MAX_MODULUS:
        raise FieldError(f"field order {q} outside [2, {MAX_MODULUS}]")
    if not is_prime(q):
        raise FieldError(f"field order {q} is not prime")
    return q


class FieldMatrix:
    """Immutable dense matrix over F_q.

    Parameters
    ----------
    q : int
        Prime field order.
    rows : array-like of shape (m, k)
        Entries, each already reduced into ``[0, q)``.
    cols : int, optional
        Column count; only needed when ``rows`` is empty.
    """

    __slots__ = ("q", "_a", "_hash")

    def __init__(self, q, rows, cols=None):
        self.q = check_modulus(q)
        a = np.array(rows, dtype=np.int64)
        if a.size == 0:
            if a.ndim == 2:
                cols = a.shape[1] if cols is None else cols
            a = np.zeros((a.shape[0] if a.ndim == 2 else 0, cols or 0), dtype=np.int64)
        if a.ndim != 2:
            raise DimensionError(f"expected a 2-d array of entries, got ndim={a.ndim}")
        if cols is not None and a.shape[1] != cols:
            raise DimensionError(f"expected {cols} columns, got {a.shape[1]}")
        if a.size and (a.min() < 0 or a.max() >= self.q):
            raise FieldError(f"entries must lie in [0, {self.q})")
        a.setflags(write=False)
        self._a = a
        self._hash = None

    @classmethod
    def reduce(cls, q, values, cols=None) -> "FieldMatrix":
        """Build a matrix from arbitrary integers, reducing them mod q."""
        q = check_modulus(q)
        return cls(q, np.mod(np.asarray(values, dtype=np.int64), q), cols=cols)

    @classmethod
    def zeros(cls, q, rows: int, cols: int) -> "FieldMatrix":
        return cls(q, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, q, size: int) -> "FieldMatrix":
        return cls(q, np.eye(size, dtype=np.int64))

    @property
    def array(self) -> np.ndarray:
        """Read-only int64 view of the entries."""
        return self._a

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def T(self) -> "FieldMatrix":
        return FieldMatrix(self.q, self._a.T)

    def tolist(self) -> list[list[int]]:
        return self._a.tolist()

    def select_rows(self, indices: Iterable[int]) -> "FieldMatrix":
        idx = list(indices)
        return FieldMatrix(self.q, self._a[idx, :], cols=self.cols)

    def column_block(self, start: int, stop: int) -> "FieldMatrix":
        return FieldMatrix(self.q, self._a[:, start:stop], cols=stop - start)

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        return mat_mul(self, other)

    def __add__(self, other: "FieldMatrix") -> "FieldMatrix":
        _check_same_field(self, other)
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return FieldMatrix(self.q, (self._a + other._a) % self.q)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return (
            self.q == other.q
            and self.shape == other.shape
            and bool(np.array_equal(self._a, other._a))
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.q, self.shape, self._a.tobytes()))
        return self._hash

    def __repr__(self) -> str:
        return f"FieldMatrix(q={self.q}, rows={self.tolist()})"

    def to_dict(self) -> dict:
        return {"q": self.q, "rows": self.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "FieldMatrix":
        try:
            q, rows = data["q"], data["rows"]
        except (KeyError, TypeError) as exc:
            raise FieldError(f"matrix JSON needs 'q' and 'rows': {exc}") from None
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise FieldError("'rows' must be a list of integer lists")
        if any(isinstance(e, bool) or not isinstance(e, int) for r in rows for e in r):
            raise FieldError("matrix entries must be integers")
        if len({len(r) for r in rows}) > 1:
            raise DimensionError("ragged matrix rows")
        return cls(q, rows)


def _check_same_field(a: FieldMatrix, b: FieldMatrix) -> None:
    if a.q != b.q:
        raise FieldError(f"modulus mismatch: {a.q} vs {b.q}")


def mat_mul(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    _check_same_field(a, b)
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return FieldMatrix(a.q, (a.array @ b.array) % a.q, cols=b.cols)


def hstack(blocks: Sequence[FieldMatrix]) -> FieldMatrix:
    q = blocks[0].q
    for b in blocks:
        _check_same_field(blocks[0], b)
    return FieldMatrix(q, np.hstack([b.array for b in blocks]))


def vstack(blocks: Sequence[FieldMatrix]) -> FieldMatrix:
    q = blocks[0].q
    for b in blocks:
        _check_same_field(blocks[0], b)
    return FieldMatrix(q, np.vstack([b.array for b in blocks]), cols=blocks[0].cols)


def mat_vec(a: FieldMatrix, v: Sequence[int]) -> tuple[int, ...]:
    """Return a·v as a tuple (v is a column vector given as a sequence)."""
    if len(v) != a.cols:
        raise DimensionError(f"vector of length {len(v)} vs {a.cols} columns")
    if a.rows == 0:
        return ()
    return tuple(int(e) for e in (a.array @ np.asarray(v, dtype=np.int64)) % a.q)


def _eliminate(rows: list[list[int]], q: int, ncols: int) -> list[int]:
    """Reduce `rows` in place to reduced row echelon form; return pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = pow(rows[r][c], -1, q)
        pivot = [e * inv % q for e in rows[r]]
        rows[r] = pivot
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(e - f * pe) % q for e, pe in zip(rows[i], pivot)]
        pivots.append(c)
        r += 1
    return pivots


def rank(a: FieldMatrix) -> int:
    """Row rank over F_q."""
    if a.rows == 0 or a.cols == 0:
        return 0
    return len(_eliminate(a.tolist(), a.q, a.cols))


def rref(a: FieldMatrix) -> tuple[FieldMatrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    rows = a.tolist()
    pivots = _eliminate(rows, a.q, a.cols)
    return FieldMatrix(a.q, rows, cols=a.cols), pivots


def solve_left(a: FieldMatrix, target: Sequence[int]) -> tuple[int, ...] | None:
    """Find v with v·a = target, or None if target is outside rowspan(a).

    Solves aᵀ·vᵀ = targetᵀ by reduced row echelon form with free variables
    fixed to 0, so the returned representative is canonical.
    """
    if len(target) != a.cols:
        raise DimensionError(f"target of length {len(target)} vs {a.cols} columns")
    q = a.q
    t = [int(e) % q for e in target]
    m = a.rows
    aug = [row + [t[i]] for i, row in enumerate(a.T.tolist())]
    pivots = _eliminate(aug, q, m)
    # rows past the pivots are zero on the left; a nonzero RHS there is inconsistent
    if any(row[m] for row in aug[len(pivots):]):
        return None
    v = [0] * m
    for i, c in enumerate(pivots):
        v[c] = aug[i][m]
    return tuple(v)


def rowspan_contains_basis(a: FieldMatrix, x: int) -> bool:
    """True iff the unit vectors e_1..e_x all lie in rowspan(a)."""
    if x > a.cols:
        raise DimensionError(f"x={x} exceeds {a.cols} columns")
    for i in range(x):
        e = [0] * a.cols
        e[i] = 1
        if solve_left(a, e) is None:
            return False
    return True


def primitive_root(q: int) -> int:
    """Smallest generator of the multiplicative group of F_q."""
    q = check_modulus(q)
    if q == 2:
        return 1
    order = q - 1
    factors = {p for p in range(2, order + 1) if order % p == 0 and is_prime(p)}
    for g in range(2, q):
        if all(pow(g, order // p, q) != 1 for p in factors):
            return g
    raise FieldError(f"no primitive root found for {q}")  # pragma: no cover


def vandermonde(q, n: int, width: int, points: Sequence[int] | None = None) -> FieldMatrix:
    """Matrix whose i-th row is (b_i^0, b_i^1, ..., b_i^(width-1)).

    Without explicit points, b_i = g^i (i = 1..n) for the smallest primitive
    root g, which reproduces the row-per-exponent layout of a Reed-Solomon
    generator.
    """
    q = check_modulus(q)
    if q <= n:
        raise FieldError(f"need q > n for {n} distinct nonzero points, got q={q}")
    if not 0 <= width <= n:
        raise DimensionError(f"width {width} must be within [0, {n}]")
    if points is None:
        g = primitive_root(q)
        points = [pow(g, i, q) for i in range(1, n + 1)]
    points = [int(p) for p in points]
    if len(points) != n:
        raise DimensionError(f"expected {n} points, got {len(points)}")
    if any(not 0 <= p < q for p in points):
        raise FieldError("points must be field elements in [0, q)")
    if any(p == 0 for p in points):
        raise FieldError("points must be nonzero")
    if len(set(points)) != n:
        raise FieldError("points must be distinct")
    return FieldMatrix(q, [[pow(p, e, q) for e in range(width)] for p in points], cols=width)


def all_vectors(q: int, dim: int) -> np.ndarray:
    """Every vector of F_q^dim as rows, in lexicographic order."""
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*([np.arange(q, dtype=np.int64)] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def iter_matrices(q: int, rows: int, cols: int) -> Iterable[FieldMatrix]:
    """Every matrix in F_q^{rows x cols}, lexicographic over row-major entries."""
    for entries in itertools.product(range(q), repeat=rows * cols):
        yield FieldMatrix(q, np.array(entries, dtype=np.int64).reshape(rows, cols), cols=cols)
