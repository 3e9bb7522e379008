"""Multi-target monotone span programs (MMSPs).

An MMSP is a matrix G = (G' | G'') over F_q, with x secret columns and y
randomness columns, plus a position map tau assigning each row to a party.
A party set is accepted when e_1..e_x lie in the rowspan of its rows, and
rejected when span(e_1..e_x) meets that rowspan only in 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import gf
from .access import AccessStructure, all_subsets, threshold
from .errors import (
    BudgetExceeded,
    DimensionError,
    InvariantViolation,
    NotFound,
    ProtocolError,
)
from .gf import FieldMatrix


def check_position_map(tau: Sequence[int], n: int, z: int) -> tuple[int, ...]:
    tau = tuple(int(t) for t in tau)
    if len(tau) != z:
        raise DimensionError(f"position map has {len(tau)} entries for {z} rows")
    if any(not 1 <= t <= n for t in tau):
        raise ProtocolError(f"position map entries must lie in [1, {n}]")
    if set(tau) != set(range(1, n + 1)):
        missing = sorted(set(range(1, n + 1)) - set(tau))
        raise ProtocolError(f"parties {missing} own no rows (position map must be onto)")
    return tau


def rows_of(tau: Sequence[int], parties: Iterable[int]) -> tuple[int, ...]:
    """0-based row indices owned by `parties`, ascending."""
    s = set(parties)
    return tuple(i for i, t in enumerate(tau) if t in s)


@dataclass(frozen=True)
class Mmsp:
    g: FieldMatrix
    x: int
    tau: tuple[int, ...]
    n: int

    def __post_init__(self):
        if self.x < 1:
            raise ProtocolError(f"x must be >= 1, got {self.x}")
        if self.g.cols < self.x:
            raise DimensionError(f"G has {self.g.cols} columns but x={self.x}")
        object.__setattr__(self, "tau", check_position_map(self.tau, self.n, self.g.rows))

    @property
    def q(self) -> int:
        return self.g.q

    @property
    def y(self) -> int:
        return self.g.cols - self.x

    @property
    def z(self) -> int:
        return self.g.rows

    @property
    def secret_part(self) -> FieldMatrix:
        """G', the first x columns."""
        return self.g.column_block(0, self.x)

    @property
    def random_part(self) -> FieldMatrix:
        """G'', the last y columns."""
        return self.g.column_block(self.x, self.g.cols)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.x, self.z)

    def rows_for(self, parties) -> tuple[int, ...]:
        parties = set(parties)
        bad = [p for p in parties if not 1 <= p <= self.n]
        if bad:
            raise ProtocolError(f"parties {sorted(bad)} outside [1, {self.n}]")
        return rows_of(self.tau, parties)

    def to_dict(self) -> dict:
        return {
            "kind": "mmsp",
            "q": self.q,
            "x": self.x,
            "y": self.y,
            "n": self.n,
            "tau": list(self.tau),
            "g": self.g.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Mmsp":
        return cls(**_linear_fields(data))


def _linear_fields(data: dict) -> dict:
    """Shared parser for the MMSP / NSS JSON layout."""
    try:
        q, x, y, n, tau, g = (data[k] for k in ("q", "x", "y", "n", "tau", "g"))
    except (KeyError, TypeError) as exc:
        raise ProtocolError(f"missing field {exc}") from None
    for name, v in (("x", x), ("y", y), ("n", n)):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ProtocolError(f"'{name}' must be an integer")
    if not isinstance(tau, list):
        raise ProtocolError("'tau' must be a list")
    mat = FieldMatrix.from_dict({"q": q, "rows": g})
    if g == []:
        mat = FieldMatrix(q, [], cols=x + y)
    if mat.cols != x + y:
        raise DimensionError(f"g has {mat.cols} columns, expected x + y = {x + y}")
    return {"g": mat, "x": x, "tau": tuple(tau), "n": n}


@dataclass(frozen=True)
class MmspVerdict:
    accepts_all: bool
    rejects_all: bool
    failing_authorized: list = field(default_factory=list)
    failing_forbidden: list = field(default_factory=list)
    rate: Fraction = Fraction(0)

    @property
    def valid(self) -> bool:
        return self.accepts_all and self.rejects_all

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "accepts_all": self.accepts_all,
            "rejects_all": self.rejects_all,
            "failing_authorized": [sorted(s) for s in self.failing_authorized],
            "failing_forbidden": [sorted(s) for s in self.failing_forbidden],
            "rate": str(self.rate),
        }


def accepts(m: Mmsp, a) -> bool:
    return gf.rowspan_contains_basis(m.g.select_rows(m.rows_for(a)), m.x)


def rejects_definitional(m: Mmsp, b) -> bool:
    """span(E) ∩ rowspan(G_B) = {0}, tested as x + rank G_B == rank [[I_x 0]; G_B]."""
    gb = m.g.select_rows(m.rows_for(b))
    top = gf.hstack([FieldMatrix.identity(m.q, m.x), FieldMatrix.zeros(m.q, m.x, m.y)])
    return m.x + gf.rank(gb) == gf.rank(gf.vstack([top, gb]))


def rejects_rank(m: Mmsp, b) -> bool:
    """Rank form of rejection: rank G''_B == rank G_B."""
    gb = m.g.select_rows(m.rows_for(b))
    return gf.rank(gb.column_block(m.x, gb.cols)) == gf.rank(gb)


def verify(m: Mmsp, access: AccessStructure) -> MmspVerdict:
    """Check that `m` accepts every authorized and rejects every forbidden set.

    Only minimal authorized and maximal forbidden sets are tested: adding
    rows can only grow a rowspan, removing rows can only shrink it. Both
    rejection tests run on every forbidden set and must agree.
    """
    if m.n != access.n:
        raise DimensionError(f"MMSP has n={m.n}, access structure has n={access.n}")
    fail_a = [a for a in access.min_authorized if not accepts(m, a)]
    fail_b = []
    for b in access.max_forbidden:
        by_def = rejects_definitional(m, b)
        if by_def != rejects_rank(m, b):
            raise InvariantViolation(f"rejection tests disagree on {sorted(b)}")
        if not by_def:
            fail_b.append(b)
    return MmspVerdict(not fail_a, not fail_b, fail_a, fail_b, m.rate)


def induced_access(m: Mmsp) -> AccessStructure:
    """The largest access structure `m` realizes: every accepted and every rejected set."""
    subsets = all_subsets(m.n)
    return AccessStructure.from_families(
        m.n,
        [s for s in subsets if accepts(m, s)],
        [s for s in subsets if rejects_rank(m, s)],
    )


def is_mds_generator(a: FieldMatrix, k: int) -> bool:
    """True iff every k rows of `a` are linearly independent."""
    if k > a.rows:
        raise DimensionError(f"k={k} exceeds {a.rows} rows")
    return all(gf.rank(a.select_rows(c)) == k for c in itertools.combinations(range(a.rows), k))


def theorem1_check(g: FieldMatrix, r: int, t: int) -> tuple[bool, bool]:
    """Evaluate both sides of the MDS <=> threshold-MMSP equivalence.

    Returns (MMSP side, MDS side); the two must always agree.
    """
    if g.cols != r:
        raise DimensionError(f"G has {g.cols} columns, expected r={r}")
    n = g.rows
    m = Mmsp(g, r - t, tuple(range(1, n + 1)), n)
    cond_a = verify(m, threshold(n, r, t)).valid
    cond_b = is_mds_generator(g, r) and is_mds_generator(g.column_block(r - t, r), t)
    return cond_a, cond_b


def vandermonde_mmsp(q: int, n: int, r: int, t: int, points=None) -> Mmsp:
    """Reed-Solomon style (r, t, n)-MMSP with x = r - t, y = t, z = n."""
    if not 0 <= t < r <= n:
        raise ProtocolError(f"need 0 <= t < r <= n, got (r, t, n) = ({r}, {t}, {n})")
    g = gf.vandermonde(q, n, r, points)
    return Mmsp(g, r - t, tuple(range(1, n + 1)), n)


def _surjections(z: int, n: int):
    for tau in itertools.product(range(1, n + 1), repeat=z):
        if len(set(tau)) == n:
            yield tau


def search_mmsp(
    access: AccessStructure, q: int, x: int, y: int, max_z: int, budget: int = 10**6
) -> Mmsp:
    """Brute-force the first MMSP realizing `access`.

    Candidates are ordered by row count z, then position map, then the
    entries of G read column-major, all lexicographically, so the result
    is reproducible. Each candidate examined costs one unit of `budget`.
    """
    q = gf.check_modulus(q)
    spent = 0
    for z in range(access.n, max_z + 1):
        for tau in _surjections(z, access.n):
            for entries in itertools.product(range(q), repeat=z * (x + y)):
                spent += 1
                if spent > budget:
                    raise BudgetExceeded(f"search exceeded budget of {budget} candidates")
                g = FieldMatrix(q, np.array(entries, dtype=np.int64).reshape(x + y, z).T)
                m = Mmsp(g, x, tau, access.n)
                if all(accepts(m, a) for a in access.min_authorized) and verify(m, access).valid:
                    return m
    raise NotFound(f"no MMSP with z <= {max_z} over F_{q} realizes the access structure")


@lru_cache(maxsize=4096)
def _reconstruction_matrix(g: FieldMatrix, rows: tuple[int, ...], x: int) -> FieldMatrix | None:
    sub = g.select_rows(rows)
    ks = []
    for i in range(x):
        e = [0] * g.cols
        e[i] = 1
        v = gf.solve_left(sub, e)
        if v is None:
            return None
        ks.append(v)
    return FieldMatrix(g.q, ks, cols=len(rows))


def reconstruction_matrix(m: Mmsp, parties) -> FieldMatrix | None:
    """K with K·G_rows = (I_x | 0), or None when `parties` is not accepted.

    Columns of K follow the ascending row order of the parties' rows.
    """
    return _reconstruction_matrix(m.g, m.rows_for(parties), m.x)


EXAMPLE_MMSP = Mmsp(
    FieldMatrix(3, [[0, 1, 2], [1, 1, 1], [0, 1, 1], [1, 1, 0]]),
    x=1,
    tau=(1, 2, 3, 3),
    n=3,
)
