"""Symmetric PIR: projected linear protocols, conversions, and a generic interface.

A projected linear protocol is the triplet (H, J, tau): the user queries
Q = J·E_k + H·R, server j answers D_j = Q_{tau^-1(j)}·M + (H·W)_{tau^-1(j)},
and an accepted responding set decodes M_k with a fixed matrix K[A].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Mapping, Sequence

import numpy as np

from . import gf
from .access import AccessStructure
from .errors import (
    BudgetExceeded,
    CannotReconstruct,
    DimensionError,
    InvalidShares,
    ProtocolError,
)
from .gf import FieldMatrix
from .info import JointPmf
from .mmsp import Mmsp, check_position_map, reconstruction_matrix, rows_of
from .nss import LinearNss, stack_symbols


def block_selector(q: int, x: int, f: int, k: int) -> FieldMatrix:
    """E_k: x × f·x, identity in block k (1-based), zero elsewhere."""
    if not 1 <= k <= f:
        raise ProtocolError(f"file index {k} outside [1, {f}]")
    e = np.zeros((x, f * x), dtype=np.int64)
    e[:, (k - 1) * x:k * x] = np.eye(x, dtype=np.int64)
    return FieldMatrix(q, e)


def _vector(v, length: int, q: int, what: str) -> tuple[int, ...]:
    v = tuple(int(e) for e in v)
    if len(v) != length:
        raise DimensionError(f"{what} has length {len(v)}, expected {length}")
    if any(not 0 <= e < q for e in v):
        raise ProtocolError(f"{what} entries must lie in [0, {q})")
    return v


@dataclass(frozen=True)
class ProjectedLinearSpir:
    h: FieldMatrix
    j: FieldMatrix
    tau: tuple[int, ...]
    n: int
    f: int

    def __post_init__(self):
        if self.h.q != self.j.q:
            raise ProtocolError(f"H over F_{self.h.q} but J over F_{self.j.q}")
        if self.h.rows != self.j.rows:
            raise DimensionError(f"H has {self.h.rows} rows, J has {self.j.rows}")
        if self.j.cols < 1:
            raise DimensionError("J needs at least one column")
        if self.f < 2:
            raise ProtocolError(f"need at least 2 files, got f={self.f}")
        object.__setattr__(self, "tau", check_position_map(self.tau, self.n, self.h.rows))

    @property
    def q(self) -> int:
        return self.h.q

    @property
    def x(self) -> int:
        return self.j.cols

    @property
    def y(self) -> int:
        return self.h.cols

    @property
    def z(self) -> int:
        return self.h.rows

    @property
    def rate(self) -> Fraction:
        """PIR rate x/z."""
        return Fraction(self.x, self.z)

    @property
    def randomness_rate(self) -> Fraction:
        return Fraction(self.y, self.x)

    @property
    def randomness_shape(self) -> tuple[int, int]:
        return (self.y, self.f * self.x)

    def query_matrix(self, k: int, r: FieldMatrix) -> FieldMatrix:
        if r.shape != self.randomness_shape:
            raise DimensionError(f"user randomness has shape {r.shape}, expected {self.randomness_shape}")
        return self.j @ block_selector(self.q, self.x, self.f, k) + self.h @ r

    def to_dict(self) -> dict:
        return {
            "kind": "spir",
            "q": self.q,
            "x": self.x,
            "y": self.y,
            "n": self.n,
            "f": self.f,
            "tau": list(self.tau),
            "h": self.h.tolist(),
            "j": self.j.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProjectedLinearSpir":
        try:
            q, x, y, n, f, tau = (data[k] for k in ("q", "x", "y", "n", "f", "tau"))
            h_rows, j_rows = data["h"], data["j"]
        except (KeyError, TypeError) as exc:
            raise ProtocolError(f"missing field {exc}") from None
        z = len(tau) if isinstance(tau, list) else None
        h = FieldMatrix.from_dict({"q": q, "rows": h_rows})
        j = FieldMatrix.from_dict({"q": q, "rows": j_rows})
        if y == 0 and z is not None:
            h = FieldMatrix(q, np.zeros((z, 0), dtype=np.int64))
        if h.cols != y or j.cols != x:
            raise DimensionError(f"h/j widths {h.cols}/{j.cols} disagree with y={y}, x={x}")
        return cls(h, j, tuple(tau), n, f)


@dataclass(frozen=True)
class LinearSpir:
    """A linear (not necessarily projected) protocol with an explicit query map.

    `query_fn(k, r)` returns the z × f·x query matrix for user randomness
    `r`, a FieldMatrix of `randomness_shape`; `h` is the shared-randomness
    encoder. Answers follow D_j = Q_{tau^-1(j)}·M + (H·W)_{tau^-1(j)}.
    """

    h: FieldMatrix
    x: int
    tau: tuple[int, ...]
    n: int
    f: int
    query_fn: Callable[[int, FieldMatrix], FieldMatrix] = field(compare=False)
    randomness_shape: tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.f < 2:
            raise ProtocolError(f"need at least 2 files, got f={self.f}")
        object.__setattr__(self, "tau", check_position_map(self.tau, self.n, self.h.rows))

    @property
    def q(self) -> int:
        return self.h.q

    @property
    def y(self) -> int:
        return self.h.cols

    @property
    def z(self) -> int:
        return self.h.rows

    @property
    def rate(self) -> Fraction:
        return Fraction(self.x, self.z)

    def query_matrix(self, k: int, r: FieldMatrix) -> FieldMatrix:
        if not 1 <= k <= self.f:
            raise ProtocolError(f"file index {k} outside [1, {self.f}]")
        qm = self.query_fn(k, r)
        if qm.shape != (self.z, self.f * self.x):
            raise DimensionError(f"query map returned shape {qm.shape}")
        return qm


@dataclass(frozen=True)
class GenericSpir:
    """Arbitrary one-round SPIR given by deterministic maps over finite domains.

    query(k, r) -> (Q_1, ..., Q_n); shared(w) -> (T_1, ..., T_n);
    answer(j, Q_j, files, T_j) -> D_j, with `files` a tuple of f messages.
    Servers and files are 1-based in `answer`/`query`; all values hashable.
    """

    n: int
    f: int
    messages: Sequence[Hashable]
    seeds: Sequence[Hashable]
    user_randomness: Sequence[Hashable]
    query: Callable[[int, Any], tuple]
    shared: Callable[[Any], tuple]
    answer: Callable[[int, Any, tuple, Any], Hashable]

    def answers(self, k: int, r, files: tuple, w) -> tuple:
        qs = self.query(k, r)
        ts = self.shared(w)
        return tuple(self.answer(j, qs[j - 1], files, ts[j - 1]) for j in range(1, self.n + 1))

    def state_count(self) -> int:
        return len(self.messages) ** self.f * len(self.seeds) * len(self.user_randomness) * self.f


@dataclass(frozen=True)
class SpirTranscript:
    k: int
    r: FieldMatrix
    files: tuple[int, ...]
    seed: tuple[int, ...]
    queries: Mapping[int, FieldMatrix]
    answers: Mapping[int, tuple[int, ...]]
    result: tuple[int, ...] | None


def _check_server(p, server: int) -> None:
    if not 1 <= server <= p.n:
        raise ProtocolError(f"server {server} outside [1, {p.n}]")


def make_query(p, k: int, r: FieldMatrix) -> dict[int, FieldMatrix]:
    """Per-server query rows Q_{tau^-1(j)} (works for any linear protocol)."""
    qm = p.query_matrix(k, r)
    return {j: qm.select_rows(rows_of(p.tau, [j])) for j in range(1, p.n + 1)}


def shared_randomness(p, seed: Sequence[int]) -> tuple[int, ...]:
    """T = H·W."""
    return gf.mat_vec(p.h, _vector(seed, p.y, p.q, "seed"))


def answer(p, server: int, query_rows: FieldMatrix, files: Sequence[int], seed: Sequence[int]) -> tuple[int, ...]:
    """D_j = Q_{tau^-1(j)}·M + T_j."""
    _check_server(p, server)
    files = _vector(files, p.f * p.x, p.q, "files")
    rows = rows_of(p.tau, [server])
    if query_rows.shape != (len(rows), p.f * p.x):
        raise DimensionError(f"query for server {server} has shape {query_rows.shape}")
    t = shared_randomness(p, seed)
    qm = gf.mat_vec(query_rows, files)
    return tuple((a + t[i]) % p.q for a, i in zip(qm, rows))


def reconstruct_file(p: ProjectedLinearSpir, parties, answers: Mapping[int, Sequence[int]], k: int | None = None) -> tuple[int, ...]:
    """Apply K[A] to the stacked answers of `parties`.

    `k` is not needed by the decoder: K[A] returns whichever file was
    targeted. It is accepted so call sites can state intent.
    """
    parties = sorted(set(parties))
    if k is not None and not 1 <= k <= p.f:
        raise ProtocolError(f"file index {k} outside [1, {p.f}]")
    m = spir_to_mmsp(p)
    dvec = stack_symbols(p.tau, parties, answers, "answer from server")
    kmat = reconstruction_matrix(m, parties)
    if kmat is None:
        raise CannotReconstruct(f"servers {parties} are not an accepted set")
    return gf.mat_vec(kmat, dvec)


def execute(p: ProjectedLinearSpir, k: int, r: FieldMatrix, files, seed, responding=None) -> SpirTranscript:
    """Run one query/answer round; `result` is None when decoding is impossible."""
    responding = range(1, p.n + 1) if responding is None else sorted(set(responding))
    files = _vector(files, p.f * p.x, p.q, "files")
    seed = _vector(seed, p.y, p.q, "seed")
    queries = make_query(p, k, r)
    answers = {j: answer(p, j, queries[j], files, seed) for j in responding}
    try:
        result = reconstruct_file(p, responding, answers, k)
    except CannotReconstruct:
        result = None
    return SpirTranscript(k, r, files, seed, queries, answers, result)


# --- conversions ---------------------------------------------------------

def mmsp_to_spir(m: Mmsp, f: int) -> ProjectedLinearSpir:
    """(G'', G', tau): randomness encoder G'', query encoder G'."""
    if f < 2:
        raise ProtocolError(f"need at least 2 files, got f={f}")
    return ProjectedLinearSpir(m.random_part, m.secret_part, m.tau, m.n, f)


def spir_to_mmsp(p: ProjectedLinearSpir) -> Mmsp:
    return Mmsp(gf.hstack([p.j, p.h]), p.x, p.tau, p.n)


def project(p) -> ProjectedLinearSpir:
    """Keep H, tau and the first x-column block of the query at K=1, R=0."""
    if isinstance(p, ProjectedLinearSpir):
        j = p.j
    else:
        q0 = p.query_matrix(1, FieldMatrix.zeros(p.q, *p.randomness_shape))
        j = q0.column_block(0, p.x)
    return ProjectedLinearSpir(p.h, j, p.tau, p.n, p.f)


def spir_to_nss(p) -> LinearNss:
    """Dealer simulation with K=1, R=0 and the other files fixed to 0.

    The shares are then D = (Q' | H)·(L; W), so the encoder is (Q' | H).
    """
    pp = project(p)
    return LinearNss(gf.hstack([pp.j, pp.h]), pp.x, pp.tau, pp.n)


# --- generic interface ---------------------------------------------------

def as_generic(p) -> GenericSpir:
    """Wrap a linear protocol in the generic deterministic-map interface."""
    q, x, f = p.q, p.x, p.f
    rshape = p.randomness_shape
    messages = [tuple(v) for v in gf.all_vectors(q, x).tolist()]
    seeds = [tuple(v) for v in gf.all_vectors(q, p.y).tolist()]
    randomness = [
        FieldMatrix(q, np.array(v, dtype=np.int64).reshape(rshape), cols=rshape[1])
        for v in gf.all_vectors(q, rshape[0] * rshape[1]).tolist()
    ]
    owned = [rows_of(p.tau, [j]) for j in range(1, p.n + 1)]

    def query(k, r):
        qm = p.query_matrix(k, r).tolist()
        return tuple(tuple(tuple(qm[i]) for i in rows) for rows in owned)

    def shared(w):
        t = gf.mat_vec(p.h, w)
        return tuple(tuple(t[i] for i in rows) for rows in owned)

    def ans(j, qj, files, tj):
        flat = [e for msg in files for e in msg]
        return tuple(
            (sum(a * b for a, b in zip(row, flat)) + t) % q for row, t in zip(qj, tj)
        )

    return GenericSpir(p.n, f, messages, seeds, randomness, query, shared, ans)


def _worst_leak(p: GenericSpir, access: AccessStructure, r, file_sets) -> float:
    """max over maximal forbidden B of I(M_1; D_B) with K=1, R=r, over the given file tuples and all seeds."""
    outcomes = []
    for files in file_sets:
        for w in p.seeds:
            outcomes.append((files[0], p.answers(1, r, files, w)))
    worst = 0.0
    for b in access.max_forbidden:
        bs = sorted(b)
        pmf = JointPmf.uniform_over(
            ("M1", "DB"), ((m1, tuple(d[j - 1] for j in bs)) for m1, d in outcomes)
        )
        worst = max(worst, pmf.mutual_information(["M1"], ["DB"]))
    return worst


def choose_r_star_m_star(p, access: AccessStructure, budget: int = 10**7):
    """Public constants for the dealer's simulation of a SPIR protocol.

    r* minimizes the worst forbidden-set leakage of M_1 at K=1; m* then
    minimizes it with files 2..f pinned. Ties resolve to the earliest
    element in domain order (for linear protocols, the zero vector/matrix).
    """
    g = p if isinstance(p, GenericSpir) else as_generic(p)
    n_m = len(g.messages)
    cost = len(g.user_randomness) * n_m**g.f * len(g.seeds) + n_m**g.f * len(g.seeds)
    if cost > budget:
        raise BudgetExceeded(f"choosing r*, m* needs {cost} evaluations (budget {budget})")
    all_files = list(itertools.product(g.messages, repeat=g.f))
    best_r, best_val = None, None
    for r in g.user_randomness:
        val = _worst_leak(g, access, r, all_files)
        if best_val is None or val < best_val:
            best_r, best_val = r, val
    best_m, best_val = None, None
    for rest in itertools.product(g.messages, repeat=g.f - 1):
        val = _worst_leak(g, access, best_r, [(m1,) + rest for m1 in g.messages])
        if best_val is None or val < best_val:
            best_m, best_val = rest, val
    return best_r, best_m


def dealer_shares(p: GenericSpir, secret, seed, r_star, m_star) -> tuple:
    """Shares of the converted scheme: the answers with K=1, M_1=secret, R=r*, M_[2:f]=m*."""
    return p.answers(1, r_star, (secret,) + tuple(m_star), seed)
