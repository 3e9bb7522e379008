"""Linear non-perfect secret sharing: share, reconstruct, convert to MMSP."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import gf
from .errors import CannotReconstruct, DimensionError, InvalidShares, ProtocolError
from .gf import FieldMatrix
from .mmsp import Mmsp, _linear_fields, check_position_map, reconstruction_matrix, rows_of


@dataclass(frozen=True)
class LinearNss:
    """Linear scheme S = encoder·(L; R), row i of the result going to party tau[i]."""

    encoder: FieldMatrix
    x: int
    tau: tuple[int, ...]
    n: int

    def __post_init__(self):
        if self.x < 1 or self.encoder.cols < self.x:
            raise DimensionError(f"bad secret width x={self.x} for {self.encoder.cols} columns")
        object.__setattr__(self, "tau", check_position_map(self.tau, self.n, self.encoder.rows))

    @property
    def q(self) -> int:
        return self.encoder.q

    @property
    def y(self) -> int:
        return self.encoder.cols - self.x

    @property
    def z(self) -> int:
        return self.encoder.rows

    def to_dict(self) -> dict:
        return {
            "kind": "nss",
            "q": self.q,
            "x": self.x,
            "y": self.y,
            "n": self.n,
            "tau": list(self.tau),
            "g": self.encoder.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinearNss":
        f = _linear_fields(data)
        return cls(f["g"], f["x"], f["tau"], f["n"])


@dataclass(frozen=True)
class NssShares:
    """Per-party share vectors, keyed by 1-based party index."""

    shares: Mapping[int, tuple[int, ...]]

    def restrict(self, parties) -> "NssShares":
        return NssShares({j: self.shares[j] for j in sorted(parties)})

    def __getitem__(self, j: int) -> tuple[int, ...]:
        return self.shares[j]


def _check_vector(v: Sequence[int], length: int, q: int, what: str) -> tuple[int, ...]:
    v = tuple(int(e) for e in v)
    if len(v) != length:
        raise DimensionError(f"{what} has length {len(v)}, expected {length}")
    if any(not 0 <= e < q for e in v):
        raise ProtocolError(f"{what} entries must lie in [0, {q})")
    return v


def share(p: LinearNss, secret: Sequence[int], rand: Sequence[int]) -> NssShares:
    secret = _check_vector(secret, p.x, p.q, "secret")
    rand = _check_vector(rand, p.y, p.q, "randomness")
    zvec = gf.mat_vec(p.encoder, secret + rand)
    return NssShares(
        {j: tuple(zvec[i] for i in rows_of(p.tau, [j])) for j in range(1, p.n + 1)}
    )


def stack_symbols(tau, parties, values, what) -> list[int]:
    """Symbols held by `parties`, in ascending row order."""
    by_row = {}
    for j in parties:
        try:
            held = [int(e) for e in values[j]]
        except KeyError:
            raise InvalidShares(f"missing {what} {j}") from None
        own = rows_of(tau, [j])
        if len(held) != len(own):
            raise InvalidShares(f"{what} {j} has {len(held)} symbols, expected {len(own)}")
        by_row.update(zip(own, held))
    return [by_row[i] for i in sorted(by_row)]


def reconstruct(p: LinearNss, parties, shares: NssShares) -> tuple[int, ...]:
    """Recover the secret from the shares held by `parties`.

    Raises InvalidShares when the share vector is not in the encoder's
    image (corrupted data) and CannotReconstruct when the set is not
    accepted by the underlying MMSP.
    """
    parties = sorted(set(parties))
    m = nss_to_mmsp(p)
    rows = m.rows_for(parties)
    svec = stack_symbols(p.tau, parties, shares, "share for party")
    sub = p.encoder.select_rows(rows)
    # consistent iff the share vector is a column combination of G_rows
    if gf.solve_left(sub.T, svec) is None:
        raise InvalidShares(f"shares of parties {parties} are not in the encoder image")
    k = reconstruction_matrix(m, parties)
    if k is None:
        raise CannotReconstruct(f"parties {parties} cannot recover the secret")
    return gf.mat_vec(k, svec)


def nss_to_mmsp(p: LinearNss) -> Mmsp:
    """The encoder's matrix with the same position map is the MMSP."""
    return Mmsp(p.encoder, p.x, p.tau, p.n)


def mmsp_to_nss(m: Mmsp) -> LinearNss:
    return LinearNss(m.g, m.x, m.tau, m.n)


def nss_rates(p: LinearNss) -> tuple[Fraction, Fraction]:
    """(share rate x/z, randomness rate y/x)."""
    return Fraction(p.x, p.z), Fraction(p.y, p.x)
