"""Exact discrete distributions and Shannon quantities in bits.

Probabilities are Fractions so that independence ("I(X;Y) == 0") is decided
by exact factorization; entropies are floats computed only for reporting.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import SpirkitError


class PmfError(SpirkitError):
    code = "PMF"


def binary_entropy(p) -> float:
    """h2(p) = -p log2 p - (1-p) log2 (1-p), with h2(0) = h2(1) = 0."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def entropy_of(probs: Iterable) -> float:
    return -sum(float(p) * math.log2(p) for p in probs if p)


def variational_distance(p: Mapping, q: Mapping) -> Fraction:
    """sum_x |p(x) - q(x)| (no 1/2 factor)."""
    keys = set(p) | set(q)
    return sum((abs(Fraction(p.get(k, 0)) - Fraction(q.get(k, 0))) for k in keys), Fraction(0))


@dataclass(frozen=True)
class JointPmf:
    """Joint distribution of named discrete variables.

    `probs` maps outcome tuples (ordered like `names`) to exact probabilities.
    """

    names: tuple[str, ...]
    probs: Mapping[tuple, Fraction]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise PmfError(f"duplicate variable names {self.names}")
        total = Fraction(0)
        for outcome, p in self.probs.items():
            if len(outcome) != len(self.names):
                raise PmfError(f"outcome {outcome!r} does not match arity {len(self.names)}")
            if p < 0:
                raise PmfError(f"negative probability for {outcome!r}")
            total += p
        if total != 1:
            raise PmfError(f"probabilities sum to {total}, not 1")

    @classmethod
    def uniform_over(cls, names: Sequence[str], outcomes: Iterable[tuple]) -> "JointPmf":
        """Pmf of the outcomes produced by a uniformly weighted enumeration."""
        counts = Counter(tuple(o) for o in outcomes)
        total = sum(counts.values())
        if total == 0:
            raise PmfError("empty enumeration")
        return cls(tuple(names), {o: Fraction(c, total) for o, c in counts.items()})

    def _index(self, vars_: Sequence[str]) -> list[int]:
        try:
            return [self.names.index(v) for v in vars_]
        except ValueError:
            raise PmfError(f"unknown variable in {list(vars_)}; have {self.names}") from None

    def marginal(self, vars_: Sequence[str]) -> dict[tuple, Fraction]:
        idx = self._index(vars_)
        out: dict[tuple, Fraction] = {}
        for o, p in self.probs.items():
            key = tuple(o[i] for i in idx)
            out[key] = out.get(key, 0) + p
        return out

    def entropy(self, vars_: Sequence[str]) -> float:
        return entropy_of(self.marginal(vars_).values())

    def independent(self, xs: Sequence[str], ys: Sequence[str]) -> bool:
        """Exact test of p(x, y) == p(x) p(y) on every cell."""
        _check_disjoint(xs, ys)
        px, py = self.marginal(xs), self.marginal(ys)
        pxy = self.marginal(list(xs) + list(ys))
        nx = len(xs)
        if len(pxy) != len(px) * len(py):
            return False
        return all(p == px[o[:nx]] * py[o[nx:]] for o, p in pxy.items())

    def mutual_information(self, xs: Sequence[str], ys: Sequence[str]) -> float:
        """I(X;Y) = H(X) + H(Y) - H(XY) in bits; exactly 0.0 when independent."""
        _check_disjoint(xs, ys)
        if self.independent(xs, ys):
            return 0.0
        value = self.entropy(xs) + self.entropy(ys) - self.entropy(list(xs) + list(ys))
        return max(value, 0.0)

    def condition(self, var: str, value: Hashable) -> "JointPmf":
        """Distribution of the other variables given var == value."""
        i = self._index([var])[0]
        kept = {o: p for o, p in self.probs.items() if o[i] == value}
        mass = sum(kept.values(), Fraction(0))
        if mass == 0:
            raise PmfError(f"conditioning event {var}={value!r} has probability 0")
        names = self.names[:i] + self.names[i + 1:]
        return JointPmf(names, {o[:i] + o[i + 1:]: p / mass for o, p in kept.items()})


def _check_disjoint(xs, ys):
    if set(xs) & set(ys):
        raise PmfError(f"variable sets overlap: {sorted(set(xs) & set(ys))}")


def mutual_information(p: JointPmf, xs: Sequence[str], ys: Sequence[str]) -> float:
    return p.mutual_information(xs, ys)


def ml_error(pairs: Iterable[tuple[Hashable, Hashable]], order: Mapping[Hashable, int] | None = None) -> Fraction:
    """Error of the maximum-likelihood guess of the first item from the second.

    `pairs` is a uniformly weighted enumeration of (truth, observation).
    Ties go to the candidate earliest in `order` (or the smallest value).
    """
    counts: dict[Hashable, Counter] = {}
    total = 0
    for truth, obs in pairs:
        counts.setdefault(obs, Counter())[truth] += 1
        total += 1
    if total == 0:
        raise PmfError("empty enumeration")
    key = (lambda m: order[m]) if order is not None else (lambda m: m)
    wrong = 0
    for c in counts.values():
        best = max(c.values())
        guess = min((m for m, v in c.items() if v == best), key=key)
        wrong += sum(c.values()) - c[guess]
    return Fraction(wrong, total)


# --- batched integer-coded routines (fast path for linear protocols) -------

def row_codes(arr: np.ndarray) -> np.ndarray:
    """Map each row of an integer array to a dense integer label."""
    arr = np.ascontiguousarray(arr)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.shape[1] == 0:
        return np.zeros(arr.shape[0], dtype=np.int64)
    _, inv = np.unique(arr, axis=0, return_inverse=True)
    return inv.reshape(-1).astype(np.int64)


def grouped_mutual_information(
    groups: np.ndarray, xs: np.ndarray, ys: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """I(X;Y | G=g) for every group g of a uniformly weighted enumeration.

    All arguments are integer label arrays of equal length. Returns
    (mi_bits, exactly_zero) indexed by group label; exactness comes from
    comparing integer counts, c(x,y)·c(g) == c(x)·c(y) on every occupied cell.
    """
    groups = np.asarray(groups, dtype=np.int64)
    ng = int(groups.max()) + 1
    nx = int(xs.max()) + 1
    ny = int(ys.max()) + 1
    if ng * nx * ny >= 2**62:
        raise PmfError("label space too large for combined integer codes")
    n_g = np.bincount(groups, minlength=ng)

    def cells(*labels):
        code = np.zeros_like(groups)
        for lab, size in labels:
            code = code * size + lab
        uniq, cnt = np.unique(code, return_counts=True)
        return uniq, cnt

    ux, cx = cells((groups, ng), (xs, nx))
    uy, cy = cells((groups, ng), (ys, ny))
    uxy, cxy = cells((groups, ng), (xs, nx), (ys, ny))

    def h(uniq, cnt, div):
        s = np.bincount(uniq // div, weights=cnt * np.log2(cnt), minlength=ng)
        return np.log2(np.maximum(n_g, 1)) - s / np.maximum(n_g, 1)

    mi = h(ux, cx, nx) + h(uy, cy, ny) - h(uxy, cxy, nx * ny)

    # exact factorization test on occupied cells
    g_of = uxy // (nx * ny)
    x_of = (uxy // ny) % nx
    y_of = uxy % ny
    # counts are bounded by the enumeration budget, so int64 products are safe
    cx_cell = cx[np.searchsorted(ux, g_of * nx + x_of)]
    cy_cell = cy[np.searchsorted(uy, g_of * ny + y_of)]
    bad_cell = cxy * n_g[g_of] != cx_cell * cy_cell
    exact_zero = np.bincount(g_of, weights=bad_cell, minlength=ng) == 0
    mi = np.where(exact_zero, 0.0, np.maximum(mi, 0.0))
    return mi, exact_zero
