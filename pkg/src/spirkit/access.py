"""Access structures: disjoint monotone increasing/decreasing families on [n].

Party indices are 1-based throughout the public API. Only the extremal
members are stored (minimal authorized sets, maximal forbidden sets);
membership of any other subset follows by monotonicity.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import AccessStructureError

MAX_ENUMERATION_PARTIES = 20

Subset = frozenset


class Classification(enum.Enum):
    AUTHORIZED = "authorized"
    FORBIDDEN = "forbidden"
    NEITHER = "neither"


def _as_subset(s: Iterable[int], n: int) -> frozenset[int]:
    out = frozenset(int(i) for i in s)
    bad = [i for i in out if not 1 <= i <= n]
    if bad:
        raise AccessStructureError(f"indices {sorted(bad)} outside [1, {n}]")
    return out


def _sort_key(s: frozenset[int]):
    return (len(s), sorted(s))


def minimal_sets(family: Iterable[frozenset[int]]) -> list[frozenset[int]]:
    fam = set(family)
    return sorted((a for a in fam if not any(b < a for b in fam)), key=_sort_key)


def maximal_sets(family: Iterable[frozenset[int]]) -> list[frozenset[int]]:
    fam = set(family)
    return sorted((a for a in fam if not any(a < b for b in fam)), key=_sort_key)


def all_subsets(n: int) -> list[frozenset[int]]:
    """Every subset of [n], by size then lexicographically."""
    return [
        frozenset(c)
        for size in range(n + 1)
        for c in itertools.combinations(range(1, n + 1), size)
    ]


@dataclass(frozen=True)
class AccessStructure:
    """An access structure (authorized, forbidden) over parties 1..n.

    Construction checks that both lists are antichains and that no minimal
    authorized set is contained in a maximal forbidden set.
    """

    n: int
    min_authorized: tuple[frozenset[int], ...]
    max_forbidden: tuple[frozenset[int], ...]

    def __init__(self, n: int, min_authorized, max_forbidden):
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise AccessStructureError(f"n must be a positive integer, got {n!r}")
        auth = [_as_subset(s, n) for s in min_authorized]
        forb = [_as_subset(s, n) for s in max_forbidden]
        if len(set(auth)) != len(auth) or len(set(forb)) != len(forb):
            raise AccessStructureError("duplicate sets")
        for fam, name in ((auth, "min_authorized"), (forb, "max_forbidden")):
            for a, b in itertools.permutations(fam, 2):
                if a < b:
                    raise AccessStructureError(
                        f"{name} is not an antichain: {sorted(a)} ⊂ {sorted(b)}"
                    )
        for a in auth:
            for b in forb:
                if a <= b:
                    raise AccessStructureError(
                        f"authorized {sorted(a)} lies inside forbidden {sorted(b)}"
                    )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "min_authorized", tuple(sorted(auth, key=_sort_key)))
        object.__setattr__(self, "max_forbidden", tuple(sorted(forb, key=_sort_key)))

    @classmethod
    def from_families(cls, n: int, authorized, forbidden) -> "AccessStructure":
        """Build from arbitrary generating families (closed up/down implicitly)."""
        auth = [_as_subset(s, n) for s in authorized]
        forb = [_as_subset(s, n) for s in forbidden]
        return cls(n, minimal_sets(auth), maximal_sets(forb))

    def is_authorized(self, s) -> bool:
        s = _as_subset(s, self.n)
        return any(a <= s for a in self.min_authorized)

    def is_forbidden(self, s) -> bool:
        s = _as_subset(s, self.n)
        return any(s <= b for b in self.max_forbidden)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "min_authorized": [sorted(s) for s in self.min_authorized],
            "max_forbidden": [sorted(s) for s in self.max_forbidden],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AccessStructure":
        try:
            n = data["n"]
            auth = data["min_authorized"]
            forb = data["max_forbidden"]
        except (KeyError, TypeError) as exc:
            raise AccessStructureError(f"access JSON missing field {exc}") from None
        for fam in (auth, forb):
            if not isinstance(fam, list):
                raise AccessStructureError("set families must be lists")
            for s in fam:
                if not isinstance(s, list) or any(
                    isinstance(i, bool) or not isinstance(i, int) for i in s
                ):
                    raise AccessStructureError(f"malformed set {s!r}")
                if s != sorted(set(s)):
                    raise AccessStructureError(f"set {s} must be sorted and duplicate-free")
        return cls(n, auth, forb)


def classify(access: AccessStructure, s) -> Classification:
    if access.is_authorized(s):
        return Classification.AUTHORIZED
    if access.is_forbidden(s):
        return Classification.FORBIDDEN
    return Classification.NEITHER


def threshold(n: int, r: int, t: int) -> AccessStructure:
    """Sets of size >= r are authorized, sets of size <= t are forbidden."""
    if not 0 <= t < r <= n:
        raise AccessStructureError(f"need 0 <= t < r <= n, got (n, r, t) = ({n}, {r}, {t})")
    parties = range(1, n + 1)
    return AccessStructure(
        n,
        [frozenset(c) for c in itertools.combinations(parties, r)],
        [frozenset(c) for c in itertools.combinations(parties, t)],
    )


def delta(access: AccessStructure) -> int:
    """min |A - B| over authorized A and forbidden B.

    |A - B| only grows as A grows or B shrinks, so the extremal sets suffice.
    """
    if not access.min_authorized or not access.max_forbidden:
        raise AccessStructureError("delta needs nonempty authorized and forbidden families")
    return min(len(a - b) for a in access.min_authorized for b in access.max_forbidden)


def rate_bound(access: AccessStructure) -> Fraction:
    """Upper bound delta/n on the rate of any completely secure scheme."""
    return Fraction(delta(access), access.n)


def enumerate_all(access: AccessStructure) -> tuple[list[frozenset[int]], list[frozenset[int]]]:
    """Expand both families explicitly (test oracle; exponential in n)."""
    if access.n > MAX_ENUMERATION_PARTIES:
        raise AccessStructureError(
            f"refusing to enumerate 2^{access.n} subsets (limit n <= {MAX_ENUMERATION_PARTIES})"
        )
    subsets = all_subsets(access.n)
    auth = [s for s in subsets if any(a <= s for a in access.min_authorized)]
    forb = [s for s in subsets if any(s <= b for b in access.max_forbidden)]
    return auth, forb


EXAMPLE_ACCESS = AccessStructure(3, [{2, 3}], [{1, 2}, {3}])
