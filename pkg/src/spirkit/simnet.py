"""Deterministic in-process execution of SPIR sessions.

One user and n servers exchange messages through a FIFO event loop.
Queries go out by ascending server index; servers outside the responding
set stay silent. A colluding set's view is the queries it received.

Randomness comes from `FieldRng`: numpy's PCG64 bit generator seeded with
the 64-bit session seed, read through `random_raw()` (raw 64-bit words),
with field elements drawn by rejection sampling (accept a word w when
w < floor(2^64 / q)·q, return w mod q). Draw order is fixed: user
randomness R (row-major), then the files M when random, then the seed W.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gf
from .errors import BudgetExceeded, CannotReconstruct, ProtocolError
from .gf import FieldMatrix
from .spir import ProjectedLinearSpir, answer, make_query, reconstruct_file, spir_to_mmsp
from .mmsp import accepts

_WORD = 1 << 64


class FieldRng:
    """Portable stream of uniform field elements from a 64-bit seed."""

    def __init__(self, seed: int):
        if not 0 <= seed < _WORD:
            raise ProtocolError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self._bits = np.random.PCG64(seed)

    def element(self, q: int) -> int:
        limit = (_WORD // q) * q
        while True:
            w = int(self._bits.random_raw())
            if w < limit:
                return w % q

    def vector(self, q: int, length: int) -> tuple[int, ...]:
        return tuple(self.element(q) for _ in range(length))

    def matrix(self, q: int, rows: int, cols: int) -> FieldMatrix:
        entries = [self.vector(q, cols) for _ in range(rows)]
        return FieldMatrix(q, entries, cols=cols)


@dataclass(frozen=True)
class SessionConfig:
    protocol: ProjectedLinearSpir
    k: int
    respond: frozenset
    collude: frozenset
    seed: int
    files: tuple | str = "random"
    shared_seed: tuple | None = None
    user_randomness: FieldMatrix | None = None

    def __post_init__(self):
        p = self.protocol
        object.__setattr__(self, "respond", frozenset(self.respond))
        object.__setattr__(self, "collude", frozenset(self.collude))
        if not 1 <= self.k <= p.f:
            raise ProtocolError(f"target index {self.k} outside [1, {p.f}]")
        for name in ("respond", "collude"):
            bad = [j for j in getattr(self, name) if not 1 <= j <= p.n]
            if bad:
                raise ProtocolError(f"{name} set has servers {sorted(bad)} outside [1, {p.n}]")
        if self.files != "random":
            if len(tuple(self.files)) != p.f * p.x:
                raise ProtocolError(f"files must have {p.f * p.x} symbols")
            object.__setattr__(self, "files", tuple(int(e) for e in self.files))


@dataclass
class SessionTrace:
    events: list
    adversary_view: dict
    outcome: dict

    def to_dict(self) -> dict:
        return {
            "events": self.events,
            "adversary_view": {str(j): v for j, v in sorted(self.adversary_view.items())},
            "outcome": self.outcome,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def to_text(self) -> str:
        lines = []
        for ev in self.events:
            if ev["type"] == "AnswerReceived":
                lines.append(f"{ev['type']} server={ev['server']} answer={ev['answer']}")
            else:
                lines.append(f"{ev['type']} server={ev['server']}")
        for j, v in sorted(self.adversary_view.items()):
            lines.append(f"AdversaryView server={j} query={v}")
        o = self.outcome
        lines.append(f"Outcome status={o['status']} value={o.get('value')}")
        return "\n".join(lines)


class _Server:
    def __init__(self, p: ProjectedLinearSpir, j: int, files, seed, responsive: bool):
        self.p, self.j, self.files, self.seed = p, j, files, seed
        self.responsive = responsive
        self.received = None

    def on_query(self, rows: FieldMatrix):
        self.received = rows
        if not self.responsive:
            return None
        return answer(self.p, self.j, rows, self.files, self.seed)


class _User:
    def __init__(self, p: ProjectedLinearSpir, k: int, r: FieldMatrix):
        self.p, self.k = p, k
        self.queries = make_query(p, k, r)
        self.answers: dict[int, tuple] = {}

    def decode(self):
        return reconstruct_file(self.p, sorted(self.answers), self.answers, self.k)


def run_session(cfg: SessionConfig) -> SessionTrace:
    p = cfg.protocol
    rng = FieldRng(cfg.seed)
    r = cfg.user_randomness
    if r is None:
        r = rng.matrix(p.q, *p.randomness_shape)
    files = rng.vector(p.q, p.f * p.x) if cfg.files == "random" else cfg.files
    seed = cfg.shared_seed if cfg.shared_seed is not None else rng.vector(p.q, p.y)

    user = _User(p, cfg.k, r)
    servers = {j: _Server(p, j, files, seed, j in cfg.respond) for j in range(1, p.n + 1)}
    events = []
    inbox = deque()
    for j in range(1, p.n + 1):
        inbox.append(("query", j, user.queries[j]))
        events.append({"type": "QuerySent", "server": j})
    replies = deque()
    while inbox:
        _, j, rows = inbox.popleft()
        replies.append((j, servers[j].on_query(rows)))
    while replies:
        j, d = replies.popleft()
        if d is None:
            events.append({"type": "NoResponse", "server": j})
        else:
            user.answers[j] = d
            events.append({"type": "AnswerReceived", "server": j, "answer": list(d)})

    view = {j: servers[j].received.tolist() for j in sorted(cfg.collude)}
    truth = tuple(files[(cfg.k - 1) * p.x:cfg.k * p.x])
    if not accepts(spir_to_mmsp(p), cfg.respond):
        outcome = {"status": "unreachable"}
    else:
        try:
            got = user.decode()
        except CannotReconstruct:  # pragma: no cover - guarded by accepts above
            outcome = {"status": "unreachable"}
        else:
            status = "reconstructed" if got == truth else "mismatch"
            outcome = {"status": status, "value": list(got)}
    return SessionTrace(events, view, outcome)


@dataclass
class SweepSummary:
    trials: int
    outcomes: dict = field(default_factory=dict)
    view_histogram: dict = field(default_factory=dict)

    def successes(self, respond) -> int:
        return self.outcomes[_key(respond)].get("reconstructed", 0)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "outcomes": self.outcomes,
            "view_histogram": {
                str(k): dict(sorted(h.items()))
                for k, h in self.view_histogram.items()
            },
        }


def _key(s) -> str:
    return "{" + ",".join(str(i) for i in sorted(s)) + "}"


def sweep_sessions(
    template: SessionConfig,
    trials: int,
    *,
    ks: Sequence[int] | None = None,
    respond_sets: Sequence | None = None,
    budget: int = 10**6,
) -> SweepSummary:
    """Run `trials` sessions per (respond set, k) with fresh M, W, R each time.

    Session i (counting across the whole sweep) uses seed template.seed + i
    mod 2^64. The histogram counts adversary views per target index.
    """
    if trials < 1:
        raise ProtocolError(f"trials must be >= 1, got {trials}")
    ks = [template.k] if ks is None else list(ks)
    respond_sets = [template.respond] if respond_sets is None else list(respond_sets)
    total = trials * len(ks) * len(respond_sets)
    if total > budget:
        raise BudgetExceeded(f"sweep needs {total} sessions, budget is {budget}")
    summary = SweepSummary(trials)
    i = 0
    for respond in respond_sets:
        tally = summary.outcomes.setdefault(_key(respond), Counter())
        for k in ks:
            hist = summary.view_histogram.setdefault(k, Counter())
            for _ in range(trials):
                cfg = SessionConfig(
                    template.protocol, k, respond, template.collude,
                    (template.seed + i) % _WORD,
                )
                i += 1
                trace = run_session(cfg)
                tally[trace.outcome["status"]] += 1
                hist[json.dumps(trace.to_dict()["adversary_view"], sort_keys=True)] += 1
    summary.outcomes = {k: dict(v) for k, v in summary.outcomes.items()}
    return summary


def adversary_views(p: ProjectedLinearSpir, k: int, collude) -> Counter:
    """Multiset of colluding-set queries over every user randomness (exhaustive)."""
    rows = [i for i, t in enumerate(p.tau) if t in set(collude)]
    views = Counter()
    for v in gf.all_vectors(p.q, p.randomness_shape[0] * p.randomness_shape[1]):
        r = FieldMatrix(p.q, v.reshape(p.randomness_shape), cols=p.randomness_shape[1])
        views[tuple(map(tuple, p.query_matrix(k, r).select_rows(rows).tolist()))] += 1
    return views

