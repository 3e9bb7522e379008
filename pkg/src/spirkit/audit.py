"""Exact security audits by exhaustive enumeration.

For SPIR: alpha is the worst maximum-likelihood decoding error over user
randomness r, target k and minimal authorized sets; beta the worst leakage
I(D; M_[f]\\{k} | R=r, K=k) of non-targeted files through all answers;
gamma the worst leakage I(K; Q_B) of the index to a maximal forbidden set.
For NSS: alpha over minimal authorized sets, beta = max I(L; S_B).

Every distribution is uniform over an enumerated domain, so probabilities
are integer counts over a common denominator and "leakage == 0" is decided
by exact factorization of those counts.
"""

from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import gf
from .access import AccessStructure
from .errors import BudgetExceeded, ProtocolError
from .gf import FieldMatrix
from .info import (  # noqa: F401  (re-exported)
    JointPmf,
    binary_entropy,
    grouped_mutual_information,
    ml_error,
    mutual_information,
    row_codes,
    variational_distance,
)
from .mmsp import Mmsp, rows_of
from .nss import LinearNss
from .spir import GenericSpir, ProjectedLinearSpir, as_generic

DEFAULT_BUDGET = 10**7


def default_budget() -> int:
    """Enumeration budget, overridable through SPIRKIT_BUDGET."""
    env = os.environ.get("SPIRKIT_BUDGET")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ProtocolError(f"SPIRKIT_BUDGET must be an integer, got {env!r}") from None
        if value < 0:
            raise ProtocolError("SPIRKIT_BUDGET must be nonnegative")
        return value
    return DEFAULT_BUDGET


def _check_budget(states: int, budget: int | None) -> None:
    budget = default_budget() if budget is None else budget
    if states > budget:
        raise BudgetExceeded(f"enumeration needs {states} states, budget is {budget}")


def _fmt(s) -> str:
    return "{" + ",".join(str(i) for i in sorted(s)) + "}"


@dataclass(frozen=True)
class AuditReport:
    alpha: Fraction
    beta_bits: float
    gamma_bits: float | None = None
    per_set: dict = field(default_factory=dict)
    exact_zero_flags: dict = field(default_factory=dict)
    rates: dict = field(default_factory=dict)

    @property
    def completely_secure(self) -> bool:
        return all(self.exact_zero_flags.values())

    def to_dict(self) -> dict:
        out = {
            "alpha": f"{self.alpha.numerator}/{self.alpha.denominator}",
            "beta_bits": self.beta_bits,
            "gamma_bits": self.gamma_bits,
            "per_set": self.per_set,
            "exact_zero_flags": self.exact_zero_flags,
            "rates": {k: str(v) for k, v in self.rates.items()},
        }
        if self.gamma_bits is None:
            del out["gamma_bits"]
        return out


def _grouped_ml_error(groups: np.ndarray, truth: np.ndarray, obs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-group (wrong guesses, total) of the ML guess of `truth` from `obs`."""
    ng = int(groups.max()) + 1
    nt = int(truth.max()) + 1
    no = int(obs.max()) + 1
    code = (groups * no + obs) * nt + truth
    uniq, cnt = np.unique(code, return_counts=True)
    go = uniq // nt
    starts = np.flatnonzero(np.r_[True, go[1:] != go[:-1]])
    best = np.maximum.reduceat(cnt, starts)
    g_of = go[starts] // no
    correct = np.bincount(g_of, weights=best, minlength=ng).astype(np.int64)
    total = np.bincount(groups, minlength=ng)
    return total - correct, total


# --- SPIR ------------------------------------------------------------------

class _LinearEnumeration:
    """All (r, k, M, W) states of a projected linear protocol, as arrays."""

    def __init__(self, p: ProjectedLinearSpir):
        q, x, y, f = p.q, p.x, p.y, p.f
        self.p = p
        ms = gf.all_vectors(q, f * x)
        ws = gf.all_vectors(q, y)
        rs = gf.all_vectors(q, y * f * x).reshape(-1, y, f * x)
        self.n_r, self.n_mw = len(rs), len(ms) * len(ws)
        mi, wi = np.meshgrid(np.arange(len(ms)), np.arange(len(ws)), indexing="ij")
        self.m = ms[mi.ravel()]  # (nMW, f·x)
        w = ws[wi.ravel()]
        h, j = p.h.array, p.j.array
        t = (w @ h.T) % q  # (nMW, z)
        hr = np.einsum("zy,ryc->rzc", h, rs) % q  # (nR, z, f·x)
        je = np.stack([(j @ _selector(x, f, k)) % q for k in range(1, f + 1)])  # (f, z, f·x)
        self.queries = (je[None, :, :, :] + hr[:, None, :, :]) % q  # (nR, f, z, f·x)
        self.answers = (np.einsum("rkzc,mc->rkmz", self.queries, self.m) + t[None, None]) % q
        # group label g = r·f + (k-1) for every (r, k, mw) cell
        self.groups = np.repeat(np.arange(self.n_r * f), self.n_mw)

    def file_block(self, k: int) -> np.ndarray:
        x = self.p.x
        return self.m[:, (k - 1) * x:k * x]


def _selector(x: int, f: int, k: int) -> np.ndarray:
    e = np.zeros((x, f * x), dtype=np.int64)
    e[:, (k - 1) * x:k * x] = np.eye(x, dtype=np.int64)
    return e


def _audit_projected(p: ProjectedLinearSpir, access: AccessStructure) -> AuditReport:
    en = _LinearEnumeration(p)
    f = p.f
    cells = en.n_r * f * en.n_mw
    flat_answers = en.answers.reshape(cells, p.z)
    groups = en.groups

    # target-file labels per cell: block k of M, with k varying by group
    target = np.concatenate(
        [row_codes(en.file_block(k)) for k in range(1, f + 1)]
    )  # (f·nMW,) indexed by (k, mw)
    target = np.tile(target, en.n_r)
    others = np.concatenate(
        [row_codes(np.delete(en.m, np.s_[(k - 1) * p.x:k * p.x], axis=1)) for k in range(1, f + 1)]
    )
    others = np.tile(others, en.n_r)

    per_auth = {}
    alpha = Fraction(0)
    for a in access.min_authorized:
        cols = list(rows_of(p.tau, a))
        wrong, total = _grouped_ml_error(groups, target, row_codes(flat_answers[:, cols]))
        worst = max(Fraction(int(w), int(t)) for w, t in zip(wrong, total))
        per_auth[_fmt(a)] = str(worst)
        alpha = max(alpha, worst)

    beta_mi, beta_zero = grouped_mutual_information(groups, row_codes(flat_answers), others)
    beta = float(beta_mi.max())

    per_forb = {}
    gamma, gamma_zero = 0.0, True
    ks = np.tile(np.arange(f), en.n_r)
    for b in access.max_forbidden:
        rows = list(rows_of(p.tau, b))
        qb = en.queries[:, :, rows, :].reshape(en.n_r * f, -1)
        mi, zero = grouped_mutual_information(np.zeros(len(ks), dtype=np.int64), ks, row_codes(qb))
        per_forb[_fmt(b)] = float(mi[0])
        gamma = max(gamma, float(mi[0]))
        gamma_zero = gamma_zero and bool(zero[0])

    return AuditReport(
        alpha=alpha,
        beta_bits=beta,
        gamma_bits=gamma,
        per_set={"authorized_alpha": per_auth, "forbidden_gamma_bits": per_forb},
        exact_zero_flags={
            "alpha": alpha == 0,
            "beta": bool(beta_zero.all()),
            "gamma": gamma_zero,
        },
        rates={"pir": p.rate, "shared_randomness": p.randomness_rate},
    )


def _audit_generic(g: GenericSpir, access: AccessStructure, rates: dict) -> AuditReport:
    order = {m: i for i, m in enumerate(g.messages)}
    all_files = list(itertools.product(g.messages, repeat=g.f))
    alpha = Fraction(0)
    per_auth = {_fmt(a): Fraction(0) for a in access.min_authorized}
    beta, beta_zero = 0.0, True
    for r in g.user_randomness:
        for k in range(1, g.f + 1):
            outs = [(files, g.answers(k, r, files, w)) for files in all_files for w in g.seeds]
            for a in access.min_authorized:
                idx = sorted(a)
                err = ml_error(((fs[k - 1], tuple(d[j - 1] for j in idx)) for fs, d in outs), order)
                per_auth[_fmt(a)] = max(per_auth[_fmt(a)], err)
                alpha = max(alpha, err)
            pmf = JointPmf.uniform_over(
                ("D", "M_other"), ((d, fs[:k - 1] + fs[k:]) for fs, d in outs)
            )
            beta_zero = beta_zero and pmf.independent(["D"], ["M_other"])
            beta = max(beta, pmf.mutual_information(["D"], ["M_other"]))

    per_forb = {}
    gamma, gamma_zero = 0.0, True
    views = [(k, g.query(k, r)) for k in range(1, g.f + 1) for r in g.user_randomness]
    for b in access.max_forbidden:
        idx = sorted(b)
        pmf = JointPmf.uniform_over(("K", "QB"), ((k, tuple(qs[j - 1] for j in idx)) for k, qs in views))
        mi = pmf.mutual_information(["K"], ["QB"])
        per_forb[_fmt(b)] = mi
        gamma = max(gamma, mi)
        gamma_zero = gamma_zero and pmf.independent(["K"], ["QB"])

    return AuditReport(
        alpha=alpha,
        beta_bits=beta,
        gamma_bits=gamma,
        per_set={
            "authorized_alpha": {k: str(v) for k, v in per_auth.items()},
            "forbidden_gamma_bits": per_forb,
        },
        exact_zero_flags={"alpha": alpha == 0, "beta": beta_zero, "gamma": gamma_zero},
        rates=rates,
    )


def audit_spir(p, access: AccessStructure, budget: int | None = None, *, method: str = "auto") -> AuditReport:
    """Exact (alpha, beta, gamma) of a SPIR protocol.

    Projected linear protocols use a vectorized enumeration by default;
    ``method="generic"`` forces the dictionary-based route that any
    GenericSpir takes (useful as an independent cross-check).
    """
    if p.n != access.n:
        raise ProtocolError(f"protocol has n={p.n}, access structure has n={access.n}")
    if isinstance(p, GenericSpir):
        _check_budget(p.state_count(), budget)
        return _audit_generic(p, access, {})
    q = p.q
    states = q ** (p.f * p.x + p.y + p.randomness_shape[0] * p.randomness_shape[1]) * p.f
    _check_budget(states, budget)
    if method == "auto" and isinstance(p, ProjectedLinearSpir):
        return _audit_projected(p, access)
    if method not in ("auto", "generic"):
        raise ValueError(f"unknown audit method {method!r}")
    rates = {"pir": p.rate, "shared_randomness": Fraction(p.y, p.x)}
    return _audit_generic(as_generic(p), access, rates)


# --- NSS -------------------------------------------------------------------

def audit_nss(p: LinearNss, access: AccessStructure, budget: int | None = None) -> AuditReport:
    if p.n != access.n:
        raise ProtocolError(f"scheme has n={p.n}, access structure has n={access.n}")
    _check_budget(p.q ** (p.x + p.y), budget)
    lr = gf.all_vectors(p.q, p.x + p.y)
    zs = (lr @ p.encoder.array.T) % p.q
    secret = row_codes(lr[:, :p.x])
    single = np.zeros(len(lr), dtype=np.int64)

    per_auth = {}
    alpha = Fraction(0)
    for a in access.min_authorized:
        wrong, total = _grouped_ml_error(single, secret, row_codes(zs[:, list(rows_of(p.tau, a))]))
        err = Fraction(int(wrong[0]), int(total[0]))
        per_auth[_fmt(a)] = str(err)
        alpha = max(alpha, err)

    per_forb = {}
    beta, beta_zero = 0.0, True
    for b in access.max_forbidden:
        mi, zero = grouped_mutual_information(single, secret, row_codes(zs[:, list(rows_of(p.tau, b))]))
        per_forb[_fmt(b)] = float(mi[0])
        beta = max(beta, float(mi[0]))
        beta_zero = beta_zero and bool(zero[0])

    return AuditReport(
        alpha=alpha,
        beta_bits=beta,
        per_set={"authorized_alpha": per_auth, "forbidden_beta_bits": per_forb},
        exact_zero_flags={"alpha": alpha == 0, "beta": beta_zero},
        rates={"ss": Fraction(p.x, p.z), "randomness": Fraction(p.y, p.x)},
    )


# --- bound formula -----------------------------------------------------------

@dataclass(frozen=True)
class XiBound:
    """Value of the leakage bound and its five addends (bits)."""

    value: float
    addends: dict
    alpha_zero: bool = False
    h2_clamped: bool = False


def xi_bound(alpha, beta, gamma, m: int, f: int) -> XiBound:
    """2β + (1-α+4√(2γf))·log m + 2·h2(√(2γf)) + h2(1-α) + log α, in bits.

    At α = 0 the last addend is -inf and `alpha_zero` is set. If √(2γf) > 1
    the h2 argument is clamped to 1 and `h2_clamped` is set; the log m
    addend always uses the unclamped root.
    """
    alpha, beta, gamma = float(alpha), float(beta), float(gamma)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha={alpha} outside [0, 1]")
    if beta < 0 or gamma < 0:
        raise ValueError("beta and gamma must be nonnegative")
    if m < 1 or f < 1:
        raise ValueError("message-space size and file count must be >= 1")
    root = math.sqrt(2.0 * gamma * f)
    clamped = root > 1.0
    addends = {
        "two_beta": 2.0 * beta,
        "message_term": (1.0 - alpha + 4.0 * root) * math.log2(m),
        "index_entropy_term": 2.0 * binary_entropy(min(root, 1.0)),
        "decoding_entropy_term": binary_entropy(1.0 - alpha),
        "log_alpha": math.log2(alpha) if alpha > 0 else -math.inf,
    }
    return XiBound(sum(addends.values()), addends, alpha == 0.0, clamped)


# --- structural checks ----------------------------------------------------

def check_lemma1(p, access: AccessStructure, budget: int | None = None) -> bool:
    """I(M; D_B | K=k, R=r) == 0 for every maximal forbidden B, k and r.

    Guaranteed for completely secure protocols; a leaky protocol makes it
    fail, which is how it is exercised.
    """
    if isinstance(p, ProjectedLinearSpir):
        _check_budget(p.q ** (p.f * p.x + p.y + p.y * p.f * p.x) * p.f, budget)
        en = _LinearEnumeration(p)
        flat = en.answers.reshape(-1, p.z)
        files = np.tile(row_codes(en.m), en.n_r * p.f)
        for b in access.max_forbidden:
            _, zero = grouped_mutual_information(en.groups, files, row_codes(flat[:, list(rows_of(p.tau, b))]))
            if not zero.all():
                return False
        return True
    g = p if isinstance(p, GenericSpir) else as_generic(p)
    _check_budget(g.state_count(), budget)
    all_files = list(itertools.product(g.messages, repeat=g.f))
    for r in g.user_randomness:
        for k in range(1, g.f + 1):
            outs = [(fs, g.answers(k, r, fs, w)) for fs in all_files for w in g.seeds]
            for b in access.max_forbidden:
                idx = sorted(b)
                pmf = JointPmf.uniform_over(("M", "DB"), ((fs, tuple(d[j - 1] for j in idx)) for fs, d in outs))
                if not pmf.independent(["M"], ["DB"]):
                    return False
    return True


def uniform_image_entropy(a: FieldMatrix) -> float:
    """H(a·X) in bits for X uniform on F_q^cols, by enumeration."""
    xs = gf.all_vectors(a.q, a.cols)
    counts = np.unique(row_codes((xs @ a.array.T) % a.q), return_counts=True)[1]
    return -float(np.sum(counts / len(xs) * np.log2(counts / len(xs))))


def check_prop2(a: FieldMatrix, trials: int = 10, seed: int = 0, budget: int | None = None) -> bool:
    """H(aX) == rank(a)·log2 q for uniform X, and <= for random non-uniform X.

    The equality is decided exactly: the image of a uniform X must consist
    of q^rank equally likely values.
    """
    _check_budget(a.q ** a.cols, budget)
    xs = gf.all_vectors(a.q, a.cols)
    labels = row_codes((xs @ a.array.T) % a.q)
    counts = np.bincount(labels)
    rk = gf.rank(a)
    if len(counts) != a.q**rk or counts.min() != counts.max():
        return False
    cap = rk * math.log2(a.q)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        weights = rng.integers(0, 10, size=len(xs))
        if weights.sum() == 0:
            weights[0] = 1
        pmf = np.bincount(labels, weights=weights) / weights.sum()
        h = -float(np.sum(pmf[pmf > 0] * np.log2(pmf[pmf > 0])))
        if h > cap + 1e-9:
            return False
    return True


def lemma3_witness(m: Mmsp, access: AccessStructure, budget: int | None = None):
    """First (B, secret) whose share distribution on B differs from secret 0, else None.

    Shares are Z_B = G_B·(secret; Y) with Y uniform on F_q^y.
    """
    _check_budget(m.q ** (m.x + m.y) * max(1, len(access.max_forbidden)), budget)
    ys = gf.all_vectors(m.q, m.y)
    secrets = gf.all_vectors(m.q, m.x)
    for b in access.max_forbidden:
        gb = m.g.select_rows(m.rows_for(b)).array
        reference = None
        for s in secrets:
            lr = np.hstack([np.tile(s, (len(ys), 1)), ys])
            dist = Counter(map(tuple, ((lr @ gb.T) % m.q).tolist()))
            if reference is None:
                reference = dist
            elif dist != reference:
                return b, tuple(int(e) for e in s)
    return None


def check_lemma3(m: Mmsp, access: AccessStructure, budget: int | None = None) -> bool:
    return lemma3_witness(m, access, budget) is None
