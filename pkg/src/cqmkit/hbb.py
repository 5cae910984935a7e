"""Quantum-classical secret sharing over a Mermin-type argument.

Parties 0..N'-1 are the players, N'..N-1 belong to the dealer.  Each round
draws a context uniformly from the valid ones, samples the joint outcome,
and is a test round with probability tau.  Secret rounds carry
c = p + g_dealer, decodable as (c + sum of player keys) - a^s.
"""
import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .abgroup import char_eval
from .contextuality import tables_equal
from .mermin import analytic_model, context_rhs, contexts, decide_contextual, quantum_model, realize_phases


class PreconditionFailed(ValueError):
    pass


class MissingContext(ValueError):
    pass


@dataclass
class ProtocolConfig:
    argument: object
    players: int
    tau: float = 0.5
    eps_max: float = 0.02
    rounds: int = 1000
    seed: int = 0

    def __post_init__(self):
        N = self.argument.N
        if not 2 <= self.players < N:
            raise ValueError(f"need 2 <= N' < N, got N'={self.players}, N={N}")
        if not 0 < self.tau < 1:
            raise ValueError("tau must lie in (0, 1)")


@dataclass
class Transcript:
    rounds: list
    counts: list  # per context: {outcome: count} over test rounds
    epsilon: float
    verdict: str
    decoded: list = field(default_factory=list)  # (round, plaintext) on secret rounds
    secret: list = field(default_factory=list)  # recovered only on success
    key_broadcast: bool = False
    notes: list = field(default_factory=list)

    def decode_rate(self):
        secret = [r for r in self.rounds if r["kind"] == "secret"]
        if not secret:
            return 1.0
        got = dict(self.decoded)
        return sum(got.get(r["round"]) == r["plaintext"] for r in secret) / len(secret)

    def summary(self):
        rate = self.decode_rate()
        dec = "ok" if rate == 1.0 else ("partial" if rate > 0 else "none")
        return f"verdict={self.verdict} eps={self.epsilon:.6f} decoded={dec}"

    def to_json(self):
        return {"rounds": self.rounds, "epsilon": self.epsilon, "verdict": self.verdict,
                "key_broadcast": self.key_broadcast, "notes": self.notes,
                "decoded": [[w, list(p)] for w, p in self.decoded],
                "secret": [list(q) for q in self.secret], "summary": self.summary()}


def round_rng(seed, w):
    """Independent per-round stream, so rounds can be computed in any order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(w,)))


def _sampler(table, outcomes):
    p = np.array([float(table.get(o, 0)) for o in outcomes])
    p = np.clip(p, 0, None)
    return np.cumsum(p / p.sum())


def _draw(cdf, rng):
    return int(min(np.searchsorted(cdf, rng.random(), side="right"), len(cdf) - 1))


def promised_support(arg):
    return [set(t) for t in analytic_model(arg).tables]


def noise_parameter(counts, arg, support=None):
    """1 - |K|^{N-1} min observed frequency over the promised support."""
    K, N = arg.K, arg.N
    support = promised_support(arg) if support is None else support
    worst = None
    for c, (tab, supp) in enumerate(zip(counts, support)):
        total = sum(tab.values())
        if total == 0:
            raise MissingContext(f"no observations for context {c}")
        m = min(Fraction(tab.get(o, 0), total) for o in supp)
        worst = m if worst is None else min(worst, m)
    return float(1 - K.order ** (N - 1) * worst)


def noise_from_tables(tables, arg, support=None):
    """Same formula for probability tables (no counting)."""
    K, N = arg.K, arg.N
    support = promised_support(arg) if support is None else support
    m = min(min(t.get(o, 0) for o in s) for t, s in zip(tables, support))
    return float(1 - K.order ** (N - 1) * m)


def _decode(arg, c, keys, a):
    K = arg.K
    return K.sub(K.add(c, K.sum(keys)), a)


def _run(cfg, device):
    """Shared protocol loop; device(w, ctx_index, rng) -> joint outcome (and extra info)."""
    arg = cfg.argument
    K, N, Np = arg.K, arg.N, cfg.players
    ctxs = contexts(arg)
    rhs = context_rhs(arg)
    els = K.elements()
    counts = [dict() for _ in ctxs]
    rounds = []
    for w in range(cfg.rounds):
        rng = round_rng(cfg.seed, w)
        c = int(rng.integers(len(ctxs)))
        g, extra = device(w, c, rng)
        kind = "test" if rng.random() < cfg.tau else "secret"
        q = els[int(rng.integers(len(els)))]
        k = els[int(rng.integers(len(els)))]
        rec = {"round": w, "context": c, "choices": list(ctxs[c]), "kind": kind,
               "outcomes": [list(x) for x in g]}
        rec.update(extra)
        if kind == "test":
            counts[c][g] = counts[c].get(g, 0) + 1
        else:
            p = K.add(q, k)
            dealer = K.sum(g[Np:])
            rec.update(secret=q, ephemeral=k, plaintext=p, ciphertext=K.add(p, dealer),
                       s=(c - 1) // N + 1 if c else 0, keys=g[:Np])
        rounds.append(rec)
    notes = []
    if cfg.rounds == 0:
        eps, verdict = 0.0, "success"
        notes.append("vacuous: no rounds")
    else:
        try:
            eps = noise_parameter(counts, arg)
        except MissingContext as e:
            eps = 1.0
            notes.append(str(e))
        verdict = "success" if eps <= cfg.eps_max else "failure"
    decoded = []
    for r in rounds:
        if r["kind"] == "secret":
            decoded.append((r["round"], _decode(arg, r["ciphertext"], r["keys"], rhs[r["context"]])))
    secret = []
    if verdict == "success":
        got = dict(decoded)
        secret = [K.sub(got[r["round"]], r["ephemeral"]) for r in rounds if r["kind"] == "secret"]
    for r in rounds:
        for key in ("secret", "ephemeral", "plaintext", "ciphertext"):
            if key in r:
                r[key] = list(r[key])
        if "keys" in r:
            r["keys"] = [list(x) for x in r["keys"]]
    return Transcript(rounds, counts, eps, verdict, [(w, list(p)) for w, p in decoded],
                      [list(q) for q in secret], verdict == "success", notes)


def run_honest(cfg):
    """Noiseless trusted devices: outcomes drawn from the simulated quantum tables."""
    arg = cfg.argument
    qm = quantum_model(arg, "complex")
    outcomes = list(qm.tables[0])
    cdfs = [_sampler(t, outcomes) for t in qm.tables]

    def device(w, c, rng):
        return outcomes[_draw(cdfs[c], rng)], {}

    return _run(cfg, device)


def decode_without(tr, arg, player):
    """Decode every secret round with one player's key withheld."""
    K = arg.K
    rhs = context_rhs(arg)
    out = []
    for r in tr.rounds:
        if r["kind"] == "secret":
            keys = [tuple(x) for i, x in enumerate(r["keys"]) if i != player]
            out.append(_decode(arg, tuple(r["ciphertext"]), keys, rhs[r["context"]]))
    return out


@dataclass
class EveKnowledge:
    keys_known: float
    plaintexts_known: float


def run_attack_noncontextual(cfg):
    """Separable uniform H_0 state plus b-shifted devices; Eve knows every h."""
    arg = cfg.argument
    dc = decide_contextual(arg)
    if dc["contextual"]:
        raise PreconditionFailed("the system has no solution in K: no classical attack")
    K, N = arg.K, arg.N
    b = [K.zero()] + [tuple(x) for x in dc["solution"]]
    ctxs = contexts(arg)
    els = K.elements()

    def device(w, c, rng):
        head = tuple(els[i] for i in rng.integers(len(els), size=N - 1))
        h = head + (K.neg(K.sum(head)),)
        g = tuple(K.add(h[j], b[m]) for j, m in enumerate(ctxs[c]))
        return g, {"eve_h": [list(x) for x in h]}

    tr = _run(cfg, device)
    # Eve recomputes keys from h and the broadcast choices, then decodes
    rhs = context_rhs(arg)
    keys_ok = plain_ok = n = 0
    for r in tr.rounds:
        if r["kind"] != "secret":
            continue
        n += 1
        h = [tuple(x) for x in r["eve_h"]]
        eve_keys = [K.add(h[j], b[m]) for j, m in enumerate(r["choices"][:cfg.players])]
        keys_ok += eve_keys == [tuple(x) for x in r["keys"]]
        p = _decode(arg, tuple(r["ciphertext"]), eve_keys, rhs[r["context"]])
        plain_ok += list(p) == r["plaintext"]
    eve = EveKnowledge(keys_ok / n if n else 1.0, plain_ok / n if n else 1.0)
    return tr, eve


def _char_matrix(K):
    els = K.elements()
    return np.array([[np.exp(-2j * np.pi * float(char_eval(K, k, g))) for g in els] for k in els])


def _context_dist(psi, gates, C, dims):
    """Born distribution of the character-basis measurement after per-party gates."""
    x = psi.reshape(dims)
    for j, G in enumerate(gates):
        x = np.moveaxis(np.tensordot(C @ G, x, axes=([1], [j])), 0, j)
    p = np.abs(x.ravel()) ** 2
    return p / p.sum()


def eavesdrop_intercept(cfg, rate, party=0):
    """On a fraction `rate` of rounds Eve measures one party in the character basis first."""
    arg = cfg.argument
    K, N = arg.K, arg.N
    d = K.order
    amps = [np.asarray(a, dtype=complex) for a in realize_phases(arg, "complex")]
    gates = [np.diag(a) for a in amps]
    C = _char_matrix(K) / np.sqrt(d)
    dims = (d,) * N
    psi = np.zeros(d ** N, dtype=complex)
    stride = sum(d ** k for k in range(N))
    psi[np.arange(d) * stride] = 1 / np.sqrt(d)
    ctxs = contexts(arg)
    outcomes = list(itertools.product(K.elements(), repeat=N))
    plain = [np.cumsum(_context_dist(psi, [gates[m] for m in ctx], C, dims)) for ctx in ctxs]
    # collapsed branches: project `party` onto each character state
    branches, weights = [], []
    for k in range(d):
        proj = np.outer(C[k].conj(), C[k])
        x = np.moveaxis(np.tensordot(proj, psi.reshape(dims), axes=([1], [party])), 0, party).ravel()
        weights.append(np.vdot(x, x).real)
        branches.append([np.cumsum(_context_dist(x, [gates[m] for m in ctx], C, dims)) for ctx in ctxs])
    wcdf = np.cumsum(np.array(weights) / sum(weights))

    def device(w, c, rng):
        if rng.random() < rate:
            k = _draw(wcdf, rng)
            return outcomes[_draw(branches[k][c], rng)], {"intercepted": True}
        return outcomes[_draw(plain[c], rng)], {"intercepted": False}

    return _run(cfg, device)


def attack_tables_match(tr, arg):
    """Pearson chi^2 per context against the promised uniform-on-support tables."""
    from scipy.stats import chisquare
    pvals = []
    for tab, supp in zip(tr.counts, promised_support(arg)):
        total = sum(tab.values())
        if total == 0:
            continue
        supp = sorted(supp)
        obs = [tab.get(o, 0) for o in supp]
        if sum(obs) != total:
            return False, 0.0
        pvals.append(chisquare(obs).pvalue)
    return True, min(pvals) if pvals else 1.0
