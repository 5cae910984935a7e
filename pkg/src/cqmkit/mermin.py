"""Generalised Mermin-type arguments over a finite abelian group K.

The system reads  sum_r n_r^s y_r = a^s  (s = 1..S).  Padding adds y_0 with
n_0^s = N - sum_r n_r^s and a control row n_0 = N, a = 0.  Party j in the
s-th block measures choice m_j^s (zeros first, then ones, ...) and the N
variations rotate that block cyclically.
"""
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .abgroup import EquationSystem, FinAbGroup, char_eval, solve_in_torus, solve_system, torus_holds
from .contextuality import (EmpiricalModel, Equation, Scenario, avn_check, expand_mixture,
                            tables_equal)
from .semiring import parse_theory, phase


class BadN(ValueError):
    pass


class Unsolvable(ValueError):
    pass


class NotRealizable(ValueError):
    pass


class TooLarge(ValueError):
    pass


@dataclass
class MerminArgument:
    K: FinAbGroup
    system: EquationSystem
    beta: list  # per variable: {g in K: Fraction mod 1}
    N: int

    @property
    def M(self):
        return self.system.n_vars

    @property
    def S(self):
        return len(self.system.rows)

    def padded(self):
        """Rows (n_0, n_1, ..., n_M; a) including the control row first."""
        rows = [((self.N,) + (0,) * self.M, self.K.zero())]
        for coeffs, a in self.system.rows:
            rows.append(((self.N - sum(coeffs),) + tuple(coeffs), a))
        return rows

    def beta_padded(self):
        return [{g: Fraction(0) for g in self.K.elements()}] + self.beta

    def to_json(self):
        return {"group": str(self.K), "N": self.N,
                "system": [{"coeffs": list(c), "rhs": list(a)} for c, a in self.system.rows],
                "beta": [{",".join(map(str, g)): str(v) for g, v in b.items()} for b in self.beta]}


def default_N(K, system):
    N = max([sum(c) for c, _ in system.rows] + [1])
    while math.gcd(N, K.exponent) != 1:
        N += 1
    return N


def build_argument(K, system, N=None, theory=None):
    K = FinAbGroup.parse(K)
    for c, _ in system.rows:
        if any(x < 0 for x in c):
            raise ValueError("coefficients count parties and must be >= 0")
    if N is None:
        N = default_N(K, system)
    if math.gcd(N, K.exponent) != 1:
        raise BadN(f"gcd(N={N}, exp K={K.exponent}) != 1")
    need = max([sum(c) for c, _ in system.rows] + [0])
    if N < need:
        raise BadN(f"N={N} < {need} parties needed")
    beta = solve_in_torus(system, K)
    if beta is None:
        raise Unsolvable("system has no solution in the phase torus")
    assert torus_holds(system, K, beta)
    arg = MerminArgument(K, system, beta, N)
    if theory is not None:
        realize_phases(arg, theory)
    return arg


def realize_phases(arg, theory):
    """beta embedded as theory phases: list over padded variables of amplitude payload arrays."""
    t = parse_theory(theory)
    out = []
    for r, b in enumerate(arg.beta_padded()):
        amps = t.zeros((arg.K.order,))
        for g in arg.K.elements():
            p = phase(t, b[g])
            if p is None:
                raise NotRealizable(f"{t.name} has no phase {b[g]} (variable {r})")
            amps[arg.K.index(g)] = p.v
        out.append(amps)
    return out


def block(counts, N):
    """m_j = largest m with j >= sum_{r<m} n_r."""
    out = []
    for j in range(N):
        m, acc = 0, 0
        for r, n in enumerate(counts):
            if j >= acc:
                m = r
            acc += n
        out.append(m)
    return out


def contexts(arg):
    """Control first, then s-major, rotation-minor."""
    N = arg.N
    out = [(0,) * N]
    for counts, _ in arg.padded()[1:]:
        m = block(counts, N)
        for k in range(N):
            out.append(tuple(m[(j + k) % N] for j in range(N)))
    return out


def context_rhs(arg):
    rhs = [arg.K.zero()]
    for _, a in arg.padded()[1:]:
        rhs += [a] * arg.N
    return rhs


def scenario(arg):
    return Scenario(arg.N, [arg.M + 1] * arg.N, arg.K, contexts(arg), strict=False)


def _coset(K, N, a):
    """All N-tuples over K summing to a (first N-1 free)."""
    els = K.elements()
    out = []
    for head in itertools.product(els, repeat=N - 1):
        out.append(head + (K.sub(a, K.sum(head)),))
    return out


def analytic_model(arg):
    K, N = arg.K, arg.N
    w = Fraction(1, K.order ** (N - 1))
    tables = []
    cache = {}
    for a in context_rhs(arg):
        if a not in cache:
            cache[a] = {o: w for o in _coset(K, N, a)}
        tables.append(dict(cache[a]))
    return EmpiricalModel(scenario(arg), tables)


def _ghz_payload(t, d, N):
    psi = t.zeros((d ** N, 1))
    stride = sum(d ** k for k in range(N))
    for g in range(d):
        psi[g * stride, 0] = t.ones()
    return psi


def quantum_model(arg, theory="complex", limit=4096):
    """GHZ state, per-party phase gates, character-basis measurement, Born rule."""
    from .frobenius import classical_states_of_group_structure, coherent_group
    from .matcat import Mat, apply_local, dagger
    t = parse_theory(theory)
    K, N = arg.K, arg.N
    d = K.order
    if d ** N > limit:
        raise TooLarge(f"|K|^N = {d ** N} > {limit}")
    amps = realize_phases(arg, t)
    cg = coherent_group(t, K)
    chars = classical_states_of_group_structure(cg)
    C = Mat(t, np.concatenate([dagger(c).data for c in chars], axis=0))
    ghz = Mat(t, _ghz_payload(t, d, N))
    inv = t.invert(t.from_int(d ** (N + 1)))
    dims = (d,) * N
    outcomes = list(itertools.product(K.elements(), repeat=N))
    tables = []
    for ctx in contexts(arg):
        psi = ghz
        for j, m in enumerate(ctx):
            gate = Mat(t, _diag(t, amps[m]))
            psi = apply_local(C @ gate, psi, dims, j)
        a = psi.data[:, 0]
        w = t.mul(t.mul(t.involve(a), a), inv)
        if t.is_float:
            tab = {o: t.to_float(w[i]) for i, o in enumerate(outcomes)}
        else:
            from .semiring import Scalar
            tab = {o: Scalar(t, w[i]) for i, o in enumerate(outcomes)}
        tables.append(tab)
    return EmpiricalModel(scenario(arg), tables)


def _diag(t, amps):
    d = amps.shape[0]
    out = t.zeros((d, d))
    for i in range(d):
        out[i, i] = amps[i]
    return out


def compare_models(qm, am, theory="complex", tol=1e-9):
    """Max deviation (float theories) or exact agreement of quantum vs analytic tables."""
    from .semiring import Scalar
    t = parse_theory(theory)
    worst, ok = 0.0, True
    for tq, ta in zip(qm.tables, am.tables):
        for o, w in tq.items():
            exact = ta.get(o, Fraction(0))
            if t.is_float:
                dev = abs(w - float(exact))
                worst = max(worst, dev)
                ok &= dev <= tol
            else:
                ok &= w == Scalar.of(t, exact)
    return ok, worst


def lhv_mixture(arg, b):
    """Uniform hidden g on {sum g = 0}; party j answers g_j + b_{m_j} (b_0 = 0)."""
    K, N = arg.K, arg.N
    bb = [K.zero()] + [tuple(x) for x in b]
    sc = scenario(arg)
    variables = sc.variables()
    H0 = _coset(K, N, K.zero())
    w = Fraction(1, len(H0))
    mix = {}
    for g in H0:
        lam = tuple(((j, m), K.add(g[j], bb[m])) for j, m in variables)
        mix[lam] = mix.get(lam, 0) + w
    return mix


def decide_contextual(arg):
    sol = solve_system(arg.system, arg.K)
    if sol is None:
        return {"contextual": True, "solution": None, "lhv_verified": None}
    mix = lhv_mixture(arg, sol)
    am = analytic_model(arg)
    ok = tables_equal(expand_mixture(am.scenario, mix), am.tables)
    return {"contextual": False, "solution": [list(x) for x in sol], "lhv_verified": bool(ok),
            "lhv": mix}


def avn_equations(arg):
    """Control sum s = 0 and the N.S variation equations sum s = a^s."""
    return [Equation(c, (1,) * arg.N, a) for c, a in enumerate(context_rhs(arg))]


def avn_certificate(arg, em=None):
    em = analytic_model(arg) if em is None else em
    return avn_check(em, avn_equations(arg))


def argument_from_spec(spec):
    """{group: "Z4", system: [{coeffs: [2], rhs: 1}], N: 5, theory: "complex"}."""
    if isinstance(spec, str):
        spec = json.loads(spec)
    K = FinAbGroup.parse(spec["group"])
    rows = []
    n_vars = max(len(r["coeffs"]) for r in spec["system"])
    for r in spec["system"]:
        coeffs = list(r["coeffs"]) + [0] * (n_vars - len(r["coeffs"]))
        rhs = r["rhs"]
        rhs = (rhs,) if isinstance(rhs, int) else tuple(rhs)
        rows.append((coeffs, K.reduce(rhs)))
    system = EquationSystem(n_vars, tuple(rows))
    return build_argument(K, system, spec.get("N"), spec.get("theory")), spec.get("theory", "complex")


def simple(d, t, N=None, theory=None):
    """K = Z_d with the single equation t y = 1."""
    K = FinAbGroup((d,))
    return build_argument(K, EquationSystem.single(K, [t], 1), N, theory)
