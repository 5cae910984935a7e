"""Classical structures, group algebras and their law checks.

A coherent group is the pair (Z, X): Z copies the basis |g>, X is the group
algebra |g>|h> -> |g+h>.  Every law is checked as a matrix identity.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .abgroup import FinAbGroup, char_eval
from .matcat import Mat, dagger, tensor, born_distribution
from .semiring import Scalar, parse_theory, phase


class NotRealizable(ValueError):
    pass


class NotEnoughPhases(ValueError):
    pass


class NotAPhase(ValueError):
    pass


@dataclass
class FrobeniusData:
    theory: object
    dim: int
    mult: Mat
    unit: Mat
    comult: Mat
    counit: Mat
    normalization: Scalar


@dataclass
class CoherentGroupData:
    point: FrobeniusData
    group: FrobeniusData
    underlying: FinAbGroup

    @property
    def theory(self):
        return self.point.theory

    @property
    def dim(self):
        return self.point.dim


def _frob(theory, mult, unit, norm):
    return FrobeniusData(theory, unit.rows, mult, unit, dagger(mult), dagger(unit), norm)


def classical_structure(theory, d):
    t = parse_theory(theory)
    copy = Mat.zeros(t, d * d, d)
    for i in range(d):
        copy.data[i * d + i, i] = t.ones()
    unit = Mat.from_ints(t, [[1]] * d)
    return _frob(t, dagger(copy), unit, Scalar.of(t, 1))


def group_structure(theory, G):
    t = parse_theory(theory)
    G = FinAbGroup.parse(G)
    n = G.order
    N = Scalar.of(t, n)
    if not t.is_invertible(N.v):
        raise NotRealizable(f"|G| = {n} is not invertible in {t.name}")
    mult = Mat.zeros(t, n, n * n)
    els = G.elements()
    for g in els:
        for h in els:
            mult.data[G.index(G.add(g, h)), G.index(g) * n + G.index(h)] = t.ones()
    return _frob(t, mult, Mat.basis(t, n, 0), N)


def coherent_group(theory, G):
    G = FinAbGroup.parse(G)
    return CoherentGroupData(classical_structure(theory, G.order), group_structure(theory, G), G)


def swap(theory, d):
    perm = [j * d + i for i in range(d) for j in range(d)]
    return Mat.permutation(theory, perm, d_in=d * d)


def _id(t, d):
    return Mat.identity(t, d)


def _law(report, name, lhs, rhs):
    r = lhs.residual(rhs)
    report[name] = {"ok": bool(lhs.equals(rhs)), "residual": float(r)}


def all_ok(report):
    return all(v["ok"] for v in report.values())


def verify_laws(F):
    t, d = F.theory, F.dim
    I = _id(t, d)
    m, u, c, e = F.mult, F.unit, F.comult, F.counit
    rep = {}
    _law(rep, "associativity", m @ tensor(m, I), m @ tensor(I, m))
    _law(rep, "unit", m @ tensor(u, I), I)
    rep["unit"]["ok"] &= (m @ tensor(I, u)).equals(I)
    _law(rep, "coassociativity", tensor(c, I) @ c, tensor(I, c) @ c)
    _law(rep, "counit", tensor(e, I) @ c, I)
    rep["counit"]["ok"] &= (tensor(I, e) @ c).equals(I)
    _law(rep, "frobenius", tensor(I, m) @ tensor(c, I), c @ m)
    rep["frobenius"]["ok"] &= (tensor(m, I) @ tensor(I, c)).equals(c @ m)
    _law(rep, "quasi_special", m @ c, I.scale(F.normalization))
    _law(rep, "commutative", m @ swap(t, d), m)
    _law(rep, "symmetric", e @ m @ swap(t, d), e @ m)
    return rep


def cap(F):
    return F.counit @ F.mult


def antipode(cg):
    """(cap_Z (x) id) (id (x) comult_X unit_X): sends |g> to |-g>."""
    Z, X = cg.point, cg.group
    t, d = cg.theory, cg.dim
    return tensor(cap(Z), _id(t, d)) @ tensor(_id(t, d), X.comult @ X.unit)


def verify_hopf(cg, report=None):
    Z, X = cg.point, cg.group
    t, d = cg.theory, cg.dim
    S = antipode(cg)
    rep = {} if report is None else report
    _law(rep, "hopf", X.mult @ tensor(S, _id(t, d)) @ Z.comult, X.unit @ Z.counit)
    _law(rep, "antipode_self_adjoint", dagger(S), S)
    _law(rep, "antipode_involution", S @ S, _id(t, d))
    return rep


def verify_strong_complementarity(cg):
    """X unit, antipode and multiplication are Z-classical (copied and deleted by Z)."""
    Z, X = cg.point, cg.group
    t, d = cg.theory, cg.dim
    S = antipode(cg)
    I = _id(t, d)
    mid = tensor(I, swap(t, d), I)
    rep = {}
    _law(rep, "copy_unit", Z.comult @ X.unit, tensor(X.unit, X.unit))
    _law(rep, "copy_antipode", Z.comult @ S, tensor(S, S) @ Z.comult)
    _law(rep, "bialgebra", Z.comult @ X.mult, tensor(X.mult, X.mult) @ mid @ tensor(Z.comult, Z.comult))
    _law(rep, "delete_unit", Z.counit @ X.unit, Mat.from_ints(t, [[1]]))
    _law(rep, "delete_antipode", Z.counit @ S, Z.counit)
    _law(rep, "delete_mult", Z.counit @ X.mult, tensor(Z.counit, Z.counit))
    verify_hopf(cg, rep)
    return rep


def full_report(cg):
    return {"point": verify_laws(cg.point), "group": verify_laws(cg.group),
            "strong_complementarity": verify_strong_complementarity(cg)}


# characters and phases

def character_state(cg, k):
    """|chi_k> = sum_g phase(k.g) |g>."""
    G, t = cg.underlying, cg.theory
    data = t.zeros((G.order, 1))
    for g in G.elements():
        p = phase(t, char_eval(G, k, g))
        if p is None:
            raise NotEnoughPhases(f"{t.name} lacks the phase {char_eval(G, k, g)}")
        data[G.index(g), 0] = p.v
    return Mat(t, data)


_CHAR_CACHE = {}


def classical_states_of_group_structure(cg, check=True):
    G, t = cg.underlying, cg.theory
    for n in G.orders:
        if phase(t, Fraction(1, n)) is None:
            raise NotEnoughPhases(f"{t.name} has no phase of order {n}")
    key = (t.name, G.orders)
    if key not in _CHAR_CACHE:
        _CHAR_CACHE[key] = [character_state(cg, k) for k in G.elements()]
    states = [Mat(t, c.data.copy()) for c in _CHAR_CACHE[key]]
    if check:
        X = cg.group
        S = antipode(cg)
        one = Mat.from_ints(t, [[1]])
        for i, chi in enumerate(states):
            assert (X.comult @ chi).equals(tensor(chi, chi)), "copy"
            assert (X.counit @ chi).equals(one), "delete"
            assert (S @ chi).equals(Mat(t, t.involve(chi.data))), "adjoin"
            for j, chi2 in enumerate(states):
                want = Scalar.of(t, G.order if i == j else 0)
                assert (dagger(chi) @ chi2)[0, 0] == want, "orthogonality"
    return states


@dataclass
class PhaseState:
    theory: object
    amplitudes: list

    def __post_init__(self):
        t = self.theory = parse_theory(self.theory)
        one = t.ones()
        for a in self.amplitudes:
            if not t.equal(t.mul(t.involve(a.v), a.v), one):
                raise NotAPhase(str(a))

    @classmethod
    def from_exponents(cls, theory, exps):
        """amplitude_g = phase(exps[g]) for rational exponents."""
        t = parse_theory(theory)
        amps = []
        for r in exps:
            p = phase(t, r)
            if p is None:
                raise NotEnoughPhases(f"{t.name} lacks the phase {r}")
            amps.append(p)
        return cls(t, amps)

    def column(self):
        return Mat.from_scalars(self.theory, [[a] for a in self.amplitudes])


def phase_gate(p):
    t = p.theory
    d = len(p.amplitudes)
    data = t.zeros((d, d))
    for i, a in enumerate(p.amplitudes):
        data[i, i] = a.v
    return Mat(t, data)


def ghz(cg, N):
    """sum_g |g>^N, the (N-1)-fold Z comultiplication of the Z unit."""
    Z = cg.point
    t, d = cg.theory, cg.dim
    state = Z.unit
    for k in range(1, N):
        # split the last factor
        state = tensor(_id(t, d ** (k - 1)), Z.comult) @ state
    return state


def ghz_with_phases(cg, N, phases):
    """Z-comultiply (N-1) times the pointwise product of the phase states."""
    Z = cg.point
    t, d = cg.theory, cg.dim
    prod = Z.unit
    for p in phases:
        prod = Z.mult @ tensor(prod, p.column())
    state = prod
    for k in range(1, N):
        state = tensor(_id(t, d ** (k - 1)), Z.comult) @ state
    return state


def ghz_with_gates(cg, N, phases):
    """Same state, applying one diagonal gate per party to the plain GHZ state."""
    gates = [phase_gate(p) for p in phases] + [_id(cg.theory, cg.dim)] * (N - len(phases))
    return tensor(*gates) @ ghz(cg, N)


def translation(cg, g):
    """U_g = m_X(|g> (x) -)."""
    G, t = cg.underlying, cg.theory
    return cg.group.mult @ tensor(Mat.basis(t, G.order, G.index(g)), _id(t, G.order))


def multiplication_by(cg, chi):
    """V_chi = m_Z(|chi> (x) -)."""
    return cg.point.mult @ tensor(chi, _id(cg.theory, cg.dim))


def verify_weyl_ccr(cg):
    G, t = cg.underlying, cg.theory
    states = classical_states_of_group_structure(cg, check=False)
    worst = 0.0
    ok = True
    for k, chi in zip(G.elements(), states):
        V = multiplication_by(cg, chi)
        for g in G.elements():
            U = translation(cg, g)
            c = phase(t, char_eval(G, k, g))
            lhs, rhs = V @ U, (U @ V).scale(c)
            worst = max(worst, lhs.residual(rhs))
            ok &= lhs.equals(rhs)
    return {"ok": bool(ok), "residual": float(worst)}


def verify_weak_uncertainty(cg):
    """Each character state is uniform in the point basis, and vice versa."""
    G, t = cg.underlying, cg.theory
    n = G.order
    chars = classical_states_of_group_structure(cg, check=False)
    points = [Mat.basis(t, n, i) for i in range(n)]
    N = Scalar.of(t, n)
    one = Scalar.of(t, 1)
    inv_n = Scalar(t, t.invert(N.v))
    ok = True
    for chi in chars:
        rho = (chi @ dagger(chi)).scale(inv_n)
        dist = born_distribution(rho, points, [one] * n)
        ok &= all(w == inv_n for w in dist.weights.values())
    for pt in points:
        dist = born_distribution(pt, chars, [N] * n)
        ok &= all(w == inv_n for w in dist.weights.values())
    return {"ok": bool(ok)}


def perturbed_group_structure(cg, r=Fraction(1, 8)):
    """Negative control: X conjugated by diag(phase(r g)), not a Z-classical relabelling."""
    G, t = cg.underlying, cg.theory
    amps = [phase(t, r * G.index(g)) for g in G.elements()]
    D = phase_gate(PhaseState(t, amps))
    X = cg.group
    m = D @ X.mult @ tensor(dagger(D), dagger(D))
    Xp = _frob(t, m, D @ X.unit, X.normalization)
    return CoherentGroupData(cg.point, Xp, G)
