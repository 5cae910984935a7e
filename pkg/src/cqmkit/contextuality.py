"""Measurement scenarios, empirical models and contextuality checks.

Outcomes are tuples of K elements (one per party).  Weights are Fractions
when exact, floats otherwise.
"""
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .abgroup import FinAbGroup


class TooLarge(ValueError):
    pass


class NoSolution(ValueError):
    pass


class InvalidTheory(ValueError):
    pass


ASSIGNMENT_CAP = 10 ** 6


@dataclass
class Scenario:
    parties: int
    choices: list  # number of measurement choices per party
    K: FinAbGroup
    contexts: list  # joint choices (m_1, ..., m_N)

    strict: bool = True  # require every measurement to appear in some context

    def __post_init__(self):
        self.contexts = [tuple(c) for c in self.contexts]
        covered = {(j, m) for c in self.contexts for j, m in enumerate(c)}
        self._vars = sorted(covered)
        if self.strict:
            for j in range(self.parties):
                for m in range(self.choices[j]):
                    if (j, m) not in covered:
                        raise ValueError(f"measurement {(j, m)} appears in no context")

    def variables(self):
        """Measurements (party, choice) that occur in some context."""
        return list(self._vars)

    def n_assignments(self):
        return self.K.order ** len(self.variables())


@dataclass
class EmpiricalModel:
    scenario: Scenario
    tables: list  # per context: {outcome tuple: weight}

    def support(self, c, tol=1e-12):
        return [o for o, w in self.tables[c].items() if abs(w) > tol]

    def is_exact(self):
        return all(isinstance(w, (int, Fraction)) for t in self.tables for w in t.values())

    # JSON: outcomes as comma-joined element indices
    def to_json(self):
        sc, K = self.scenario, self.scenario.K
        tables = {}
        for i, tab in enumerate(self.tables):
            tables[str(i)] = {",".join(str(K.index(g)) for g in o): str(w)
                              for o, w in sorted(tab.items())}
        return {"parties": sc.parties, "choices": list(sc.choices), "outcome_group": str(K),
                "contexts": [list(c) for c in sc.contexts], "tables": tables}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        K = FinAbGroup.parse(obj["outcome_group"])
        sc = Scenario(int(obj["parties"]), list(obj["choices"]), K, obj["contexts"])
        tables = []
        for i in range(len(sc.contexts)):
            raw = obj["tables"].get(str(i), {})
            tab = {}
            for key, w in raw.items():
                o = tuple(K.element(int(x)) for x in key.split(","))
                tab[o] = _parse_weight(w)
            tables.append(tab)
        return cls(sc, tables)


def _parse_weight(w):
    if isinstance(w, (int, float)):
        return Fraction(w) if isinstance(w, int) else w
    try:
        return Fraction(w)
    except ValueError:
        return float(w)


def _close(a, b, tol):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= tol


def marginal(table, parties):
    out = {}
    for o, w in table.items():
        key = tuple(o[j] for j in parties)
        out[key] = out.get(key, 0) + w
    return out


def check_no_signalling(em, tol=1e-9):
    """Compare marginals on the parties where two contexts agree."""
    sc = em.scenario
    violations = []
    for a, b in itertools.combinations(range(len(sc.contexts)), 2):
        Ca, Cb = sc.contexts[a], sc.contexts[b]
        common = [j for j in range(sc.parties) if Ca[j] == Cb[j]]
        if not common:
            continue
        ma, mb = marginal(em.tables[a], common), marginal(em.tables[b], common)
        for key in set(ma) | set(mb):
            if not _close(ma.get(key, 0), mb.get(key, 0), tol):
                violations.append({"contexts": [a, b], "parties": common,
                                   "outcome": [list(g) for g in key],
                                   "weights": [str(ma.get(key, 0)), str(mb.get(key, 0))]})
    return {"ok": not violations, "violations": violations}


def table_sums(em, tol=1e-9):
    return all(_close(sum(t.values()), Fraction(1) if em.is_exact() else 1.0, tol) for t in em.tables)


# deterministic global assignments

def _assignments(sc):
    if sc.n_assignments() > ASSIGNMENT_CAP:
        raise TooLarge(f"{sc.n_assignments()} global assignments exceed {ASSIGNMENT_CAP}")
    return list(itertools.product(sc.K.elements(), repeat=len(sc.variables())))


def _restrict(sc, var_index, lam, c):
    return tuple(lam[var_index[(j, m)]] for j, m in enumerate(sc.contexts[c]))


def _incidence(em):
    """Rows (context, outcome) x columns (global assignment)."""
    from scipy.sparse import coo_matrix
    sc = em.scenario
    var_index = {v: i for i, v in enumerate(sc.variables())}
    lams = _assignments(sc)
    row_of = {}
    b = []
    for c, tab in enumerate(em.tables):
        for o in itertools.product(sc.K.elements(), repeat=sc.parties):
            row_of[(c, o)] = len(b)
            b.append(tab.get(o, 0))
    rows, cols = [], []
    for i, lam in enumerate(lams):
        for c in range(len(sc.contexts)):
            rows.append(row_of[(c, _restrict(sc, var_index, lam, c))])
            cols.append(i)
    A = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(b), len(lams))).tocsr()
    return A, b, lams


def _exact_solve(A, b, cols):
    """Fraction solution of A[:, cols] y = b (free variables set to 0), or None."""
    M = [[Fraction(int(v)) for v in row] for row in A[:, cols].toarray()]
    rhs = [Fraction(x) for x in b]
    n, m = len(M), len(cols)
    aug = [M[i] + [rhs[i]] for i in range(n)]
    piv_cols, r = [], 0
    for c in range(m):
        p = next((i for i in range(r, n) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    if any(aug[i][m] != 0 for i in range(r, n)):
        return None
    y = [Fraction(0)] * m
    for i, c in enumerate(piv_cols):
        y[c] = aug[i][m]
    return y


def probabilistic_lhv(em, tol=1e-7):
    """Mixture {assignment: weight} reproducing every table, or None."""
    from scipy.optimize import linprog
    sc = em.scenario
    A, b, lams = _incidence(em)
    bf = np.array([float(x) for x in b])
    res = linprog(np.zeros(len(lams)), A_eq=A, b_eq=bf, bounds=(0, None), method="highs")
    if res.status == 2:
        return None
    if res.status != 0:
        raise RuntimeError(f"LP failed: {res.message}")
    x = res.x
    if np.max(np.abs(A @ x - bf)) > tol:
        return None
    support = [i for i in range(len(lams)) if x[i] > tol]
    if em.is_exact():
        y = _exact_solve(A, b, support)
        if y is not None and all(v >= 0 for v in y):
            return {_named(sc, lams[i]): v for i, v in zip(support, y) if v != 0}
    return {_named(sc, lams[i]): float(x[i]) for i in support}


def _named(sc, lam):
    return tuple(zip(sc.variables(), lam))


def expand_mixture(sc, mixture):
    """Context tables generated by a mixture of global assignments."""
    tables = [dict() for _ in sc.contexts]
    for lam, w in mixture.items():
        val = dict(lam)
        for c, C in enumerate(sc.contexts):
            o = tuple(val[(j, m)] for j, m in enumerate(C))
            tables[c][o] = tables[c].get(o, 0) + w
    return tables


def tables_equal(t1, t2, tol=1e-9):
    for a, b in zip(t1, t2):
        for key in set(a) | set(b):
            if not _close(a.get(key, 0), b.get(key, 0), tol):
                return False
    return len(t1) == len(t2)


# possibilistic

def _backtrack(variables, domain, constraints):
    """First assignment (lexicographic over the given variable order) passing every check.

    constraints: list of (vars, check) where check(values dict) sees only
    assigned variables and returns False once the partial assignment is dead.
    """
    by_var = {v: [] for v in variables}
    for vs, check in constraints:
        for v in vs:
            by_var[v].append(check)
    val = {}

    def go(i):
        if i == len(variables):
            return True
        v = variables[i]
        for x in domain:
            val[v] = x
            if all(check(val) for check in by_var[v]) and go(i + 1):
                return True
        del val[v]
        return False

    return dict(val) if go(0) else None


def _order_variables(sc, groups):
    """Greedy order completing constraint groups (lists of variables) early."""
    order, done = [], set()
    pending = [set(g) for g in groups]
    while len(order) < len(sc.variables()):
        best = None
        for v in sc.variables():
            if v in done:
                continue
            # prefer the variable closing the most groups, then the fewest missing
            closes = sum(1 for g in pending if v in g and len(g - done) == 1)
            near = min((len(g - done) for g in pending if v in g), default=99)
            key = (-closes, near, v)
            if best is None or key < best[0]:
                best = (key, v)
        order.append(best[1])
        done.add(best[1])
    return order


def strong_contextuality_search(em):
    """Backtracking with projected supports; exhaustive, for small scenarios."""
    sc = em.scenario
    groups = [[(j, m) for j, m in enumerate(C)] for C in sc.contexts]
    order = _order_variables(sc, groups)
    pos = {v: i for i, v in enumerate(order)}
    cons = []
    for c, keys in enumerate(groups):
        supp = em.support(c)
        # projections onto each prefix of this context's variables in search order
        ranked = sorted(range(len(keys)), key=lambda j: pos[keys[j]])
        proj = {}
        for n in range(1, len(keys) + 1):
            parties = tuple(sorted(ranked[:n]))
            proj[parties] = {tuple(o[j] for j in parties) for o in supp}

        def check(val, keys=keys, proj=proj):
            parties = tuple(j for j, k in enumerate(keys) if k in val)
            return tuple(val[keys[j]] for j in parties) in proj[parties]
        cons.append((keys, check))
    sol = _backtrack(order, sc.K.elements(), cons)
    return sol is None, sol


def _encode(K, arr):
    """Mixed-radix integer codes for an array (..., N, rank) of K tuples."""
    code = np.zeros(arr.shape[:-2], dtype=np.int64)
    for j in range(arr.shape[-2]):
        for d, n in enumerate(K.orders):
            code = code * n + arr[..., j, d]
    return code


def coset_of(K, supp):
    """(o0, generators of L) if supp = o0 + L for a subgroup L of K^N, else None."""
    arr = np.array(supp, dtype=np.int64).reshape(len(supp), -1, K.rank)
    orders = np.array(K.orders)
    o0 = arr[0]
    diffs = (arr - o0) % orders
    target = set(_encode(K, diffs).tolist())
    span = np.zeros((1,) + o0.shape, dtype=np.int64)
    codes = {0}
    gens = []
    for dvec, code in zip(diffs, _encode(K, diffs).tolist()):
        if code in codes:
            continue
        gens.append(dvec)
        k = int(np.lcm.reduce((orders // np.gcd(dvec, orders)).ravel()))
        span = np.concatenate([(span + i * dvec) % orders for i in range(k)])
        span_codes = _encode(K, span)
        _, keep = np.unique(span_codes, return_index=True)
        span = span[np.sort(keep)]
        codes = set(span_codes.tolist())
        if len(codes) > len(target):
            return None
    if codes != target:
        return None
    return o0, gens


def strong_contextuality_linear(em):
    """Exact decision when every support is a coset, by Smith form over Z.

    Variables are the K coordinates of each (party, choice); context c asks
    restriction - o0 = sum_i w_i l_i componentwise modulo n_d.
    """
    sc, K = em.scenario, em.scenario.K
    variables = sc.variables()
    vidx = {v: i for i, v in enumerate(variables)}
    r = K.rank
    n_x = len(variables) * r
    rows, extra = [], 0
    structures = []
    for c, C in enumerate(sc.contexts):
        cos = coset_of(K, em.support(c))
        if cos is None:
            return None
        structures.append((C, cos))
        extra += len(cos[1])
    w_base = n_x
    for C, (o0, gens) in structures:
        for j, m in enumerate(C):
            for d, n in enumerate(K.orders):
                coeffs = {vidx[(j, m)] * r + d: 1}
                for i, gvec in enumerate(gens):
                    if gvec[j][d]:
                        coeffs[w_base + i] = -int(gvec[j][d])
                rows.append((coeffs, n, int(o0[j][d])))
        w_base += len(gens)
    from .abgroup import solve_congruences
    y = solve_congruences(n_x + extra, rows)
    if y is None:
        return True, None
    sol = {v: tuple(y[vidx[v] * r + d] % n for d, n in enumerate(K.orders)) for v in variables}
    return False, sol


def strong_contextuality(em, method="auto"):
    """(strongly contextual?, consistent global assignment or None)."""
    if method == "search" or (method == "auto" and em.scenario.n_assignments() <= 2 * ASSIGNMENT_CAP):
        return strong_contextuality_search(em)
    out = strong_contextuality_linear(em)
    if out is None:
        if method == "linear":
            raise ValueError("supports are not cosets")
        return strong_contextuality_search(em)
    return out


def signed_global_section(em, tol=1e-9):
    """Signed mixture over global assignments reproducing every table."""
    sc = em.scenario
    A, b, lams = _incidence(em)
    bf = np.array([float(x) for x in b])
    if A.shape[1] <= 20000:
        x, *_ = np.linalg.lstsq(A.toarray(), bf, rcond=None)
    else:
        from scipy.sparse.linalg import lsqr
        x = lsqr(A, bf, atol=1e-14, btol=1e-14, iter_lim=100000)[0]
    if np.max(np.abs(A @ x - bf)) > tol:
        raise NoSolution("no signed global section (model signals?)")
    return {_named(sc, lams[i]): float(x[i]) for i in range(len(lams)) if abs(x[i]) > 1e-15}


# All-vs-Nothing

@dataclass
class Equation:
    """sum_j coeffs[j] * o_j = rhs on the outcomes of context `context`."""
    context: int
    coeffs: tuple
    rhs: tuple

    def to_json(self):
        return {"context": self.context, "coeffs": list(self.coeffs), "rhs": list(self.rhs)}


def _eq_holds(K, eq, outcome):
    return K.sum(K.scale(c, g) for c, g in zip(eq.coeffs, outcome)) == K.reduce(eq.rhs)


def global_assignment(sc, equations, group, method="linear"):
    """Assignment (party, choice) -> group element satisfying every equation, or None.

    Coefficients are integers and right-hand sides are read in `group`.
    """
    if method == "search":
        return _global_assignment_search(sc, equations, group)
    from .abgroup import solve_congruences
    variables = sc.variables()
    vidx = {v: i for i, v in enumerate(variables)}
    r = group.rank
    rows = []
    for eq in equations:
        C = sc.contexts[eq.context]
        rhs = group.reduce(eq.rhs)
        for d, n in enumerate(group.orders):
            coeffs = {}
            for j, m in enumerate(C):
                if eq.coeffs[j]:
                    key = vidx[(j, m)] * r + d
                    coeffs[key] = coeffs.get(key, 0) + eq.coeffs[j]
            rows.append((coeffs, n, rhs[d]))
    y = solve_congruences(len(variables) * r, rows)
    if y is None:
        return None
    return {v: tuple(y[vidx[v] * r + d] % n for d, n in enumerate(group.orders)) for v in variables}


def _global_assignment_search(sc, equations, group):
    cons = []
    for eq in equations:
        C = sc.contexts[eq.context]
        keys = [(j, m) for j, m in enumerate(C) if eq.coeffs[j] % group.exponent]
        coeffs = [eq.coeffs[j] for j, _ in keys]
        rhs = group.reduce(eq.rhs)
        if not keys:
            # no variable to constrain: 0 = rhs decides on its own
            if rhs != group.zero():
                return None
            continue

        def check(val, keys=keys, coeffs=coeffs, rhs=rhs):
            if not all(k in val for k in keys):
                return True
            return group.sum(group.scale(c, val[k]) for c, k in zip(coeffs, keys)) == rhs
        cons.append((keys, check))
    return _backtrack(sc.variables(), group.elements(), cons)


def equations_hold(sc, equations, group, assignment):
    for eq in equations:
        vals = [assignment[(j, m)] for j, m in enumerate(sc.contexts[eq.context])]
        if group.sum(group.scale(c, g) for c, g in zip(eq.coeffs, vals)) != group.reduce(eq.rhs):
            return False
    return True


def avn_check(em, equations):
    """AvN when the equations hold on every support but admit no global solution."""
    sc, K = em.scenario, em.scenario.K
    for eq in equations:
        for o in em.support(eq.context):
            if not _eq_holds(K, eq, o):
                raise InvalidTheory(f"equation on context {eq.context} fails on outcome {o}")
    sol = global_assignment(sc, equations, K)
    return {"avn": sol is None, "assignment": sol,
            "equations": [e.to_json() for e in equations]}
