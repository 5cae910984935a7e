"""Finite abelian groups prod Z_{n_d}, characters, quotients and equation solving.

Elements and characters are plain tuples of residues.  Characters use the
self-duality G ~ G^: the label k evaluates as  k.g = sum_d k_d g_d / n_d  mod 1.
"""
import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce


class InvalidSubgroup(ValueError):
    pass


class GroupMismatch(ValueError):
    pass


def _lcm(a, b):
    return a * b // math.gcd(a, b)


@dataclass(frozen=True)
class FinAbGroup:
    orders: tuple

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(n) for n in self.orders))
        if any(n < 1 for n in self.orders):
            raise ValueError("cyclic factor orders must be >= 1")

    @classmethod
    def parse(cls, s):
        """`Z2`, `Z2xZ4xZ3` (case-insensitive, spaces ignored)."""
        if isinstance(s, FinAbGroup):
            return s
        parts = re.sub(r"\s+", "", s).lower().split("x")
        orders = []
        for part in parts:
            m = re.fullmatch(r"z_?(\d+)(\^(\d+))?", part)
            if not m:
                raise ValueError(f"bad group spec {s!r}")
            orders += [int(m.group(1))] * int(m.group(3) or 1)
        return cls(tuple(orders))

    @property
    def order(self):
        return math.prod(self.orders)

    @property
    def exponent(self):
        return reduce(_lcm, self.orders, 1)

    @property
    def rank(self):
        return len(self.orders)

    def __len__(self):
        return self.order

    def __str__(self):
        return "x".join(f"Z{n}" for n in self.orders) or "Z1"

    def zero(self):
        return (0,) * self.rank

    def elements(self):
        """All elements, lexicographic (first coordinate most significant)."""
        return list(itertools.product(*(range(n) for n in self.orders)))

    def index(self, g):
        i = 0
        for gd, n in zip(g, self.orders):
            i = i * n + gd
        return i

    def element(self, i):
        out = []
        for n in reversed(self.orders):
            out.append(i % n)
            i //= n
        return tuple(reversed(out))

    def reduce(self, g):
        return tuple(int(x) % n for x, n in zip(g, self.orders))

    def add(self, g, h):
        return tuple((a + b) % n for a, b, n in zip(g, h, self.orders))

    def neg(self, g):
        return tuple((-a) % n for a, n in zip(g, self.orders))

    def sub(self, g, h):
        return self.add(g, self.neg(h))

    def scale(self, k, g):
        return tuple((k * a) % n for a, n in zip(g, self.orders))

    def sum(self, gs):
        return reduce(self.add, gs, self.zero())

    def contains(self, g):
        return len(g) == self.rank and all(0 <= a < n for a, n in zip(g, self.orders))

    def elem_order(self, g):
        return reduce(_lcm, (n // math.gcd(a, n) for a, n in zip(g, self.orders)), 1)


def char_eval(G, k, g):
    """Phase exponent k.g in Q/Z."""
    if len(k) != G.rank or len(g) != G.rank:
        raise GroupMismatch("character and element live in different groups")
    return sum((Fraction(a * b, n) for a, b, n in zip(k, g, G.orders)), Fraction(0)) % 1


@dataclass(frozen=True)
class Subgroup:
    parent: FinAbGroup
    generators: tuple = field(compare=False)
    elements: frozenset = frozenset()

    @property
    def order(self):
        return len(self.elements)

    def __contains__(self, g):
        return tuple(g) in self.elements

    def sorted(self):
        return sorted(self.elements)

    def same(self, other):
        return self.parent == other.parent and self.elements == other.elements


def generate(G, gens):
    """Subgroup generated by gens (closure by breadth-first sums)."""
    gens = tuple(G.reduce(g) for g in gens)
    seen = {G.zero()}
    frontier = [G.zero()]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = G.add(x, g)
                if y not in seen:
                    seen.add(y)
                    new.append(y)
        frontier = new
    return Subgroup(G, gens, frozenset(seen))


def subgroup_from_elements(G, elems):
    elems = frozenset(G.reduce(g) for g in elems)
    if G.zero() not in elems:
        raise InvalidSubgroup("missing identity")
    for a in elems:
        if G.neg(a) not in elems:
            raise InvalidSubgroup("not closed under inverse")
        for b in elems:
            if G.add(a, b) not in elems:
                raise InvalidSubgroup("not closed under addition")
    return Subgroup(G, tuple(sorted(elems)), elems)


def _check_sub(G, H):
    if H.parent != G:
        raise InvalidSubgroup("subgroup of a different group")
    for a in H.elements:
        if not G.contains(a):
            raise InvalidSubgroup(f"{a} not in {G}")


def annihilator(G, H):
    """Characters vanishing on H, as a subgroup of the dual (labelled like G)."""
    _check_sub(G, H)
    gens = H.generators or tuple(H.elements)
    ann = [k for k in G.elements() if all(char_eval(G, k, h) == 0 for h in gens)]
    return Subgroup(G, tuple(ann), frozenset(ann))


def kernel(G, chars):
    """Intersection of the kernels of the given characters."""
    ker = [g for g in G.elements() if all(char_eval(G, k, g) == 0 for k in chars)]
    return Subgroup(G, tuple(ker), frozenset(ker))


# Smith normal form

def smith_normal_form(A):
    """U, D, V with U A V = D diagonal, d_i | d_{i+1}, U and V unimodular."""
    A = [list(map(int, row)) for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):  # row_dst += q row_src
        for M in (A, U):
            M[dst] = [a + q * b for a, b in zip(M[dst], M[src])]

    def add_col(src, dst, q):
        for M in (A, V):
            for row in M:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(t, i, -(A[i][t] // A[t][t]))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(t, j, -(A[t][j] // A[t][t]))
            rest = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
            rest += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
            if rest:
                _, i, j = min(rest)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return U, A, V


def _matvec(M, v):
    return [sum(a * b for a, b in zip(row, v)) for row in M]


def _vecmat(v, M):
    return [sum(v[i] * M[i][j] for i in range(len(v))) for j in range(len(M[0]))]


@dataclass
class Quotient:
    G: FinAbGroup
    H: Subgroup
    group: FinAbGroup
    V: list
    factors: list  # indices of the invariant-factor columns that survive
    section_table: dict

    def q(self, g):
        xV = _vecmat(list(g), self.V)
        return tuple(xV[i] % n for i, n in zip(self.factors, self.group.orders))

    def r(self, c):
        return self.section_table[tuple(c)]

    def cosets(self):
        """Coset representatives in lexicographic order of the representative."""
        return sorted(self.section_table.values())


def quotient(G, H):
    """G/H in invariant-factor form with its projection q and section r."""
    _check_sub(G, H)
    rels = [[n if i == d else 0 for i in range(G.rank)] for d, n in enumerate(G.orders)]
    rels += [list(h) for h in (H.generators or sorted(H.elements))]
    _, D, V = smith_normal_form(rels)
    diag = [D[i][i] for i in range(min(len(D), G.rank))]
    factors = [i for i, d in enumerate(diag) if d != 1]
    Q = FinAbGroup(tuple(diag[i] for i in factors))
    quo = Quotient(G, H, Q, V, factors, {})
    for g in G.elements():
        quo.section_table.setdefault(quo.q(g), g)
    return quo


# Z-module equations

@dataclass(frozen=True)
class EquationSystem:
    """rows: (coeffs over Z for the M variables, rhs in K)."""
    n_vars: int
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple((tuple(map(int, c)), tuple(map(int, a)))
                                               for c, a in self.rows))
        for c, _ in self.rows:
            if len(c) != self.n_vars:
                raise ValueError("coefficient row has wrong length")

    @classmethod
    def single(cls, K, coeffs, rhs):
        rhs = (rhs,) if isinstance(rhs, int) else tuple(rhs)
        return cls(len(coeffs), ((tuple(coeffs), K.reduce(rhs)),))

    def holds(self, K, sol):
        return all(K.sum(K.scale(c, b) for c, b in zip(coeffs, sol)) == K.reduce(a)
                   for coeffs, a in self.rows)


def _solve_brute(S, K):
    for sol in itertools.product(K.elements(), repeat=S.n_vars):
        if S.holds(K, sol):
            return list(sol)
    return None


def _solve_cyclic(C, a, k):
    """Integer C y = a mod k, via Smith form; None if inconsistent."""
    U, D, V = smith_normal_form(C)
    c = _matvec(U, a)
    n = len(C[0])
    z = [0] * n
    for i in range(len(c)):
        d = D[i][i] if i < n else 0
        if d == 0:
            if c[i] % k:
                return None
            continue
        g = math.gcd(d, k)
        if c[i] % g:
            return None
        # d/g * z = c/g mod k/g
        kk = k // g
        z[i] = (c[i] // g) * pow(d // g, -1, kk) % kk if kk > 1 else 0
    return [v % k for v in _matvec(V, z)]


def solve_system_snf(S, K):
    C = [list(c) for c, _ in S.rows]
    if not C:
        return [K.zero()] * S.n_vars
    per_comp = []
    for e, k in enumerate(K.orders):
        y = _solve_cyclic(C, [a[e] for _, a in S.rows], k)
        if y is None:
            return None
        per_comp.append(y)
    return [tuple(per_comp[e][r] for e in range(K.rank)) for r in range(S.n_vars)]


def solve_system(S, K, brute_limit=10 ** 6):
    """Some (b_r) in K with sum_r n_r^s b_r = a^s for all s, or None."""
    if K.order ** S.n_vars <= brute_limit:
        return _solve_brute(S, K)
    return solve_system_snf(S, K)


def solve_in_torus(S, K):
    """Solve S in the torus after embedding K into characters.

    Returns beta: list over variables of dicts {character k: Fraction mod 1}
    with  sum_r n_r^s beta_r[k] = k.a^s  for every s and every character k,
    or None when the system is inconsistent.
    """
    C = [list(c) for c, _ in S.rows]
    chars = K.elements()
    if not C:
        return [{k: Fraction(0) for k in chars} for _ in range(S.n_vars)]
    U, D, V = smith_normal_form(C)
    n = S.n_vars
    beta = [dict() for _ in range(n)]
    for k in chars:
        c = _matvec(U, [char_eval(K, k, a) for _, a in S.rows])
        z = [Fraction(0)] * n
        for i in range(len(c)):
            d = D[i][i] if i < n else 0
            if d == 0:
                if c[i] % 1:
                    return None
                continue
            z[i] = Fraction(c[i]) / d
        y = _matvec(V, z)
        for r in range(n):
            beta[r][k] = Fraction(y[r]) % 1
    return beta


def torus_holds(S, K, beta):
    return all(sum((c * b[k] for c, b in zip(coeffs, beta)), Fraction(0)) % 1 == char_eval(K, k, a)
               for coeffs, a in S.rows for k in K.elements())


def solve_congruences(n_vars, rows):
    """Integer x with  sum_i c_i x_i = r  mod n  for every row (coeffs, n, r).

    Each modulus gets a slack variable, turning the system into A y = b over Z,
    which Smith form decides exactly.  Returns the x part (reduced
    nowhere) or None.
    """
    if not rows:
        return [0] * n_vars
    m = len(rows)
    A = []
    for i, (coeffs, n, _) in enumerate(rows):
        row = [0] * (n_vars + m)
        for v, c in (coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs)):
            row[v] += int(c)
        row[n_vars + i] = -int(n)
        A.append(row)
    b = [int(r) for _, _, r in rows]
    U, D, V = smith_normal_form(A)
    c = _matvec(U, b)
    width = n_vars + m
    z = [0] * width
    for i in range(m):
        d = D[i][i] if i < width else 0
        if d == 0:
            if c[i]:
                return None
            continue
        if c[i] % d:
            return None
        z[i] = c[i] // d
    y = _matvec(V, z)
    return y[:n_vars]
