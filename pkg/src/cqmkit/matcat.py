"""Dense matrices over a semiring theory, Born rule and CPM doubling."""
import itertools
from dataclasses import dataclass

import numpy as np

from .semiring import Scalar, TheoryError, parse_theory


class IncompleteBasis(ValueError):
    pass


class NonInvertibleNorm(ValueError):
    pass


class NotApplicable(ValueError):
    pass


class Mat:
    """rows x cols matrix; data has shape (rows, cols) + theory.elem_shape."""
    __slots__ = ("theory", "data")

    def __init__(self, theory, data):
        self.theory = parse_theory(theory)
        data = np.asarray(data)
        if data.ndim != 2 + len(self.theory.elem_shape) or min(data.shape[:2]) < 1:
            raise ValueError(f"bad matrix payload shape {data.shape}")
        self.data = data

    @property
    def shape(self):
        return self.data.shape[:2]

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    # constructors
    @classmethod
    def zeros(cls, theory, r, c):
        theory = parse_theory(theory)
        return cls(theory, theory.zeros((r, c)))

    @classmethod
    def identity(cls, theory, d):
        theory = parse_theory(theory)
        data = theory.zeros((d, d))
        one = theory.ones()
        for i in range(d):
            data[i, i] = one
        return cls(theory, data)

    @classmethod
    def from_ints(cls, theory, rows):
        theory = parse_theory(theory)
        rows = np.asarray(rows, dtype=np.int64)
        data = theory.zeros(rows.shape)
        for idx in np.ndindex(*rows.shape):
            data[idx] = theory.from_int(int(rows[idx]))
        return cls(theory, data)

    @classmethod
    def from_scalars(cls, theory, rows):
        theory = parse_theory(theory)
        r, c = len(rows), len(rows[0])
        data = theory.zeros((r, c))
        for i in range(r):
            for j in range(c):
                x = rows[i][j]
                data[i, j] = x.v if isinstance(x, Scalar) else theory.from_int(x)
        return cls(theory, data)

    @classmethod
    def basis(cls, theory, d, i):
        theory = parse_theory(theory)
        data = theory.zeros((d, 1))
        data[i, 0] = theory.ones()
        return cls(theory, data)

    @classmethod
    def column(cls, theory, payload):
        theory = parse_theory(theory)
        payload = np.asarray(payload)
        return cls(theory, payload.reshape((-1, 1) + theory.elem_shape))

    @classmethod
    def permutation(cls, theory, perm, d_in=None):
        """|perm[i]> <i|."""
        theory = parse_theory(theory)
        d_out = max(perm) + 1 if d_in is None else d_in
        data = theory.zeros((d_out, len(perm)))
        one = theory.ones()
        for i, j in enumerate(perm):
            data[j, i] = one
        return cls(theory, data)

    # algebra
    def _same(self, other):
        if self.theory != other.theory:
            raise TheoryError(f"theory mismatch: {self.theory.name} vs {other.theory.name}")

    def __matmul__(self, other):
        self._same(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot compose {self.shape} with {other.shape}")
        return Mat(self.theory, self.theory.matmul(self.data, other.data))

    def __add__(self, other):
        self._same(other)
        return Mat(self.theory, self.theory.add(self.data, other.data))

    def scale(self, s):
        if not isinstance(s, Scalar):
            s = Scalar.of(self.theory, s)
        return Mat(self.theory, self.theory.mul(self.data, s.v))

    def __getitem__(self, idx):
        i, j = idx
        return Scalar(self.theory, self.data[i, j])

    def entry(self, i, j=0):
        return self[i, j]

    def equals(self, other, tol=None):
        return self.theory == other.theory and self.theory.equal(self.data, other.data, tol)

    def residual(self, other):
        self._same(other)
        return self.theory.residual(self.data, other.data)

    def __repr__(self):
        return f"Mat({self.theory.name}, {self.rows}x{self.cols})"

    def to_json(self):
        t = self.theory
        return {"theory": t.name, "rows": self.rows, "cols": self.cols,
                "entries": [[t.fmt(self.data[i, j]) for j in range(self.cols)]
                            for i in range(self.rows)]}


def dagger(M):
    t = M.theory
    axes = (1, 0) + tuple(range(2, M.data.ndim))
    return Mat(t, t.involve(np.transpose(M.data, axes)).copy())


def conj(M):
    return Mat(M.theory, M.theory.involve(M.data))


def tensor(A, *more):
    out = A
    for B in more:
        out._same(B)
        out = Mat(out.theory, out.theory.kron(out.data, B.data))
    return out


def tensor_power(A, n):
    out = A
    for _ in range(n - 1):
        out = tensor(out, A)
    return out


def is_unitary(U):
    I = Mat.identity(U.theory, U.rows)
    return (dagger(U) @ U).equals(I) and (U @ dagger(U)).equals(I)


def inner(a, b):
    """<a|b> as a scalar."""
    return (dagger(a) @ b)[0, 0]


def apply_local(M, psi, dims, axis):
    """(id x M x id) psi for a column psi on the tensor product of dims."""
    t = M.theory
    es = t.elem_shape
    x = psi.data.reshape(tuple(dims) + es)
    x = np.moveaxis(x, axis, 0)
    rest = x.shape[1:len(dims)]
    x = x.reshape((dims[axis], -1) + es)
    y = t.matmul(M.data, x)
    y = y.reshape((M.rows,) + rest + es)
    y = np.moveaxis(y, 0, axis)
    return Mat(t, y.reshape((-1, 1) + es))


# Born rule

@dataclass
class Distribution:
    theory: object
    weights: dict

    def total(self):
        t = self.theory
        acc = t.zeros()
        for w in self.weights.values():
            acc = t.add(acc, w.v)
        return Scalar(t, acc)

    def support(self):
        t = self.theory
        return [k for k, w in self.weights.items() if not t.equal(w.v, t.zeros())]


def check_basis(basis, norms):
    """sum_i |b_i><b_i| / N_i = id, and <b_i|b_j> = 0 for i != j."""
    t = basis[0].theory
    d = basis[0].rows
    if len(basis) != d:
        raise IncompleteBasis(f"{len(basis)} vectors for dimension {d}")
    inv = []
    for n in norms:
        if not t.is_invertible(n.v):
            raise NonInvertibleNorm(str(n))
        inv.append(Scalar(t, t.invert(n.v)))
    acc = Mat.zeros(t, d, d)
    for b, ni in zip(basis, inv):
        acc = acc + (b @ dagger(b)).scale(ni)
    if not acc.equals(Mat.identity(t, d)):
        raise IncompleteBasis("basis is not complete")
    for i, j in itertools.combinations(range(d), 2):
        if not inner(basis[i], basis[j]) == 0:
            raise IncompleteBasis(f"basis vectors {i}, {j} not orthogonal")
    return inv


def born_distribution(state, basis, norms, check=True):
    """Weights <b_i|rho|b_i> / N_i for a pure column state or a density matrix."""
    t = state.theory
    inv = check_basis(basis, norms) if check else [Scalar(t, t.invert(n.v)) for n in norms]
    weights = {}
    for i, (b, ni) in enumerate(zip(basis, inv)):
        if state.cols == 1:
            amp = inner(b, state)
            w = Scalar(t, t.involve(amp.v)) * amp
        else:
            w = (dagger(b) @ state @ b)[0, 0]
        weights[i] = w * ni
    return Distribution(t, weights)


# CPM

def cpm_double(M):
    """conj(M) (x) M."""
    return tensor(conj(M), M)


def cup(theory, d):
    """sum_i |i>|i> as a column of dim d^2."""
    t = parse_theory(theory)
    data = t.zeros((d * d, 1))
    for i in range(d):
        data[i * d + i, 0] = t.ones()
    return Mat(t, data)


def discard(theory, d):
    """Doubled trace effect on conj(H) (x) H."""
    return dagger(cup(theory, d))


def _bool_states(dim):
    for bits in itertools.product((False, True), repeat=dim):
        yield Mat("bool", np.array(bits, bool).reshape(dim, 1))


def purification_map(theory, n):
    """f = sum_{U nonempty} sum_{x in U} |x> (x) |U> (x) <x|, X = {0..n-1}."""
    t = parse_theory(theory)
    subsets = [U for r in range(1, n + 1) for U in itertools.combinations(range(n), r)]
    m = len(subsets)
    data = t.zeros((n * m, n))
    for u, U in enumerate(subsets):
        for x in U:
            data[x * m + u, x] = t.ones()
    return Mat(t, data), m


def check_purification_counterexample(theory, n):
    t = parse_theory(theory)
    if not t.idempotent_unit:
        raise NotApplicable(f"{t.name}: 1 + 1 != 1")
    if 2 ** n - 1 > 1024:
        raise ValueError("X too large")
    f, m = purification_map(t, n)
    # double(f): conj(H_X x H_U) x (H_X x H_U) <- conj(H_X) x H_X; reorder to
    # [conj X, X] x [conj U, U] and discard the U pair
    Df = cpm_double(f)
    # rows of Df are indexed (cx, cu, x, u); move them to (cx, x, cu, u)
    perm = []
    for cx, cu, x, u in itertools.product(range(n), range(m), range(n), range(m)):
        perm.append(((cx * n + x) * m + cu) * m + u)
    P = Mat.permutation(t, perm, d_in=len(perm))
    lhs = tensor(Mat.identity(t, n * n), discard(t, m)) @ P @ Df
    discard_ok = lhs.equals(cpm_double(Mat.identity(t, n)))

    no_product = True
    if t.name == "bool":
        I = Mat.identity(t, n)
        for psi in _bool_states(m):
            if tensor(I, psi).equals(f):
                no_product = False
                break
    else:
        # id (x) psi = f forces psi to equal the x-th column block of f for
        # every x, so checking those n candidates is exhaustive
        no_product = not any(tensor(Mat.identity(t, n), Mat(t, f.data[x * m:(x + 1) * m, x:x + 1]))
                             .equals(f) for x in range(n))
    return {"theory": t.name, "X": n, "ancilla_dim": m,
            "discard_identity": bool(discard_ok), "no_product_decomposition": bool(no_product),
            "states_checked": 2 ** m if t.name == "bool" else n}


def hyperbolic_example():
    """Split-complex rho = (|psi><psi| + |1><1|)/2, psi = sqrt2|0> + ((1 + j sqrt3)/sqrt2)|1>.

    Returns its weights in the point basis and in the Z2 character basis.
    """
    t = parse_theory("splitc")
    s2, s3 = np.sqrt(2.0), np.sqrt(3.0)
    psi = Mat(t, np.array([[[s2, 0.0]], [[1 / s2, s3 / s2]]]))
    one = Mat.basis(t, 2, 1)
    half = Scalar(t, t.make(0.5, 0.0))
    rho = (psi @ dagger(psi)).scale(half) + (one @ dagger(one)).scale(half)
    points = [Mat.basis(t, 2, 0), one]
    chars = [Mat.from_ints(t, [[1], [1]]), Mat.from_ints(t, [[1], [-1]])]
    Z = born_distribution(rho, points, [Scalar.of(t, 1)] * 2)
    X = born_distribution(rho, chars, [Scalar.of(t, 2)] * 2)
    return rho, Z, X
