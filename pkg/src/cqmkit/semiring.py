"""Commutative involutive semirings.

Every theory works on numpy "payload" arrays: an array of shape
``shape + theory.elem_shape`` holds one scalar per index of ``shape``.
All matrix code sits on top of the vectorised ops defined here.
"""
import math
import os
from fractions import Fraction

import numpy as np

INF = math.inf


class NotInvertible(ArithmeticError):
    pass


class TheoryError(ValueError):
    pass


def default_tol():
    return float(os.environ.get("CQMKIT_TOL", "1e-9"))


class Theory:
    name = "?"
    elem_shape = ()
    is_float = False
    trivial_involution = True
    idempotent_unit = False  # 1 + 1 = 1

    # construction
    def zeros(self, shape=()):
        raise NotImplementedError

    def ones(self, shape=()):
        raise NotImplementedError

    def from_int(self, k, shape=()):
        raise NotImplementedError

    def from_fraction(self, q):
        q = Fraction(q)
        return self.mul(self.from_int(q.numerator), self.invert(self.from_int(q.denominator)))

    # arithmetic
    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def sum(self, a, axis):
        raise NotImplementedError

    def involve(self, a):
        return a

    def matmul(self, A, B):
        # generic broadcast route, fine for small dims
        return self.sum(self.mul(A[:, :, None], B[None, :, :]), axis=1)

    def kron(self, A, B):
        ra, ca = A.shape[:2]
        rb, cb = B.shape[:2]
        out = self.mul(A[:, None, :, None], B[None, :, None, :])
        return out.reshape((ra * rb, ca * cb) + self.elem_shape)

    # comparison
    def residual(self, a, b):
        """max entrywise distance (floats) or 0/1 mismatch flag (exact)."""
        a, b = np.asarray(a), np.asarray(b)
        if a.shape != b.shape:
            return INF
        if a.size == 0:
            return 0.0
        return 0.0 if np.array_equal(a, b) else 1.0

    def equal(self, a, b, tol=None):
        r = self.residual(a, b)
        if self.is_float:
            return r <= (default_tol() if tol is None else tol)
        return r == 0

    # scalars
    def is_invertible(self, a):
        raise NotImplementedError

    def invert(self, a):
        raise NotImplementedError

    def phase(self, r):
        """Image of r in Q/Z under the canonical phase embedding, or None."""
        raise NotImplementedError

    def fmt(self, a):
        return str(a)

    def to_float(self, a):
        raise TheoryError(f"{self.name} weights have no float reading")

    def random(self, rng, shape=()):
        raise NotImplementedError

    def enumerate(self):
        raise TheoryError(f"{self.name} is not finite")

    def __eq__(self, other):
        return isinstance(other, Theory) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return f"Theory({self.name})"


class ComplexTheory(Theory):
    name = "complex"
    is_float = True
    trivial_involution = False

    def zeros(self, shape=()):
        return np.zeros(shape, complex)

    def ones(self, shape=()):
        return np.ones(shape, complex)

    def from_int(self, k, shape=()):
        return np.full(shape, complex(k))

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def sum(self, a, axis):
        return a.sum(axis=axis)

    def involve(self, a):
        return np.conj(a)

    def matmul(self, A, B):
        return A @ B

    def kron(self, A, B):
        return np.kron(A, B)

    def residual(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        if a.shape != b.shape:
            return INF
        return float(np.max(np.abs(a - b))) if a.size else 0.0

    def is_invertible(self, a):
        return abs(a) > default_tol()

    def invert(self, a):
        if not self.is_invertible(a):
            raise NotInvertible(a)
        return np.asarray(1 / a)

    def phase(self, r):
        r = Fraction(r) % 1
        return np.asarray(complex(np.exp(2j * np.pi * float(r))))

    def fmt(self, a):
        a = complex(a)
        return f"{a.real!r}{a.imag:+}i"

    def to_float(self, a):
        return float(np.real(a))

    def random(self, rng, shape=()):
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)


class RealTheory(ComplexTheory):
    name = "real"
    trivial_involution = True

    def zeros(self, shape=()):
        return np.zeros(shape)

    def ones(self, shape=()):
        return np.ones(shape)

    def from_int(self, k, shape=()):
        return np.full(shape, float(k))

    def involve(self, a):
        return a

    def invert(self, a):
        if not self.is_invertible(a):
            raise NotInvertible(a)
        return np.asarray(1.0 / a)

    def phase(self, r):
        r = Fraction(r) % 1
        if r == 0:
            return np.asarray(1.0)
        if r == Fraction(1, 2):
            return np.asarray(-1.0)
        return None

    def fmt(self, a):
        return repr(float(a))

    def random(self, rng, shape=()):
        return rng.normal(size=shape)


class SplitComplexTheory(Theory):
    """x + jy with j^2 = 1, payload trailing axis (x, y)."""
    name = "splitc"
    elem_shape = (2,)
    is_float = True
    trivial_involution = False

    def zeros(self, shape=()):
        return np.zeros(tuple(shape) + (2,))

    def ones(self, shape=()):
        a = self.zeros(shape)
        a[..., 0] = 1
        return a

    def from_int(self, k, shape=()):
        a = self.zeros(shape)
        a[..., 0] = k
        return a

    def make(self, x, y):
        return np.stack(np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float)), axis=-1)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        x = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
        y = a[..., 0] * b[..., 1] + a[..., 1] * b[..., 0]
        return np.stack([x, y], axis=-1)

    def sum(self, a, axis):
        return a.sum(axis=axis)

    def involve(self, a):
        out = a.copy()
        out[..., 1] = -out[..., 1]
        return out

    def matmul(self, A, B):
        # idempotent basis e± = (1 ± j)/2 turns the product componentwise
        Ap, Am = A[..., 0] + A[..., 1], A[..., 0] - A[..., 1]
        Bp, Bm = B[..., 0] + B[..., 1], B[..., 0] - B[..., 1]
        Cp, Cm = Ap @ Bp, Am @ Bm
        return np.stack([(Cp + Cm) / 2, (Cp - Cm) / 2], axis=-1)

    def residual(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        if a.shape != b.shape:
            return INF
        return float(np.max(np.abs(a - b))) if a.size else 0.0

    def norm(self, a):
        return a[..., 0] ** 2 - a[..., 1] ** 2

    def is_invertible(self, a):
        return abs(float(self.norm(a))) > default_tol()

    def invert(self, a):
        if not self.is_invertible(a):
            raise NotInvertible(a)
        return self.involve(a) / self.norm(a)

    def phase(self, r):
        r = Fraction(r) % 1
        if r == 0:
            return self.ones()
        if r == Fraction(1, 2):
            return self.from_int(-1)
        return None

    def fmt(self, a):
        return f"{float(a[0])!r}{float(a[1]):+}j"

    def to_float(self, a):
        return float(a[..., 0])

    def random(self, rng, shape=()):
        return rng.normal(size=tuple(shape) + (2,))


class BooleanTheory(Theory):
    name = "bool"
    idempotent_unit = True

    def zeros(self, shape=()):
        return np.zeros(shape, bool)

    def ones(self, shape=()):
        return np.ones(shape, bool)

    def from_int(self, k, shape=()):
        return np.full(shape, k != 0)

    def add(self, a, b):
        return a | b

    def mul(self, a, b):
        return a & b

    def sum(self, a, axis):
        return a.any(axis=axis)

    def matmul(self, A, B):
        return (A.astype(np.int64) @ B.astype(np.int64)) > 0

    def is_invertible(self, a):
        return bool(a)

    def invert(self, a):
        if not a:
            raise NotInvertible(a)
        return np.asarray(True)

    def phase(self, r):
        return self.ones() if Fraction(r) % 1 == 0 else None

    def fmt(self, a):
        return "1" if a else "0"

    def to_float(self, a):
        return float(bool(a))

    def random(self, rng, shape=()):
        return rng.integers(0, 2, size=shape).astype(bool)

    def enumerate(self):
        return [np.asarray(False), np.asarray(True)]


class ParityTheory(BooleanTheory):
    """The two-element field F_2."""
    name = "parity"
    idempotent_unit = False

    def zeros(self, shape=()):
        return np.zeros(shape, np.int64)

    def ones(self, shape=()):
        return np.ones(shape, np.int64)

    def from_int(self, k, shape=()):
        return np.full(shape, k % 2, np.int64)

    def add(self, a, b):
        return (a + b) % 2

    def mul(self, a, b):
        return a * b

    def sum(self, a, axis):
        return a.sum(axis=axis) % 2

    def matmul(self, A, B):
        return (A @ B) % 2

    def invert(self, a):
        if not a:
            raise NotInvertible(a)
        return np.asarray(1, np.int64)

    def fmt(self, a):
        return str(int(a))

    def random(self, rng, shape=()):
        return rng.integers(0, 2, size=shape)

    def enumerate(self):
        return [np.asarray(0), np.asarray(1)]


class TropicalTheory(Theory):
    """min-plus over Q with +inf; zero is inf, one is 0."""
    name = "tropical"
    idempotent_unit = True

    def zeros(self, shape=()):
        return np.full(shape, INF, dtype=object)

    def ones(self, shape=()):
        a = np.empty(shape, dtype=object)
        a[...] = Fraction(0)
        return a

    def from_int(self, k, shape=()):
        # n-fold sum of the unit is the unit (k > 0)
        return self.ones(shape) if k else self.zeros(shape)

    def add(self, a, b):
        return np.minimum(a, b)

    def mul(self, a, b):
        return np.add(a, b, dtype=object)

    def sum(self, a, axis):
        if a.shape[axis] == 0:
            shape = a.shape[:axis] + a.shape[axis + 1:]
            return self.zeros(shape)
        return np.min(a, axis=axis)

    def is_invertible(self, a):
        return a != INF

    def invert(self, a):
        if a == INF:
            raise NotInvertible(a)
        return np.asarray(-Fraction(a), dtype=object)

    def phase(self, r):
        return self.ones() if Fraction(r) % 1 == 0 else None

    def fmt(self, a):
        a = a.item() if isinstance(a, np.ndarray) else a
        return "inf" if a == INF else str(Fraction(a))

    def random(self, rng, shape=()):
        vals = rng.integers(-4, 5, size=shape)
        out = np.empty(shape, dtype=object)
        for idx in np.ndindex(*np.shape(vals)):
            out[idx] = INF if vals[idx] == 4 else Fraction(int(vals[idx]), 2)
        return out


# finite fields

def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _is_irreducible(mod, p):
    """Monic mod (low-to-high coeffs) irreducible over F_p, by trial division."""
    n = len(mod) - 1
    if n <= 1:
        return True
    for d in range(1, n // 2 + 1):
        for m in range(p ** d):
            cand = [(m // p ** i) % p for i in range(d)] + [1]
            r = list(mod)
            for k in range(len(r) - 1, d - 1, -1):
                f = r[k]
                if f:
                    for i in range(d + 1):
                        r[k - d + i] = (r[k - d + i] - f * cand[i]) % p
            if not any(r[:d]):
                return False
    return True


def lowest_irreducible(p, n):
    """Lowest monic irreducible of degree n, ordered by coefficients high to low."""
    for m in range(p ** n):
        # base-p digit i of m is the coeff of x^i, so m orders high coeffs first
        digits = [(m // p ** i) % p for i in range(n)]
        mod = digits + [1]
        if _is_irreducible(mod, p):
            return mod
    raise TheoryError("no irreducible found")


def _factor(n):
    out, k = [], 2
    while k * k <= n:
        while n % k == 0:
            out.append(k)
            n //= k
        k += 1
    if n > 1:
        out.append(n)
    return sorted(set(out))


class GF:
    """F_{p^n} as F_p[x]/(mod); elements are coefficient arrays (..., n)."""

    def __init__(self, p, n):
        self.p, self.n = p, n
        self.q = p ** n
        self.mod = lowest_irreducible(p, n)
        self.dtype = np.int64 if p < 2 ** 20 else object

    def encode(self, k):
        k = int(k) % self.q if self.n > 1 else int(k) % self.p
        return np.array([(k // self.p ** i) % self.p for i in range(self.n)], dtype=self.dtype)

    def decode(self, a):
        return sum(int(a[..., i]) * self.p ** i for i in range(self.n))

    def _reduce(self, c):
        n, p = self.n, self.p
        c = c % p
        for k in range(c.shape[-1] - 1, n - 1, -1):
            f = c[..., k]
            for i in range(n):
                c[..., k - n + i] = (c[..., k - n + i] - f * self.mod[i]) % p
        return c[..., :n] % p

    def mul(self, a, b):
        n = self.n
        shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
        c = np.zeros(shape + (2 * n - 1,), dtype=self.dtype)
        for i in range(n):
            for j in range(n):
                c[..., i + j] = (c[..., i + j] + a[..., i] * b[..., j]) % self.p
        return self._reduce(c)

    def matmul(self, A, B):
        n = self.n
        c = np.zeros(A.shape[:-2] + B.shape[1:-1] + (2 * n - 1,), dtype=self.dtype)
        for i in range(n):
            for j in range(n):
                c[..., i + j] = (c[..., i + j] + A[..., i] @ B[..., j]) % self.p
        return self._reduce(c)

    def pow(self, a, e):
        out = self.encode(1)
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def inv(self, a):
        if not np.any(a):
            raise NotInvertible("zero in finite field")
        return self.pow(a, self.q - 2)

    def order(self, a):
        if not np.any(a):
            return None
        m = self.q - 1
        for f in _factor(self.q - 1):
            while m % f == 0 and not np.any(self.pow(a, m // f) - self.encode(1)):
                m //= f
        return m


class FiniteFieldTheory(Theory):
    """F_{q^2} = F_q(sqrt eps), q = p^n, involution sqrt eps -> -sqrt eps.

    Payload trailing axes (2, n): coordinates x, y of x + y sqrt(eps),
    each an F_q coefficient vector.
    """
    trivial_involution = False

    def __init__(self, p, n, eps):
        if p < 3 or any(p % k == 0 for k in range(2, int(p ** 0.5) + 1)):
            raise TheoryError(f"p={p} must be an odd prime")
        self.p, self.n = p, n
        self.F = GF(p, n)
        self.q = self.F.q
        self.eps_int = int(eps)
        self.eps = self.F.encode(eps)
        if self.F.order(self.eps) != self.q - 1:
            raise TheoryError(f"eps={eps} is not primitive in F_{self.q}")
        self.name = f"ff:{p}^{n}:{eps}"
        self.elem_shape = (2, n)
        self._gen = None

    def _elem(self, x, y):
        return np.stack([self.F.encode(x), self.F.encode(y)])

    def make(self, x, y):
        return self._elem(x, y)

    def zeros(self, shape=()):
        return np.zeros(tuple(shape) + (2, self.n), dtype=self.F.dtype)

    def ones(self, shape=()):
        return self.from_int(1, shape)

    def from_int(self, k, shape=()):
        a = self.zeros(shape)
        a[..., 0, 0] = k % self.p
        return a

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        F = self.F
        xa, ya, xb, yb = a[..., 0, :], a[..., 1, :], b[..., 0, :], b[..., 1, :]
        x = (F.mul(xa, xb) + F.mul(self.eps, F.mul(ya, yb))) % self.p
        y = (F.mul(xa, yb) + F.mul(ya, xb)) % self.p
        return np.stack([x, y], axis=-2)

    def sum(self, a, axis):
        return a.sum(axis=axis) % self.p

    def matmul(self, A, B):
        F = self.F
        xa, ya, xb, yb = A[..., 0, :], A[..., 1, :], B[..., 0, :], B[..., 1, :]
        x = (F.matmul(xa, xb) + F.mul(self.eps, F.matmul(ya, yb))) % self.p
        y = (F.matmul(xa, yb) + F.matmul(ya, xb)) % self.p
        return np.stack([x, y], axis=-2)

    def involve(self, a):
        out = a.copy()
        out[..., 1, :] = (-out[..., 1, :]) % self.p
        return out

    def norm(self, a):
        F = self.F
        x, y = a[..., 0, :], a[..., 1, :]
        return (F.mul(x, x) - F.mul(self.eps, F.mul(y, y))) % self.p

    def is_invertible(self, a):
        return bool(np.any(a))

    def invert(self, a):
        if not self.is_invertible(a):
            raise NotInvertible(a)
        ninv = self.F.inv(self.norm(a))
        c = self.involve(a)
        return np.stack([self.F.mul(c[0], ninv), self.F.mul(c[1], ninv)])

    def power(self, a, e):
        out = self.ones()
        while e:
            if e & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            e >>= 1
        return out

    def unit_norm_elements(self):
        """All x + y sqrt(eps) with norm 1, in encoding order (y-major)."""
        if self.q > 2 ** 10:
            raise TheoryError("norm-one enumeration limited to q <= 1024")
        one = self.F.encode(1)
        out = []
        for y in range(self.q):
            for x in range(self.q):
                e = self._elem(x, y)
                if np.array_equal(self.norm(e), one):
                    out.append(e)
        return out

    def phase_generator(self):
        """Canonical generator of the cyclic norm-one group (order q + 1)."""
        if self._gen is None:
            m = self.q + 1
            primes = _factor(m)
            one = self.ones()
            for e in self.unit_norm_elements():
                if all(not np.array_equal(self.power(e, m // f), one) for f in primes):
                    self._gen = e
                    break
        return self._gen

    def phase(self, r):
        r = Fraction(r) % 1
        if (self.q + 1) % r.denominator:
            return None
        if r == 0:
            return self.ones()
        return self.power(self.phase_generator(), r.numerator * ((self.q + 1) // r.denominator))

    def fmt(self, a):
        return f"{self.F.decode(a[0])}+{self.F.decode(a[1])}s"

    def random(self, rng, shape=()):
        return rng.integers(0, self.p, size=tuple(shape) + (2, self.n))

    def enumerate(self):
        return [self._elem(x, y) for y in range(self.q) for x in range(self.q)]


COMPLEX = ComplexTheory()
REAL = RealTheory()
SPLITC = SplitComplexTheory()
BOOL = BooleanTheory()
PARITY = ParityTheory()
TROPICAL = TropicalTheory()

_REGISTRY = {t.name: t for t in (COMPLEX, REAL, SPLITC, BOOL, PARITY, TROPICAL)}
_ALIASES = {"c": "complex", "r": "real", "boolean": "bool", "rel": "bool",
            "split": "splitc", "splitcomplex": "splitc", "f2": "parity", "trop": "tropical"}
_FF_CACHE = {}


def finite_field(p, n, eps):
    key = (p, n, int(eps))
    if key not in _FF_CACHE:
        _FF_CACHE[key] = FiniteFieldTheory(p, n, eps)
    return _FF_CACHE[key]


def parse_theory(s):
    """`complex`, `real`, `bool`, `splitc`, `parity`, `ff:p^n:eps`, `tropical`."""
    if isinstance(s, Theory):
        return s
    key = s.strip().lower()
    key = _ALIASES.get(key, key)
    if key in _REGISTRY:
        return _REGISTRY[key]
    if key.startswith("ff:"):
        try:
            _, pn, eps = key.split(":")
            p, n = pn.split("^") if "^" in pn else (pn, "1")
            return finite_field(int(p), int(n), int(eps))
        except ValueError as err:
            raise TheoryError(f"bad theory spec {s!r}: {err}") from None
    raise TheoryError(f"unknown theory {s!r}")


class Scalar:
    """A single element of a theory."""
    __slots__ = ("theory", "v")

    def __init__(self, theory, v):
        self.theory = theory
        self.v = np.asarray(v) if not isinstance(v, np.ndarray) else v

    @classmethod
    def of(cls, theory, k):
        theory = parse_theory(theory)
        if isinstance(k, Fraction):
            return cls(theory, theory.from_fraction(k))
        return cls(theory, theory.from_int(k))

    def _check(self, other):
        if not isinstance(other, Scalar):
            other = Scalar.of(self.theory, other)
        if other.theory != self.theory:
            raise TheoryError(f"theory mismatch: {self.theory.name} vs {other.theory.name}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return Scalar(self.theory, self.theory.add(self.v, other.v))

    def __mul__(self, other):
        other = self._check(other)
        return Scalar(self.theory, self.theory.mul(self.v, other.v))

    __radd__ = __add__
    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = self._check(other)
        except TheoryError:
            return False
        return self.theory.equal(self.v, other.v)

    def __hash__(self):
        return hash((self.theory.name, self.theory.fmt(self.v)))

    def __repr__(self):
        return f"Scalar({self.theory.name}, {self.theory.fmt(self.v)})"

    def __str__(self):
        return self.theory.fmt(self.v)


def involve(x):
    return Scalar(x.theory, x.theory.involve(x.v))


def born_norm(x):
    return involve(x) * x


def is_invertible(x):
    return bool(x.theory.is_invertible(x.v))


def invert(x):
    return Scalar(x.theory, x.theory.invert(x.v))


def phase(theory, r):
    """Canonical homomorphic embedding Q/Z -> phases of the theory (None if absent)."""
    theory = parse_theory(theory)
    v = theory.phase(Fraction(r))
    return None if v is None else Scalar(theory, v)


def phase_of_order(theory, d):
    if d < 1:
        raise ValueError("d must be >= 1")
    return phase(theory, Fraction(1, d))


def has_phase_of_order(theory, d):
    return phase_of_order(theory, d) is not None
