"""Abelian hidden subgroup problem: oracle, quantum subroutine, post-processing."""
import math
from dataclasses import dataclass

import numpy as np

from .abgroup import FinAbGroup, annihilator, generate, kernel, quotient
from .frobenius import (classical_states_of_group_structure, classical_structure,
                        coherent_group, group_structure)
from .matcat import Mat, apply_local, dagger, is_unitary, tensor
from .semiring import Scalar, parse_theory


@dataclass
class HidingFunction:
    G: FinAbGroup
    H: object
    quo: object
    n_bits: int
    labels: dict  # coset (quotient element) -> bit tuple

    def __call__(self, g):
        return self.labels[self.quo.q(g)]

    def image(self):
        return sorted(self.labels.values())


def hiding_function(G, H, n_bits=None):
    """f = s o q, with s the binary encoding of the lexicographic coset index."""
    G = FinAbGroup.parse(G)
    if not hasattr(H, "elements"):
        H = generate(G, H)
    quo = quotient(G, H)
    reps = quo.cosets()
    need = max(1, math.ceil(math.log2(len(reps))))
    n_bits = need if n_bits is None else n_bits
    if n_bits < need:
        raise ValueError(f"{n_bits} bits cannot label {len(reps)} cosets")
    labels = {}
    for i, r in enumerate(reps):
        labels[quo.q(r)] = tuple((i >> (n_bits - 1 - b)) & 1 for b in range(n_bits))
    return HidingFunction(G, H, quo, n_bits, labels)


def _bits_index(bits):
    i = 0
    for b in bits:
        i = 2 * i + b
    return i


def oracle_permutation(f):
    G = f.G
    m = 2 ** f.n_bits
    perm = [0] * (G.order * m)
    for g in G.elements():
        fg = _bits_index(f(g))
        for x in range(m):
            perm[G.index(g) * m + x] = G.index(g) * m + (fg ^ x)
    return perm


def build_oracle(f, theory, check=True):
    """U_f |g>|t> = |g>|f(g) xor t>."""
    t = parse_theory(theory)
    n, m = f.G.order, 2 ** f.n_bits
    U = Mat.permutation(t, oracle_permutation(f), d_in=n * m)
    if check:
        assert is_unitary(U), "oracle not unitary"
        # the decomposition goes through a |G|^2 |T| dimensional space
        if n * n * m <= 2 ** 12:
            assert U.equals(oracle_decomposition(f, t)), "oracle differs from its decomposition"
    return U


def oracle_decomposition(f, theory):
    """(id (x) m_xor) (id (x) F (x) id) (copy_G (x) id), F the classical map |g> -> |f(g)>."""
    t = parse_theory(theory)
    G = f.G
    n, m = G.order, 2 ** f.n_bits
    Zg = classical_structure(t, n)
    xor = group_structure(t, FinAbGroup((2,) * f.n_bits))
    F = Mat.zeros(t, m, n)
    for g in G.elements():
        F.data[_bits_index(f(g)), G.index(g)] = t.ones()
    I_G, I_T = Mat.identity(t, n), Mat.identity(t, m)
    return tensor(I_G, xor.mult) @ tensor(I_G, F, I_T) @ tensor(Zg.comult, I_T)


@dataclass
class HspOutcome:
    b: tuple
    chi: tuple
    weight: Scalar


def run_subroutine(f, theory, check=True):
    """Exact joint (b, chi) weights by state-vector evolution and Born rule.

    With check=False the oracle acts as the permutation it is, without
    building (and re-verifying) its matrix.
    """
    t = parse_theory(theory)
    G = f.G
    n, m = G.order, 2 ** f.n_bits
    cg = coherent_group(t, G)
    chars = classical_states_of_group_structure(cg, check=check)
    psi0 = tensor(cg.point.unit, Mat.basis(t, m, 0))
    if check:
        psi = build_oracle(f, t) @ psi0
    else:
        data = np.empty_like(psi0.data)
        data[oracle_permutation(f)] = psi0.data
        psi = Mat(t, data)
    # project the G register onto <chi_k|; the T register is read in the Z basis
    C = Mat(t, np.concatenate([dagger(c).data for c in chars], axis=0))
    amps = apply_local(C, psi, (n, m), 0)
    a = amps.data[:, 0]
    w = t.mul(t.involve(a), a)
    inv = t.invert(t.mul(t.from_int(n), t.from_int(n)))
    w = t.mul(w, inv)
    out = []
    for k in G.elements():
        for x in range(m):
            bits = tuple((x >> (f.n_bits - 1 - i)) & 1 for i in range(f.n_bits))
            out.append(HspOutcome(bits, k, Scalar(t, w[G.index(k) * m + x])))
    return out


def predicted(f, theory):
    """Closed form: |H|^2/|G|^2 on image(s) x Annih(H), zero elsewhere."""
    t = parse_theory(theory)
    G, H = f.G, f.H
    ann = annihilator(G, H)
    img = set(f.labels.values())
    val = Scalar.of(t, H.order * H.order) * Scalar(t, t.invert(t.from_int(G.order * G.order)))
    zero = Scalar.of(t, 0)
    return {(b, k): (val if (b in img and k in ann) else zero)
            for k in G.elements()
            for b in (tuple((x >> (f.n_bits - 1 - i)) & 1 for i in range(f.n_bits))
                      for x in range(2 ** f.n_bits))}


def theorem_residual(outcomes, f, theory):
    t = parse_theory(theory)
    pred = predicted(f, t)
    res, ok = 0.0, True
    for o in outcomes:
        p = pred[(o.b, o.chi)]
        res = max(res, t.residual(o.weight.v, p.v))
        ok &= o.weight == p
    return ok, res


def support(outcomes):
    t = outcomes[0].weight.theory
    return [(o.b, o.chi) for o in outcomes if not t.equal(o.weight.v, t.zeros())]


def sample_characters(outcomes, k, rng):
    """k samples of chi from the Born distribution (float weights)."""
    t = outcomes[0].weight.theory
    if t.name == "bool":
        raise ValueError("possibilistic weights cannot be sampled")
    p = np.array([t.to_float(o.weight.v) for o in outcomes])
    p = np.clip(p, 0, None)
    p /= p.sum()
    idx = rng.choice(len(outcomes), size=k, p=p)
    return [outcomes[i].chi for i in idx]


def reconstruct_subgroup(samples, G):
    return kernel(G, samples)


def default_samples(G):
    return 3 * math.ceil(math.log2(G.order)) if G.order > 1 else 1
