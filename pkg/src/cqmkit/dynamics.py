"""Discrete-periodic dynamics over C: Z_T representations, ergodic projectors,
Stone reconstruction, Feynman clocks, internal and emergent clocks."""
from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .abgroup import FinAbGroup
from .frobenius import CoherentGroupData, FrobeniusData, coherent_group, verify_strong_complementarity, all_ok
from .matcat import Mat
from .semiring import COMPLEX, default_tol

TOL_PERIOD = 1e-8


class NotPeriodic(ValueError):
    pass


class IncompleteFamily(ValueError):
    pass


class NotCyclic(ValueError):
    pass


class DegenerateSpectrum(ValueError):
    pass


def _arr(M):
    return np.asarray(M.data if isinstance(M, Mat) else M, dtype=complex)


def chi(T, k, t):
    return np.exp(2j * np.pi * k * t / T)


@dataclass
class PeriodicRep:
    T: int
    U1: np.ndarray

    def __post_init__(self):
        self.U1 = _arr(self.U1)
        d = self.dim
        if self.U1.shape != (d, d):
            raise ValueError("U1 must be square")
        if not np.allclose(self.U1.conj().T @ self.U1, np.eye(d), atol=TOL_PERIOD):
            raise NotPeriodic("U1 is not unitary")
        if np.abs(np.linalg.matrix_power(self.U1, self.T) - np.eye(d)).max() > TOL_PERIOD:
            raise NotPeriodic(f"U1^{self.T} != id")

    @property
    def dim(self):
        return self.U1.shape[0]

    def U(self, t):
        return np.linalg.matrix_power(self.U1, t % self.T)

    def axioms_residual(self):
        """max |U_0 - id|, |U_{t+t'} - U_t U_t'|."""
        Us = [self.U(t) for t in range(self.T)]
        r = np.abs(Us[0] - np.eye(self.dim)).max()
        for a in range(self.T):
            for b in range(self.T):
                r = max(r, np.abs(Us[(a + b) % self.T] - Us[a] @ Us[b]).max())
        return float(r)

    def mat(self):
        return Mat(COMPLEX, self.U1)


def random_rep(T, dim, rng, levels=None):
    """Random eigenbasis with eigenvalues drawn from the T-th roots of unity."""
    V = unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.eye(1, dtype=complex)
    ks = rng.integers(0, T, size=dim) if levels is None else np.asarray(levels)
    return PeriodicRep(T, V @ np.diag(chi(T, ks, 1)) @ V.conj().T), V, ks


def ergodic_projectors(rep):
    """P_k = (1/T) sum_t chi_k(t)* U_t for every character k of Z_T."""
    T = rep.T
    Us = [rep.U(t) for t in range(T)]
    return {k: sum(np.conj(chi(T, k, t)) * Us[t] for t in range(T)) / T for k in range(T)}


def projector_family_residual(P):
    """Idempotent, self-adjoint, mutually orthogonal, summing to id."""
    ks = sorted(P)
    d = P[ks[0]].shape[0]
    r = np.abs(sum(P.values()) - np.eye(d)).max()
    for a in ks:
        r = max(r, np.abs(P[a] @ P[a] - P[a]).max(), np.abs(P[a].conj().T - P[a]).max())
        for b in ks:
            if a != b:
                r = max(r, np.abs(P[a] @ P[b]).max())
    return float(r)


def stone_reconstruct(P, T=None, tol=1e-9):
    """U_t = sum_k chi_k(t) P_k; returns the PeriodicRep."""
    P = {k: _arr(v) for k, v in P.items()}
    T = max(P) + 1 if T is None else T
    if projector_family_residual(P) > tol:
        raise IncompleteFamily("projectors are not a complete orthogonal family")
    U1 = sum(chi(T, k, 1) * Pk for k, Pk in P.items())
    return PeriodicRep(T, U1)


def energy_support(rep, tol=1e-9):
    return [k for k, Pk in ergodic_projectors(rep).items() if np.abs(Pk).max() > tol]


# Feynman clocks

@dataclass
class CyclicCircuit:
    T: int
    gates: list

    def __post_init__(self):
        self.gates = [_arr(g) for g in self.gates]
        if len(self.gates) != self.T:
            raise ValueError(f"{len(self.gates)} gates for T = {self.T}")

    @property
    def dim(self):
        return self.gates[0].shape[0]

    def product(self, start=0, steps=None):
        """U^(start+steps-1) ... U^(start)."""
        steps = self.T if steps is None else steps
        out = np.eye(self.dim, dtype=complex)
        for j in range(steps):
            out = self.gates[(start + j) % self.T] @ out
        return out

    def check(self, tol=TOL_PERIOD):
        for t in range(self.T):
            if np.abs(self.product(t) - np.eye(self.dim)).max() > tol:
                raise NotCyclic(f"circuit product starting at t={t} is not the identity")


def random_circuit(T, dim, rng):
    gates = [unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.exp(2j * np.pi * rng.random()) * np.eye(1)
             for _ in range(T - 1)]
    c = CyclicCircuit(T, gates + [np.eye(dim)])
    c.gates[-1] = c.product(0, T - 1).conj().T
    return c


def _clock_index(dim, T, i, t):
    return i * T + t


def propagator(circ, dt):
    """W_dt (|psi> (x) |t>) = (U^(t+dt-1) ... U^(t)) |psi> (x) |t + dt>, system (x) clock ordering."""
    T, d = circ.T, circ.dim
    W = np.zeros((d * T, d * T), dtype=complex)
    for t in range(T):
        G = circ.product(t, dt % T)
        s = (t + dt) % T
        W[s::T, t::T] = G
    return W


def feynman_propagator(circ, tol=1e-9):
    """One-step propagator W_1, verified as a Z_T representation on system (x) clock."""
    circ.check()
    T = circ.T
    W1 = propagator(circ, 1)
    rep = PeriodicRep(T, W1)
    checks = {"representation": rep.axioms_residual()}
    # the gate products behind W: empty product, composition, full cycle
    I = np.eye(circ.dim)
    r1 = max(np.abs(circ.product(t, 0) - I).max() for t in range(T))
    r2 = max(np.abs(circ.product((t + a) % T, b) @ circ.product(t, a) - circ.product(t, a + b)).max()
             for t in range(T) for a in range(T) for b in range(T))
    r3 = max(np.abs(circ.product(t, T) - I).max() for t in range(T))
    checks.update(empty_product=float(r1), composition=float(r2), full_cycle=float(r3))
    for t in range(T):
        checks["representation"] = max(checks["representation"],
                                       float(np.abs(propagator(circ, t) - rep.U(t)).max()))
    if max(checks.values()) > tol:
        raise NotCyclic(f"propagator checks failed: {checks}")
    return W1, checks


def history_state(circ, psi0):
    """sum_t psi_t (x) |t> with psi_{t+1} = U^(t) psi_t."""
    circ.check()
    T, d = circ.T, circ.dim
    psi = _arr(psi0).reshape(d)
    out = np.zeros((d, T), dtype=complex)
    for t in range(T):
        out[:, t] = psi
        psi = circ.gates[t] @ psi
    return out.reshape(d * T, 1)


def verify_feynman(circ, state, tol=1e-9):
    """The state is fixed by the propagator, i.e. lies in the trivial-energy eigenspace."""
    W1, _ = feynman_propagator(circ)
    s = _arr(state).reshape(-1, 1)
    P0 = ergodic_projectors(PeriodicRep(circ.T, W1))[0]
    r = max(np.abs(W1 @ s - s).max(), np.abs(P0 @ s - s).max())
    return bool(r <= tol * max(1.0, np.abs(s).max()))


# internal and emergent clocks

@dataclass
class InternalClock:
    T: int
    T_internal: int
    support: list
    basis: np.ndarray  # columns: normalised clock states |t'>, t' in Z_T'
    data: CoherentGroupData
    report: dict

    def q(self, t):
        return t % self.T_internal


def _transport(F, V):
    """Conjugate a Frobenius algebra by the unitary V: C^n -> rep space."""
    t = COMPLEX
    Vd = V.conj().T
    VV, VVd = np.kron(V, V), np.kron(Vd, Vd)
    m = V @ F.mult.data @ VVd
    u = V @ F.unit.data
    return FrobeniusData(t, F.dim, Mat(t, m), Mat(t, u), Mat(t, VV @ F.comult.data @ Vd),
                         Mat(t, F.counit.data @ Vd), F.normalization)


def internal_clock(rep, tol=1e-9):
    """Internal Z_T' clock when the energy support H is a subgroup of Z_T^; None otherwise."""
    T = rep.T
    P = ergodic_projectors(rep)
    H = [k for k in range(T) if np.abs(P[k]).max() > tol]
    for k in H:
        if np.linalg.matrix_rank(P[k], tol=1e-6) > 1:
            raise DegenerateSpectrum(f"energy level {k} has multiplicity > 1")
    Hs = set(H)
    if 0 not in Hs or any((a + b) % T not in Hs for a in H for b in H):
        return None
    Tp = len(H)
    step = T // Tp
    # eigenvectors psi_k, one per level
    psis = {}
    for k in H:
        w, v = np.linalg.eigh(P[k])
        psis[k] = v[:, -1]
    # |t'> = sum_{k in H} chi_k(t') psi_k / sqrt(T')
    V = np.zeros((rep.dim, Tp), dtype=complex)
    for tp in range(Tp):
        V[:, tp] = sum(chi(T, k, tp) * psis[k] for k in H) / np.sqrt(Tp)
    std = coherent_group(COMPLEX, FinAbGroup((Tp,)))
    cg = CoherentGroupData(_transport(std.point, V), _transport(std.group, V), std.underlying)
    report = {"strong_complementarity": verify_strong_complementarity(cg)}
    # U_t |t'> = |t' + q(t)>
    shift = lambda s: np.roll(np.eye(Tp), s, axis=0)
    r = max(np.abs(rep.U(t) @ V - V @ shift(t % Tp)).max() for t in range(T))
    report["intertwines"] = {"ok": bool(r <= tol), "residual": float(r)}
    report["unitary_basis"] = {"ok": bool(np.allclose(V.conj().T @ V, np.eye(Tp), atol=tol)),
                               "residual": float(np.abs(V.conj().T @ V - np.eye(Tp)).max())}
    assert all(k % step == 0 for k in H)
    return InternalClock(T, Tp, H, V, cg, report)


def internal_clock_ok(clock):
    rep = clock.report
    return all_ok(rep["strong_complementarity"]) and rep["intertwines"]["ok"] and rep["unitary_basis"]["ok"]


def emergent_clock(alpha, beta, chi_tot=0, tol=1e-9):
    """Projector P onto beta's levels in H + chi_tot and the Z_T' rep it carries.

    Returns (P, V) with V[t'] = sum_{j in Z_T'} chi_j(t') P_{j T/T' + chi_tot}, plus a check report.
    """
    clock = alpha if isinstance(alpha, InternalClock) else internal_clock(alpha, tol)
    if clock is None:
        raise ValueError("alpha has no internal clock")
    if beta.T != clock.T:
        raise ValueError("alpha and beta must share the external period")
    T, Tp = clock.T, clock.T_internal
    step = T // Tp
    Pb = ergodic_projectors(beta)
    levels = [(j, (j * step + chi_tot) % T) for j in range(Tp)]
    P = sum(Pb[k] for _, k in levels)
    V = [sum(np.exp(2j * np.pi * j * tp / Tp) * Pb[k] for j, k in levels) for tp in range(Tp)]
    rep = {}

    def put(name, r):
        rep[name] = {"ok": bool(r <= tol), "residual": float(r)}

    put("idempotent", np.abs(P @ P - P).max())
    put("self_adjoint", np.abs(P.conj().T - P).max())
    put("commutes", max(np.abs(P @ beta.U(t) - beta.U(t) @ P).max() for t in range(T)))
    put("unit", np.abs(V[0] - P).max())
    put("composition", max(np.abs(P @ V[a] @ P @ V[b] @ P - V[(a + b) % Tp]).max()
                           for a in range(Tp) for b in range(Tp)))
    put("unitary_on_range", max(np.abs(P @ V[a].conj().T @ V[a] @ P - P).max() for a in range(Tp)))
    put("intertwines", max(np.abs(beta.U(t) @ P - chi(T, chi_tot, t) * V[t % Tp]).max() for t in range(T)))
    return P, V, rep
