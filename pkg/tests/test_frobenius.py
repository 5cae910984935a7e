import itertools

import numpy as np
import pytest

from cqmkit.abgroup import FinAbGroup
from cqmkit.frobenius import (NotAPhase, NotEnoughPhases, NotRealizable, PhaseState, all_ok, antipode,
                              classical_states_of_group_structure, coherent_group, full_report, ghz,
                              ghz_with_gates, ghz_with_phases, perturbed_group_structure, translation,
                              verify_laws, verify_strong_complementarity, verify_weak_uncertainty,
                              verify_weyl_ccr)
from cqmkit.matcat import Mat, dagger
from cqmkit.semiring import BOOL, COMPLEX, PARITY, REAL, SPLITC, Scalar, finite_field

F9 = finite_field(3, 1, 2)
THEORIES = [COMPLEX, REAL, BOOL, SPLITC, F9]
GROUPS = ["Z2", "Z3", "Z4", "Z2xZ2", "Z6"]


@pytest.mark.parametrize("t", THEORIES, ids=lambda t: t.name)
@pytest.mark.parametrize("G", GROUPS)
def test_law_suite(t, G):
    try:
        cg = coherent_group(t, G)
    except NotRealizable:
        # |G| not invertible: only F9 with 3 | |G|
        assert t is F9 and FinAbGroup.parse(G).order % 3 == 0
        return
    rep = full_report(cg)
    for part in rep.values():
        assert all_ok(part), part


def test_parity_realizes_only_odd_groups():
    with pytest.raises(NotRealizable):
        coherent_group(PARITY, "Z2")
    assert all_ok(verify_strong_complementarity(coherent_group(PARITY, "Z3")))


def test_antipode_is_negation():
    cg = coherent_group(COMPLEX, "Z2xZ4")
    G = cg.underlying
    S = antipode(cg)
    for g in G.elements():
        assert (S @ Mat.basis(COMPLEX, G.order, G.index(g))).equals(
            Mat.basis(COMPLEX, G.order, G.index(G.neg(g))))


def test_perturbed_structure_fails_strong_complementarity():
    cg = perturbed_group_structure(coherent_group(COMPLEX, "Z4"))
    rep = verify_strong_complementarity(cg)
    assert not rep["bialgebra"]["ok"]
    # the perturbed X is still a Frobenius algebra, so the failure is the interaction
    assert all_ok(verify_laws(cg.group))


@pytest.mark.parametrize("t,G", [(COMPLEX, "Z6"), (COMPLEX, "Z2xZ2"), (F9, "Z4"), (REAL, "Z2")])
def test_characters_and_weyl(t, G):
    cg = coherent_group(t, G)
    chars = classical_states_of_group_structure(cg)
    assert len(chars) == cg.underlying.order
    assert verify_weyl_ccr(cg)["ok"]
    assert verify_weak_uncertainty(cg)["ok"]


@pytest.mark.parametrize("t,G", [(BOOL, "Z3"), (REAL, "Z4"), (REAL, "Z3")])
def test_not_enough_phases(t, G):
    with pytest.raises(NotEnoughPhases):
        classical_states_of_group_structure(coherent_group(t, G))


def test_translation_is_regular_shift():
    # U_g from the group structure equals the cyclic shift matrix
    cg = coherent_group(COMPLEX, "Z5")
    for g in range(5):
        shift = np.roll(np.eye(5), g, axis=0)
        assert np.allclose(translation(cg, (g,)).data, shift)


def test_phase_state_rejects_non_phase():
    with pytest.raises(NotAPhase):
        PhaseState(COMPLEX, [Scalar.of(COMPLEX, 2)])


@pytest.mark.parametrize("N", [2, 3, 4])
def test_ghz_phase_gates_commute_with_copying(N, rng):
    cg = coherent_group(COMPLEX, "Z3")
    ps = [PhaseState.from_exponents(COMPLEX, [0, rng.integers(0, 6) / 6, rng.integers(0, 6) / 6])
          for _ in range(2)]
    assert ghz_with_phases(cg, N, ps).equals(ghz_with_gates(cg, N, ps))
    state = ghz(cg, N)
    for idx in itertools.product(range(3), repeat=N):
        flat = int(np.ravel_multi_index(idx, (3,) * N))
        want = 1 if len(set(idx)) == 1 else 0
        assert state[flat, 0] == Scalar.of(COMPLEX, want)
