from fractions import Fraction

import pytest

from cqmkit.abgroup import EquationSystem, FinAbGroup
from cqmkit.contextuality import check_no_signalling, global_assignment, strong_contextuality
from cqmkit.frobenius import coherent_group, ghz
from cqmkit.matcat import Mat
from cqmkit.mermin import (BadN, NotRealizable, Unsolvable, _ghz_payload, analytic_model, avn_certificate,
                           avn_equations, block, build_argument, compare_models, contexts, decide_contextual,
                           default_N, quantum_model, scenario, simple)
from cqmkit.semiring import COMPLEX, finite_field


def test_block_assignment():
    assert block((3, 2), 5) == [0, 0, 0, 1, 1]
    assert block((1, 0, 2), 3) == [0, 2, 2]


def test_worked_example_contexts():
    arg = simple(4, 2, 5)
    ctxs = contexts(arg)
    assert len(ctxs) == 1 + 5
    assert ctxs[0] == (0,) * 5
    assert all(sum(c) == 2 for c in ctxs[1:])
    # rotations of 00011
    assert set(ctxs[1:]) == {tuple((0, 0, 0, 1, 1)[(j + k) % 5] for j in range(5)) for k in range(5)}


def test_zero_coefficient_gives_control_only():
    K = FinAbGroup((3,))
    arg = build_argument(K, EquationSystem.single(K, [0], 0), N=2)
    assert set(contexts(arg)) == {(0, 0)}


def test_errors():
    with pytest.raises(BadN):
        simple(4, 2, 4)  # gcd(4, 4) != 1
    with pytest.raises(BadN):
        simple(2, 4, 3)  # 4 parties needed
    K = FinAbGroup((2,))
    with pytest.raises(Unsolvable):
        build_argument(K, EquationSystem.single(K, [0], 1), N=3)
    with pytest.raises(NotRealizable):
        simple(2, 2, 3, theory="real")


def test_default_N():
    K = FinAbGroup((4,))
    assert default_N(K, EquationSystem.single(K, [2], 1)) == 3
    K6 = FinAbGroup((6,))
    assert default_N(K6, EquationSystem.single(K6, [3], 1)) == 5


def test_phases_over_f9():
    # the quarter-turn exists in F_9, so the Z2 argument is realizable there
    arg = simple(2, 2, 3, theory=finite_field(3, 1, 2))
    qm = quantum_model(arg, finite_field(3, 1, 2))
    ok, _ = compare_models(qm, analytic_model(arg), finite_field(3, 1, 2))
    assert ok


def test_ghz_payload_matches_comultiplication():
    cg = coherent_group(COMPLEX, "Z3")
    assert Mat(COMPLEX, _ghz_payload(COMPLEX, 3, 4)).equals(ghz(cg, 4))


@pytest.mark.parametrize("d,t,N,contextual", [(2, 2, 3, True), (4, 2, 5, True), (3, 2, 4, False),
                                              (2, 1, 3, False)])
def test_verdicts_and_quantum(d, t, N, contextual):
    arg = simple(d, t, N)
    dc = decide_contextual(arg)
    am = analytic_model(arg)
    assert dc["contextual"] == contextual
    assert strong_contextuality(am)[0] == contextual
    assert avn_certificate(arg, am)["avn"] == contextual
    if not contextual:
        assert dc["lhv_verified"]
    ok, res = compare_models(quantum_model(arg), am)
    assert ok and res < 1e-9
    assert check_no_signalling(am)["ok"]


def test_analytic_weights():
    arg = simple(4, 2, 5)
    am = analytic_model(arg)
    for tab in am.tables:
        assert len(tab) == 4 ** 4
        assert set(tab.values()) == {Fraction(1, 4 ** 4)}


def test_avn_equation_count():
    arg = simple(4, 2, 5)
    assert len(avn_equations(arg)) == 1 + arg.N * arg.S


def test_hierarchy_non_collapse():
    arg = simple(4, 2, 5)
    eqs = avn_equations(arg)
    sc = scenario(arg)
    assert global_assignment(sc, eqs, FinAbGroup((4,))) is None
    assert global_assignment(sc, eqs, FinAbGroup((3,))) is not None


def test_two_equation_system():
    K = FinAbGroup((2,))
    S = EquationSystem(2, (((1, 1), (1,)), ((2, 0), (0,))))
    arg = build_argument(K, S, N=3)
    assert len(contexts(arg)) == 1 + 2 * 3
    dc = decide_contextual(arg)
    assert dc["contextual"] is False and dc["lhv_verified"]
