import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cqmkit.abgroup import FinAbGroup
from cqmkit.contextuality import (EmpiricalModel, Equation, InvalidTheory, NoSolution, Scenario,
                                  avn_check, check_no_signalling, equations_hold, expand_mixture,
                                  global_assignment, probabilistic_lhv, signed_global_section,
                                  strong_contextuality, strong_contextuality_linear,
                                  strong_contextuality_search, tables_equal)

Z2 = FinAbGroup((2,))
O = [(0,), (1,)]


def mermin_z2():
    """XXX, XYY, YXY, YYX with parity constraints, written out by hand."""
    contexts = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]
    rhs = [0, 1, 1, 1]
    tables = []
    for r in rhs:
        tables.append({o: Fraction(1, 4) for o in itertools.product(O, repeat=3)
                       if sum(x[0] for x in o) % 2 == r})
    return EmpiricalModel(Scenario(3, [2, 2, 2], Z2, contexts), tables), rhs


def pr_box():
    contexts = [(0, 0), (0, 1), (1, 0), (1, 1)]
    tables = []
    for a, b in contexts:
        tables.append({o: Fraction(1, 2) for o in itertools.product(O, repeat=2)
                       if (o[0][0] + o[1][0]) % 2 == a * b})
    return EmpiricalModel(Scenario(2, [2, 2], Z2, contexts), tables)


def tsirelson():
    """Optimal CHSH correlations: contextual but not strongly contextual."""
    contexts = [(0, 0), (0, 1), (1, 0), (1, 1)]
    p = (2 + np.sqrt(2)) / 8
    tables = []
    for a, b in contexts:
        tab = {}
        for o in itertools.product(O, repeat=2):
            agree = (o[0][0] + o[1][0]) % 2 == a * b
            tab[o] = p if agree else 0.25 - p
        tables.append(tab)
    return EmpiricalModel(Scenario(2, [2, 2], Z2, contexts), tables)


def product_model():
    """Independent fair coins per measurement: local."""
    contexts = [(0, 0), (0, 1), (1, 0), (1, 1)]
    tables = [{o: Fraction(1, 4) for o in itertools.product(O, repeat=2)} for _ in contexts]
    return EmpiricalModel(Scenario(2, [2, 2], Z2, contexts), tables)


def test_mermin_by_hand():
    em, rhs = mermin_z2()
    assert check_no_signalling(em)["ok"]
    assert probabilistic_lhv(em) is None
    assert strong_contextuality_search(em)[0]
    assert strong_contextuality_linear(em)[0]
    eqs = [Equation(c, (1, 1, 1), (r,)) for c, r in enumerate(rhs)]
    out = avn_check(em, eqs)
    assert out["avn"] and out["assignment"] is None


def test_pr_box_strong_and_signed():
    em = pr_box()
    assert check_no_signalling(em)["ok"]
    assert strong_contextuality(em)[0]
    sec = signed_global_section(em)
    assert any(v < 0 for v in sec.values())
    assert tables_equal(expand_mixture(em.scenario, sec), em.tables, 1e-9)


def test_tsirelson_contextual_not_strong():
    em = tsirelson()
    assert check_no_signalling(em)["ok"]
    assert probabilistic_lhv(em) is None
    strong, witness = strong_contextuality(em)
    assert not strong and witness is not None


def test_local_model_exact_mixture():
    em = product_model()
    mix = probabilistic_lhv(em)
    assert mix is not None
    assert all(isinstance(v, Fraction) for v in mix.values())
    assert sum(mix.values()) == 1
    assert tables_equal(expand_mixture(em.scenario, mix), em.tables)


def test_signalling_model_detected():
    em = product_model()
    # Bob's marginal for choice 0 depends on Alice's choice
    em.tables[0] = {((0,), (0,)): Fraction(1, 2), ((1,), (0,)): Fraction(1, 2)}
    r = check_no_signalling(em)
    assert not r["ok"] and r["violations"]
    with pytest.raises(NoSolution):
        signed_global_section(em)


def test_avn_rejects_invalid_equations():
    em, _ = mermin_z2()
    with pytest.raises(InvalidTheory):
        avn_check(em, [Equation(1, (1, 1, 1), (0,))])


def test_json_roundtrip():
    em, _ = mermin_z2()
    back = EmpiricalModel.from_json(em.to_json())
    assert back.scenario.contexts == em.scenario.contexts
    assert tables_equal(back.tables, em.tables)


def test_scenario_coverage():
    with pytest.raises(ValueError):
        Scenario(2, [2, 3], Z2, [(0, 0), (1, 1)])


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.data())
def test_linear_and_search_assignments_agree(d, data):
    K = FinAbGroup((d,))
    contexts = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]
    sc = Scenario(3, [2, 2, 2], K, contexts)
    eqs = [Equation(c, tuple(data.draw(st.integers(0, 3)) for _ in range(3)), (data.draw(st.integers(0, d - 1)),))
           for c in range(len(contexts))]
    lin = global_assignment(sc, eqs, K)
    srch = global_assignment(sc, eqs, K, method="search")
    assert (lin is None) == (srch is None)
    for sol in (lin, srch):
        if sol is not None:
            assert equations_hold(sc, eqs, K, sol)
