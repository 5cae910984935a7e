import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cqmkit.matcat import (IncompleteBasis, Mat, NonInvertibleNorm, NotApplicable, apply_local,
                           born_distribution, check_basis, check_purification_counterexample, dagger,
                           hyperbolic_example, inner, is_unitary, tensor)
from cqmkit.semiring import BOOL, COMPLEX, SPLITC, TROPICAL, Scalar, finite_field

THEORIES = [COMPLEX, SPLITC, BOOL, finite_field(3, 1, 2)]


def rand(t, rng, r, c):
    return Mat(t, t.random(rng, (r, c)))


@pytest.mark.parametrize("t", THEORIES, ids=lambda t: t.name)
@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 31))
def test_dagger_tensor_laws(t, seed):
    rng = np.random.default_rng(seed)
    A, B, C = rand(t, rng, 2, 3), rand(t, rng, 3, 2), rand(t, rng, 2, 2)
    assert dagger(dagger(A)).equals(A)
    assert dagger(A @ B).equals(dagger(B) @ dagger(A))
    assert dagger(tensor(A, C)).equals(tensor(dagger(A), dagger(C)))
    # interchange law
    D = rand(t, rng, 2, 2)
    assert (tensor(A, C) @ tensor(B, D)).equals(tensor(A @ B, C @ D))


@pytest.mark.parametrize("t", THEORIES, ids=lambda t: t.name)
def test_apply_local_matches_kron(t, rng):
    M = rand(t, rng, 3, 3)
    psi = rand(t, rng, 2 * 3 * 2, 1)
    I2 = Mat.identity(t, 2)
    assert apply_local(M, psi, (2, 3, 2), 1).equals(tensor(I2, M, I2) @ psi)


def test_permutation_is_unitary():
    P = Mat.permutation(COMPLEX, [2, 0, 1])
    assert is_unitary(P)
    assert P[2, 0] == Scalar.of(COMPLEX, 1)


def test_born_rule_complex(rng):
    psi = Mat.column(COMPLEX, np.array([1, 1j]) / np.sqrt(2))
    basis = [Mat.basis(COMPLEX, 2, 0), Mat.basis(COMPLEX, 2, 1)]
    d = born_distribution(psi, basis, [Scalar.of(COMPLEX, 1)] * 2)
    assert abs(d.weights[0].v - 0.5) < 1e-12 and abs(d.weights[1].v - 0.5) < 1e-12


def test_incomplete_basis_rejected():
    with pytest.raises(IncompleteBasis):
        check_basis([Mat.basis(COMPLEX, 2, 0)], [Scalar.of(COMPLEX, 1)])
    with pytest.raises(IncompleteBasis):
        b = Mat.from_ints(COMPLEX, [[1], [1]])
        check_basis([b, Mat.basis(COMPLEX, 2, 0)], [Scalar.of(COMPLEX, 2), Scalar.of(COMPLEX, 1)])


def test_non_invertible_norm():
    F2 = finite_field(3, 1, 2)
    basis = [Mat.basis(F2, 2, 0), Mat.basis(F2, 2, 1)]
    with pytest.raises(NonInvertibleNorm):
        check_basis(basis, [Scalar.of(F2, 3), Scalar.of(F2, 1)])


def test_hyperbolic_uncertainty_failure():
    _, Z, X = hyperbolic_example()
    assert abs(SPLITC.to_float(Z.weights[0].v) - 1) < 1e-12
    assert np.abs(Z.weights[1].v).max() < 1e-12
    assert abs(SPLITC.to_float(X.weights[0].v) - 1) < 1e-12
    assert np.abs(X.weights[1].v).max() < 1e-12


@pytest.mark.parametrize("t", [BOOL, TROPICAL], ids=lambda t: t.name)
@pytest.mark.parametrize("n", [2, 3])
def test_purification_counterexample(t, n):
    r = check_purification_counterexample(t, n)
    assert r["discard_identity"] and r["no_product_decomposition"]


def test_purification_not_applicable_to_complex():
    with pytest.raises(NotApplicable):
        check_purification_counterexample(COMPLEX, 2)


def test_json_roundtrip_shape():
    j = Mat.identity(finite_field(3, 1, 2), 2).to_json()
    assert j["rows"] == 2 and len(j["entries"]) == 2
