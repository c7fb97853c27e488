import numpy as np
import pytest

from fouralg.algebra import (
    Algebra,
    abelian,
    algebra_report,
    derived_algebra,
    dim2_A1,
    dim2_A2,
    example33,
    find_isomorphism,
    heisenberg,
    is_algebra_morphism,
    is_commutative,
    is_four_algebra,
    is_metabelian,
    is_module,
    linearized_identities,
    linearized_identities_batch,
    linearized_identities_by_callback,
    met,
    transport,
)
from fouralg.errors import NotSymmetric, ShapeError, UnsupportedOverRationals
from fouralg.exactfield import Field, Matrix

from oracles import four_algebra_by_evaluation, identities_by_evaluation

F5 = Field.Fp(5)
Q = Field.Q()


@pytest.mark.parametrize("build", [
    lambda F: abelian(3, F), dim2_A1, dim2_A2, lambda F: heisenberg(1, F), lambda F: heisenberg(2, F),
    lambda F: example33(1, F), lambda F: example33(3, F),
])
@pytest.mark.parametrize("F", [Q, F5])
def test_builders_are_four_algebras(build, F):
    A = build(F)
    assert is_four_algebra(A)
    assert all(linearized_identities(A).values())


def test_heisenberg_shape():
    h = heisenberg(1, Q)
    assert h.dim == 3 and h.labels == ("e1", "f1", "z")
    assert h.mul(h.basis_vector(0), h.basis_vector(1)).tolist() == [0, 0, 1]
    assert derived_algebra(h).dim == 1 and is_metabelian(h)


def test_non_four_algebra_witness():
    A = Algebra.from_products(F5, 2, {(0, 0): {1: 1}, (1, 1): {0: 1}})
    chk = is_four_algebra(A)
    assert not chk
    assert chk.witness == ("square", (0, 0, 0, 0))
    assert not four_algebra_by_evaluation(A.c, 5)


def test_non_commutative_witness():
    c = F5.zeros((2, 2, 2))
    c[0, 1, 1] = 1
    chk = is_four_algebra(Algebra(F5, c))
    assert chk.witness == ("commutative", (0, 1, 1))
    assert not is_commutative(Algebra(F5, c))


def test_rejects_bad_shapes():
    with pytest.raises(ShapeError):
        Algebra(F5, F5.zeros((2, 2, 3)))
    with pytest.raises(NotSymmetric):
        met(1, 2, [[[0]], [[0]]], [[[0], [1]], [[0], [0]]])


def test_idempotent_is_not_four():
    A = Algebra.from_products(Q, 1, {(0, 0): {0: 1}})
    assert not is_four_algebra(A)


def test_random_tables_agree_with_evaluation():
    rng = np.random.default_rng(1)
    seen_true = 0
    for _ in range(200):
        n = int(rng.integers(1, 4))
        c = rng.integers(0, 5, size=(n, n, n)) * (rng.random((n, n, n)) < 0.25)
        c = (c + np.swapaxes(c, 0, 1)) % 5
        ok = is_four_algebra(Algebra(F5, c)).ok
        seen_true += ok
        assert ok == four_algebra_by_evaluation(c, 5)
    assert seen_true > 10


def test_identity_routes_agree_with_evaluation():
    rng = np.random.default_rng(2)
    for _ in range(15):
        c = rng.integers(0, 5, size=(2, 2, 2))
        c = (c + np.swapaxes(c, 0, 1)) % 5
        A = Algebra(F5, c)
        cb = {k: v.ok for k, v in linearized_identities_by_callback(A).items()}
        tb = {k: bool(v) for k, v in linearized_identities_batch(F5, A.c).items()}
        assert cb == tb == identities_by_evaluation(c, 5)
        assert linearized_identities(A) == linearized_identities_by_callback(A)


def test_isomorphism_search_and_transport():
    A = dim2_A1(F5)
    P = F5.array([[1, 2], [3, 2]])
    B = Algebra(F5, transport(A, P))
    phi = find_isomorphism(B, A)
    assert phi is not None and phi.is_invertible() and is_algebra_morphism(B, A, phi)
    assert find_isomorphism(dim2_A1(F5), dim2_A2(F5)) is None
    with pytest.raises(UnsupportedOverRationals):
        find_isomorphism(dim2_A1(Q), dim2_A1(Q))


def test_morphism_checks():
    A = dim2_A1(Q)
    assert is_algebra_morphism(A, A, Matrix.identity(Q, 2))
    assert not is_algebra_morphism(A, A, Matrix.from_rows(Q, [[2, 0], [0, 2]]))
    # e1 -> 2e1, e2 -> 4e2 is an automorphism of e1^2 = e2
    assert is_algebra_morphism(A, A, Matrix.from_rows(Q, [[2, 0], [0, 4]]))


def test_modules():
    A = dim2_A1(Q)
    # e2 = e1^2 must act as zero on a module once e1 > (e1 > x) ... squares vanish
    act = Q.zeros((2, 1, 1))
    assert is_module(A, 1, act)
    act[1, 0, 0] = 1
    assert not is_module(A, 1, act)
    with pytest.raises(ShapeError):
        is_module(A, 2, act)


def test_met_builder():
    # Met_1^1 with f_1 > e_1 = 0 and f(f_1, f_1) = e_1 is A_1 in the basis (e_1, f_1)
    E = met(1, 1, [[[0]]], [[[1]]], F5)
    assert is_four_algebra(E)
    assert find_isomorphism(E, dim2_A1(F5)) is not None


def test_report():
    rep = algebra_report(heisenberg(1, Q))
    assert rep["is_four_algebra"] and rep["derived_dim"] == 1 and rep["metabelian"]
    assert all(rep["linearized_identities"].values())
    assert algebra_report(Algebra.from_products(Q, 1, {(0, 0): {0: 1}}))["witness"] == [0, 0, 0, 0]
