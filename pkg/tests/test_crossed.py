import itertools

import numpy as np
import pytest

from fouralg.algebra import (
    Algebra,
    abelian,
    dim2_A1,
    dim2_A2,
    find_isomorphism,
    heisenberg,
    is_algebra_morphism,
    is_four_algebra,
)
from fouralg.crossed import (
    CrossedSystem,
    ExtensionData,
    OneDimExtPair,
    canonical_projection,
    canonical_section,
    crossed_product,
    decompose,
    derived_quotient_extension,
    extension_from_projection,
    is_split,
    one_dim_extension,
    oracle_agrees,
    semidirect_product,
    split_sections,
    twisted_product,
    validate_batch,
    validate_crossed_system,
    verify_reconstruction,
)
from fouralg.errors import InvalidCrossedSystem, NotAbelianBase, NotMorphism, NotSection, ShapeError
from fouralg.exactfield import Field, Matrix

from oracles import crossed_table_by_loops

F5 = Field.Fp(5)
Q = Field.Q()


def grid_11():
    A = abelian(1, F5)
    for g, f, v in itertools.product(range(5), repeat=3):
        yield CrossedSystem(A, 1, [[[g]]], [[[f]]], [[[v]]])


def test_zero_system_validates_and_gives_abelian():
    cs = CrossedSystem(abelian(1, Q), 1)
    assert validate_crossed_system(cs).ok
    assert crossed_product(cs) == abelian(2, Q)


def test_cs1_failure_on_idempotent_multV():
    cs = CrossedSystem(abelian(1, F5), 1, None, None, [[[1]]])
    rep = validate_crossed_system(cs)
    assert rep.failed() == ["cs1"]
    assert rep.cs1.witness[0] == "multV_four"
    with pytest.raises(InvalidCrossedSystem):
        crossed_product(cs)


def test_shape_errors():
    with pytest.raises(ShapeError):
        CrossedSystem(abelian(1, F5), 2, F5.zeros((1, 1, 1)))


def test_grid_oracle_exhaustive():
    assert all(oracle_agrees(cs) for cs in grid_11())


def test_grid_validity_set():
    """In dim 1 multV = 0 is forced and then every (g, f) is valid."""
    ok = {(int(cs.act[0, 0, 0]), int(cs.f[0, 0, 0]), int(cs.multV[0, 0, 0])) for cs in grid_11()
          if validate_crossed_system(cs).ok}
    assert all(v == 0 for _, _, v in ok)
    assert len(ok) == 25


def test_product_table_matches_definition():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n, m = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        A = abelian(n, F5)
        act = rng.integers(0, 5, (n, m, m))
        f = rng.integers(0, 5, (n, n, m))
        f = (f + np.swapaxes(f, 0, 1)) % 5
        mV = rng.integers(0, 5, (m, m, m))
        mV = (mV + np.swapaxes(mV, 0, 1)) % 5
        cs = CrossedSystem(A, m, act, f, mV)
        prod = crossed_product(cs, validate=False)
        assert np.array_equal(prod.c, crossed_table_by_loops(A.c, act, f, mV, 5))


def test_batch_validation_agrees():
    A = dim2_A1(F5)
    rng = np.random.default_rng(6)
    act = rng.integers(0, 5, (40, 2, 1, 1)) * (rng.random((40, 2, 1, 1)) < 0.5)
    f = rng.integers(0, 5, (40, 2, 2, 1))
    f = (f + np.swapaxes(f, 1, 2)) % 5
    mV = np.zeros((40, 1, 1, 1), dtype=np.int64)
    mask = validate_batch(F5, A.c, act, f, mV)
    for k in range(40):
        assert mask[k] == validate_crossed_system(CrossedSystem(A, 1, act[k], f[k], mV[k])).ok


def test_f_squared_gives_A1():
    cs = CrossedSystem(abelian(1, F5), 1, None, [[[1]]], None)
    E = crossed_product(cs)
    assert find_isomorphism(E, dim2_A1(F5)) is not None
    tw = twisted_product(abelian(1, F5), 1, None, [[[1]]])
    assert tw == E


def test_twisted_product_rejects_non_abelian_base():
    with pytest.raises(NotAbelianBase):
        twisted_product(abelian(1, F5), dim2_A1(F5), None, None)


def test_semidirect_products():
    assert semidirect_product(abelian(1, Q), abelian(2, Q), None) == abelian(3, Q)
    E = semidirect_product(dim2_A2(F5), abelian(1, F5), None)
    assert E.dim == 3 and is_four_algebra(E)
    cs = CrossedSystem(dim2_A2(F5), 1)
    assert canonical_section(cs) in split_sections(cs)


def test_split_sections():
    zero = CrossedSystem(abelian(1, F5), 1)
    assert len(split_sections(zero)) == 5
    twisted = CrossedSystem(abelian(1, F5), 1, None, [[[1]]], None)
    assert split_sections(twisted) == [] and not is_split(twisted)


def test_decompose_A1_along_derived_quotient():
    ext = derived_quotient_extension(dim2_A1(Q))
    cs = decompose(ext)
    assert cs.A.dim == 1 and cs.v_dim == 1
    assert cs.f[0, 0].tolist() == [1]
    assert not np.any(cs.act) and not np.any(cs.multV)


def test_decompose_h3():
    ext = derived_quotient_extension(heisenberg(1, Q))
    cs = decompose(ext)
    assert cs.A == abelian(2, Q)
    assert not np.any(cs.act) and not np.any(cs.multV)
    assert cs.f[0, 1].tolist() == [1] and cs.f[0, 0].tolist() == [0]
    rep = verify_reconstruction(ext, cs)
    assert all(rep.values())


def test_round_trip_exact():
    rng = np.random.default_rng(7)
    A = dim2_A2(F5)
    for _ in range(20):
        act = rng.integers(0, 5, (2, 1, 1))
        f = rng.integers(0, 5, (2, 2, 1))
        f = (f + np.swapaxes(f, 0, 1)) % 5
        cs = CrossedSystem(A, 1, act, f, None)
        if not validate_crossed_system(cs).ok:
            continue
        E = crossed_product(cs)
        ext = ExtensionData(E, A, canonical_projection(cs), canonical_section(cs))
        assert decompose(ext) == cs


def test_semidirect_decomposes_with_zero_cocycle():
    A = dim2_A2(F5)
    cs = CrossedSystem(A, 1)
    E = crossed_product(cs)
    back = decompose(ExtensionData(E, A, canonical_projection(cs), canonical_section(cs)))
    assert not np.any(back.f)


def test_extension_errors():
    E = dim2_A1(Q)
    with pytest.raises(NotMorphism):
        # projecting onto e2 is not multiplicative
        extension_from_projection(E, Matrix.from_rows(Q, [[0, 1]]), Matrix.from_rows(Q, [[0], [1]]))
    pi = Matrix.from_rows(Q, [[1, 0]])
    with pytest.raises(NotSection):
        extension_from_projection(E, pi, Matrix.from_rows(Q, [[2], [0]]))
    ext = extension_from_projection(E, pi)
    assert all(verify_reconstruction(ext, decompose(ext)).values())


def test_non_coordinate_section():
    E = heisenberg(1, F5)
    ext = derived_quotient_extension(E)
    s2 = Matrix(F5, F5.reduce(ext.s.data + np.array([[0, 0], [0, 0], [3, 1]])))
    ext2 = ExtensionData(E, ext.A, ext.pi, s2)
    assert all(verify_reconstruction(ext2, decompose(ext2)).values())


@pytest.mark.parametrize("F, xi, expect", [
    ([1], [[0]], "A1"), ([0], [[1]], "A2"), ([0], [[0]], "abelian"),
])
def test_one_dim_extensions(F, xi, expect):
    pair = OneDimExtPair(abelian(1, F5), F5.array(F), Matrix.from_rows(F5, xi))
    assert pair.check() == {"square_form": True, "linear_form": True}
    E = one_dim_extension(pair)
    target = {"A1": dim2_A1(F5), "A2": dim2_A2(F5), "abelian": abelian(2, F5)}[expect]
    assert find_isomorphism(E, target) is not None
    assert E == twisted_product(abelian(1, F5), 1, pair.crossed_system().act, pair.crossed_system().f)


def test_pair_readings_can_differ():
    """On V = A_2 with F = e_2: x^2 F = 0 for all x but e_1 F = e_2."""
    pair = OneDimExtPair(dim2_A2(F5), F5.array([0, 1]), Matrix.zero(F5, 2, 2))
    assert pair.check() == {"square_form": True, "linear_form": False}
    assert validate_crossed_system(pair.crossed_system()).ok
    bad = OneDimExtPair(dim2_A1(F5), F5.array([1, 0]), Matrix.zero(F5, 2, 2))
    assert bad.check()["square_form"] is False
    assert not validate_crossed_system(bad.crossed_system()).ok


def test_reconstruction_morphism_is_checked():
    ext = derived_quotient_extension(dim2_A2(Q))
    cs = decompose(ext)
    phi = ext.reconstruction_map()
    assert is_algebra_morphism(crossed_product(cs), ext.E, phi)
