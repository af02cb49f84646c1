import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ainfmassey import models
from ainfmassey.ainfty_core import (AInftyAlgebra, AInftyMorphism, algebra_from_names, check_ainfty,
                                    check_coalgebra, check_module, check_morphism, codualize_algebra,
                                    compose_morphisms, dualize_coalgebra, module_over_itself,
                                    shift_op, shift_sign, stasheff_defect)
from ainfmassey.exact_linear import FieldSpec, GradedBasisSpace

GF3 = FieldSpec.gf(3)


def test_shift_sign_small_cases():
    # mu_2: (-1)^{|a1|}, mu_3: (-1)^{2|a1| + |a2|}
    assert shift_sign([1, 0]) == -1
    assert shift_sign([0, 5]) == 1
    assert shift_sign([3, 1, 7]) == -1
    assert shift_sign([4]) == 1


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-3, 4), min_size=1, max_size=6))
def test_shift_sign_matches_formula(shdegs):
    k = len(shdegs)
    e = sum(d * (k - 1 - i) for i, d in enumerate(shdegs))
    assert shift_sign(shdegs) == (-1) ** (e % 2)


def test_shift_op_is_an_involution():
    A = models.lens_minimal_algebra(5)
    for tab in A.mu.values():
        assert shift_op(A.field, shift_op(A.field, tab, A.space), A.space) == tab


def test_associative_product_passes_only_after_shift():
    # the exterior algebra on e, f of degree 1, written with plain products
    F = FieldSpec.rationals()
    S = GradedBasisSpace.build(F, [("1", 0), ("e", 1), ("f", 1), ("ef", 2)])
    plain = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (0, 2): {2: 1}, (2, 0): {2: 1},
             (0, 3): {3: 1}, (3, 0): {3: 1}, (1, 2): {3: 1}, (2, 1): {3: -1}}
    assert check_ainfty(AInftyAlgebra(S, {2: shift_op(F, plain, S)})).ok
    assert not check_ainfty(AInftyAlgebra(S, {2: plain})).ok


def test_planted_stasheff_failure_is_reported():
    A = models.lens_minimal_algebra(3)
    mu2 = {k: dict(v) for k, v in A.mu[2].items()}
    x, y, z = (A.space.index(n) for n in "xyz")
    mu2[(x, y)] = {z: 2}
    bad = AInftyAlgebra(A.space, {2: mu2, 3: A.mu[3]})
    res = check_ainfty(bad)
    assert not res.ok and res.witnesses


def test_degree_homogeneity_is_enforced():
    F = GF3
    S = GradedBasisSpace.build(F, [("a", 1), ("b", 2)])
    with pytest.raises(ValueError):
        AInftyAlgebra(S, {2: {(0, 0): {0: 1}}})


@pytest.mark.parametrize("name", ["ex_2_9", "ex_2_10", "circle", "a3_example"])
def test_example_algebras_satisfy_stasheff(name):
    for p in (3, 5):
        assert check_ainfty(models.example_library(name, p)).ok


def test_stasheff_n3_is_associativity_for_strict_products():
    A = models.four_link().B
    assert stasheff_defect(A, 3) == {}


def test_identity_morphism_and_composition():
    A = models.a3_example(GF3)
    i = AInftyMorphism.identity(A)
    assert check_morphism(i).ok
    assert check_morphism(compose_morphisms(i, i)).ok


def test_broken_morphism_fails():
    A = models.a3_example(GF3)
    i = AInftyMorphism.identity(A)
    b2 = A.space.index("b2")
    f1 = {k: dict(v) for k, v in i.f[1].items()}
    f1[(b2,)] = {b2: 2}
    assert not check_morphism(AInftyMorphism(A, A, {1: f1})).ok


def test_algebra_over_itself_is_a_module():
    for A in (models.lens_minimal_algebra(3), models.four_link().B, models.a3_example(GF3)):
        assert check_module(module_over_itself(A)).ok


def test_lens_minimal_coalgebra_and_its_dual():
    for p in (3, 5, 7):
        C = models.lens_minimal_coalgebra(p)
        assert check_coalgebra(C).ok
        A = dualize_coalgebra(C, ["e", "x", "y", "z"])
        assert check_ainfty(A).ok
        back = codualize_algebra(A)
        assert back.delta == C.delta


def test_dual_sign_gives_plus_y_for_the_p_fold_product():
    A = models.lens_minimal_algebra(5)
    x, y = A.space.index("x"), A.space.index("y")
    assert A.mu[5][(x,) * 5] == {y: 1}


def test_algebra_from_names_accumulates():
    A = algebra_from_names(GF3, [("a", 1), ("b", 2)], {2: {("a", "a"): {"b": 2}}})
    assert A.mu[2] == {(0, 0): {1: 2}}
