import random

import pytest

from ainfmassey import models
from ainfmassey.ainfty_core import module_over_itself
from ainfmassey.exact_linear import FieldSpec
from ainfmassey.massey import (StairContext, TriangularSystem, closedness_check, compositions,
                               enumerate_defining_systems, is_defining_system, iter_defining_systems,
                               massey_set, module_massey_set, perturb_defining_system,
                               push_defining_system, staircase_product)
from ainfmassey.polys import InfiniteEnumerationError
from oracles import brute_minimal_massey, circle_points


def _as_vecs(ms):
    return {tuple(sorted(v.items())) for v in ms.as_vectors()}


def test_compositions_count_is_two_to_the_gaps():
    # splittings of 1..5 into at least two pieces: 2^4 - 1
    assert len(compositions(1, 5, 10)) == 15
    assert len(compositions(1, 5, 2)) == 4


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("name,diag", [
    ("ex_2_9", ["b2", "b4", "b8", "b16"]),
    ("ex_2_10", ["b2", "b4", "b8", "b16", "b32"]),
    ("a3_example", ["b2", "b4", "b8", "b16"]),
])
def test_minimal_examples_match_brute_force(p, name, diag):
    A = models.example_library(name, p)
    assert _as_vecs(massey_set(A, diag)) == brute_minimal_massey(A, diag)


def test_ex_2_9_dichotomy():
    b31 = 9
    assert _as_vecs(massey_set(models.ex_2_9(FieldSpec.gf(3)), ["b2", "b4", "b8", "b16"])) == \
        {((b31, 1),), ((b31, 2),)}
    ms5 = massey_set(models.ex_2_9(FieldSpec.gf(5)), ["b2", "b4", "b8", "b16"])
    assert ms5.contains_zero and ms5.trivial


def test_circle_is_a_circle():
    names = [f"b{2 ** i}" for i in range(1, 10)]
    for p in (3, 5):
        A = models.circle_example(FieldSpec.gf(p))
        ms = massey_set(A, names)
        b, bt = A.space.index("b1023"), A.space.index("bt1023")
        pts = {(v.get(b, 0), v.get(bt, 0)) for v in ms.as_vectors()}
        assert len(pts) == circle_points(p)
        assert all((c1 * c1 + c4 * c4) % p == 1 for c1, c4 in pts)
        assert _as_vecs(ms) == brute_minimal_massey(A, names)


def test_lens_minimal_p_fold():
    for p in (3, 5):
        A = models.lens_minimal_algebra(p)
        y = A.space.index("y")
        for c in range(1, p):
            ms = massey_set(A, [{"x": c}] * p)
            assert ms.as_vectors() == [{y: c}]


def test_two_inputs_are_rejected():
    A = models.lens_minimal_algebra(3)
    with pytest.raises(ValueError, match="n = 2"):
        massey_set(A, ["x", "x"])


def test_zero_class_is_rejected():
    A = models.lens_minimal_algebra(3)
    with pytest.raises(ValueError):
        massey_set(A, [{"x": 0}, "x", "x"])


def test_free_choice_over_rationals_is_refused():
    from ainfmassey.cdga_cyclic import free_cdga
    A = free_cdga(FieldSpec.rationals(), [("e", 1), ("f", 1)]).algebra
    # the off-diagonal entries range over all of H^1 = Q e + Q f
    with pytest.raises(InfiniteEnumerationError):
        massey_set(A, ["e", "e", "e"])


def _random_systems(A, diag, rng, k, ctx=None, M=None, mpos=None):
    sym = enumerate_defining_systems(A, diag, M=M, mpos=mpos, ctx=ctx)
    allsys = list(iter_defining_systems(sym))
    return [rng.choice(allsys) for _ in range(k)] if allsys else []


def test_staircase_of_defining_systems_is_closed():
    rng = random.Random(7)
    L = models.four_link()
    ctx = StairContext(L.B, split_A=L.splitting)
    count = 0
    cases = [(models.lens_minimal_algebra(3), ["x", "x", "x"], None),
             (models.a3_example(FieldSpec.gf(3)), ["b2", "b4", "b8", "b16"], None),
             (L.B, ["a", "m", "b"], ctx), (L.B, ["m", "b", "n"], ctx)]
    for A, names, c in cases:
        ctx_ = c or StairContext(A)
        vecs = [A.space.vec(n) for n in names]
        for sysx in _random_systems(A, vecs, rng, 10, ctx=ctx_):
            assert is_defining_system(sysx, ctx_).ok
            assert closedness_check(sysx, ctx_)
            count += 1
    assert count >= 30


def test_perturbation_keeps_the_class():
    rng = random.Random(3)
    base = models.hopf(FieldSpec.gf(5)).base
    A, S, F = base.algebra, base.space, base.field
    ctx = StairContext(A)
    split = ctx.split_A
    diag = [S.vec("x"), S.vec("x"), S.vec("x")]
    done = 0
    for sysx in _random_systems(A, diag, rng, 10, ctx=ctx):
        before = split.f(staircase_product(sysx, ctx, 1, 3))
        for kl in [(1, 1), (2, 2), (3, 3), (1, 2), (2, 3)]:
            cands = S.in_degree(sysx.degree(*kl) - 1)
            if not cands:
                continue
            z = {rng.choice(cands): F(rng.randrange(1, 5))}
            new = perturb_defining_system(sysx, ctx, kl, z)
            assert is_defining_system(new, ctx).ok
            assert split.f(staircase_product(new, ctx, 1, 3)) == before
            done += 1
    assert done >= 20


def test_corner_cannot_be_perturbed():
    A = models.lens_minimal_algebra(3)
    sysx = massey_set(A, ["x", "x", "x"]).witnesses[(1,)]
    with pytest.raises(ValueError):
        perturb_defining_system(sysx, StairContext(A), (1, 3), {0: 1})


def test_triangular_system_degrees():
    s = TriangularSystem(3, {}, (2, 3, 2))
    assert s.shdeg(1, 3) == 4 and s.degree(1, 2) == 4


def test_hopf_module_massey():
    H = models.hopf()
    ms = module_massey_set(H.module, ["x", "x", "1"], mpos=3)
    z = H.module.space.index("z")
    assert ms.as_vectors() == [{z: 1}]
    assert ms.meta["variables"] == 0 and len(ms.witnesses) == 1


def test_module_massey_requires_slot():
    A = models.lens_minimal_algebra(3)
    with pytest.raises(ValueError):
        module_massey_set(module_over_itself(A), ["x", "x", "x"])


def test_pushforward_along_identity():
    from ainfmassey.ainfty_core import AInftyMorphism
    A = models.a3_example(FieldSpec.gf(5))
    ms = massey_set(A, ["b2", "b4", "b8", "b16"])
    sysx = next(iter(ms.witnesses.values()))
    pushed = push_defining_system(AInftyMorphism.identity(A), sysx)
    assert is_defining_system(pushed, A).ok
