import pytest

from ainfmassey import models
from ainfmassey.ainfty_core import AInftyCoalgebra, check_coalgebra
from ainfmassey.exact_linear import FieldSpec
from ainfmassey.models import (TruncatedCoalgebraMorphism, g_series, lens_chain_complex,
                               lens_obstruction, lens_obstruction_witness,
                               lens_quasi_isomorphism_check, lens_solution_failures,
                               solve_r_morphism, solve_s_morphism)
from oracles import poly_series_mul, residue_table

PQ = [(3, 1), (3, 2), (5, 1), (5, 2), (5, 3), (7, 3)]


@pytest.mark.parametrize("p,q", PQ)
def test_lens_chains_square_to_zero_and_have_lens_homology(p, q):
    L = lens_chain_complex(p, q)
    assert check_coalgebra(L.C).ok
    assert L.homology().ranks() == {0: 1, 1: 1, 2: 1, 3: 1}


def test_literal_coproduct_of_b_is_not_a_coalgebra():
    L = lens_chain_complex(5, 2)
    S = L.C.space
    B, b = S.index("B"), S.index("b")
    delta = {k: {c: dict(v) for c, v in t.items()} for k, t in L.C.delta.items()}
    # B (x) b + B (x) b, shifted
    delta[2][b] = {(B, b): S.field(-2)}
    bad = AInftyCoalgebra(S, delta, max_arity=2)
    assert not check_coalgebra(bad).ok


def test_lens_parameters_are_checked():
    with pytest.raises(ValueError):
        lens_chain_complex(4, 1)
    with pytest.raises(ValueError):
        lens_chain_complex(5, 5)


def test_g_series_identity():
    # -g_1 - x + x g_1 = -x^p mod p
    for p in (3, 5, 7, 11):
        N = p + 3
        g = [0] * (N + 1)
        for i, v in g_series(p, 1, N).items():
            g[i] = v
        xg = poly_series_mul([0, 1], g, N)
        lhs = [(-g[i] - (1 if i == 1 else 0) + xg[i]) % p for i in range(N + 1)]
        want = [(-1 if i == p else 0) % p for i in range(N + 1)]
        assert lhs == want


@pytest.mark.parametrize("p,q", PQ)
def test_r_solve_and_s_solve_give_a_quasi_isomorphism(p, q):
    L = lens_chain_complex(p, q)
    sol = solve_r_morphism(L, N=p + 3)
    assert lens_solution_failures(sol) == []
    assert sol.cconst == q % p
    assert sol.y[p] == p - 1
    assert all(sol.y.get(d, 0) == 0 for d in range(1, p))
    s = solve_s_morphism(sol.theta, p, sol.N)
    assert lens_quasi_isomorphism_check(L, sol, s)


def test_perturbed_r_fails_the_morphism_check():
    L = lens_chain_complex(5, 2)
    sol = solve_r_morphism(L, N=7)
    comps = {c: dict(w) for c, w in sol.r.components.items()}
    a = L.gen("a")
    X = models.X
    comps[a][(X, X)] = L.C.field(comps[a].get((X, X), 0) + 1)
    bad = TruncatedCoalgebraMorphism(L.C, sol.theta, comps, sol.N)
    assert not bad.check().ok


def test_planted_y_term_gives_v_coefficient():
    p, N = 5, 8
    F = FieldSpec.gf(p)
    theta = models._theta(F, p, N, {p: -1, p + 1: 1}, {(1, 0): 1, (0, 1): -1})
    assert check_coalgebra(theta, bound=N).ok
    s = solve_s_morphism(theta, p, N)
    Y, X = models.Y, models.X
    assert s.components[Y][(Y, X)] == F(-1)


def test_s_solve_refuses_bad_hypotheses():
    p, N = 5, 6
    F = FieldSpec.gf(p)
    theta = models._theta(F, p, N, {p: -1}, {(1, 0): 1, (0, 1): -1, (2, 0): 1})
    with pytest.raises(ValueError):
        solve_s_morphism(theta, p, N)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_obstruction_matches_residue_table(p):
    table = residue_table(p)
    for (q, r), want in table.items():
        assert lens_obstruction(p, q, r) == want
        n = lens_obstruction_witness(p, q, r)
        if want:
            assert (n * n - q * r) % p == 0 or (n * n + q * r) % p == 0
        else:
            assert n is None


def test_obstruction_small_cases():
    assert not lens_obstruction(5, 1, 2)
    assert lens_obstruction(5, 1, 4)
    assert lens_obstruction_witness(5, 1, 4) == 1
    with pytest.raises(ValueError):
        lens_obstruction(9, 1, 2)


def test_hopf_bundle():
    H = models.hopf()
    assert models.validate_example(H)
    assert not H.base.validate() and not H.total.validate()


def test_four_link_ranks():
    L = models.four_link()
    r = L.splitting.ranks()
    assert r == {1: 4, 2: 4}
    assert models.validate_example(L)


@pytest.mark.parametrize("name", models.LIBRARY + ("lens",))
def test_library_examples_validate(name):
    assert models.validate_example(models.example_library(name, 3))


def test_unknown_example_name():
    with pytest.raises(KeyError, match="unknown example"):
        models.example_library("torus")
