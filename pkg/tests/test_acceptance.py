"""The eleven acceptance criteria; each prints one PASS/FAIL line.

Run with pytest (lines appear in the 'acceptance' summary section) or
directly with ``python3 tests/test_acceptance.py``.
"""

import random
import time

from click.testing import CliRunner

from ainfmassey import models
from ainfmassey.ainfty_core import check_ainfty, check_morphism, module_over_itself
from ainfmassey.cdga_cyclic import DualEvaluator, cyclic_massey_set, evaluated_inner_set
from ainfmassey.cli import cli
from ainfmassey.exact_linear import FieldSpec
from ainfmassey.fileformat import parse_report
from ainfmassey.inner_products import (_concrete_cyclic, check_inner_product, cyclic_symbolic,
                                       formality_witness_check, induced_module_morphism,
                                       is_cyclic_defining_system, massey_inner_set, perturb_cyclic,
                                       pullback_inner, staircase_inner_product, strict_pairing)
from ainfmassey.massey import (StairContext, closedness_check, enumerate_defining_systems,
                               is_defining_system, massey_set,
                               module_massey_set, perturb_defining_system, staircase_product)
from ainfmassey.models import lens_chain_complex, lens_obstruction, lens_solution_failures, solve_r_morphism
from ainfmassey.transfer import TransferData, transfer, transferred_massey_equality_check
from conftest import ACCEPTANCE_LINES
from oracles import brute_minimal_massey, circle_points, residue_table
from randgen import random_assignment, square_zero_dga, valid_exterior_choices


def verdict(n, ok, note=""):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}" + (f"  {note}" if note else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def _vecs(ms):
    return {tuple(sorted(v.items())) for v in ms.as_vectors()}


def test_criterion_1_lens_p_fold():
    runner = CliRunner()
    ok, slowest = True, 0.0
    for p in (3, 5):
        for q in range(1, p):
            t0 = time.time()
            text = runner.invoke(cli, ["model", "lens", "--p", str(p), "--q", str(q), "--minimal"]).output
            with runner.isolated_filesystem():
                open("lens.txt", "w").write(text)
                for c in range(1, p):
                    out = runner.invoke(cli, ["massey", "lens.txt", "--classes", ",".join([f"x:{c}"] * p)])
                    rep = parse_report(out.output)
                    ok &= out.exit_code == 0 and rep.fields["h_slice"] == "y" and rep.elements == [str(c)]
            slowest = max(slowest, time.time() - t0)
    ok &= slowest < 10
    assert verdict(1, ok, f"slowest (p,q) {slowest:.2f}s")


def test_criterion_2_appendix_solver():
    t0 = time.time()
    ok = True
    for p, q in ((3, 1), (3, 2), (5, 2)):
        sol = solve_r_morphism(lens_chain_complex(p, q), N=p + 4)
        ok &= lens_solution_failures(sol) == []
        ok &= sol.cconst == q and sol.y[p] == p - 1
        ok &= all(v == 0 for n, v in sol.z_sums().items() if 2 <= n <= sol.N)
        ok &= sol.r.check().ok
    dt = time.time() - t0
    assert verdict(2, ok and dt < 60, f"{dt:.2f}s")


def test_criterion_3_ex_2_9_dichotomy():
    diag = ["b2", "b4", "b8", "b16"]
    A3, A5 = models.ex_2_9(FieldSpec.gf(3)), models.ex_2_9(FieldSpec.gf(5))
    b31 = A3.space.index("b31")
    m3, m5 = massey_set(A3, diag), massey_set(A5, diag)
    ok = _vecs(m3) == {((b31, 1),), ((b31, 2),)} and not m3.trivial
    ok &= m5.contains_zero
    ok &= _vecs(m3) == brute_minimal_massey(A3, diag) and _vecs(m5) == brute_minimal_massey(A5, diag)
    assert verdict(3, ok, "matches brute-force oracle")


def test_criterion_4_ex_2_10():
    diag = ["b2", "b4", "b8", "b16", "b32"]
    A3, A5 = models.ex_2_10(FieldSpec.gf(3)), models.ex_2_10(FieldSpec.gf(5))
    b63 = A5.space.index("b63")
    ok = massey_set(A3, diag).empty and massey_set(A5, diag).as_vectors() == [{b63: 1}]
    assert verdict(4, ok)


def test_criterion_5_circle():
    names = [f"b{2 ** i}" for i in range(1, 10)]
    ok, sizes = True, []
    for p in (3, 5, 7):
        A = models.circle_example(FieldSpec.gf(p))
        ms = massey_set(A, names)
        b, bt = A.space.index("b1023"), A.space.index("bt1023")
        pts = {(v.get(b, 0), v.get(bt, 0)) for v in ms.as_vectors()}
        want = {(c1, c4) for c1 in range(p) for c4 in range(p) if (c1 * c1 + c4 * c4) % p == 1}
        ok &= pts == want and len(pts) == circle_points(p) and len(ms.elements) == len(pts)
        sizes.append(len(pts))
    assert verdict(5, ok, "sizes " + "/".join(map(str, sizes)))


def test_criterion_6_a3():
    ok = True
    for p in (3, 5):
        A = models.a3_example(FieldSpec.gf(p))
        b31 = A.space.index("b31")
        ok &= massey_set(A, ["b2", "b4", "b8", "b16"]).as_vectors() == [{b31: p - 1}]
    assert verdict(6, ok)


def test_criterion_7_filiform_as_stated():
    # the stated coefficient is +2; the computation gives -2
    ok = True
    for p in (3, 5):
        F = FieldSpec.gf(p)
        C = models.filiform(F)
        ms = cyclic_massey_set(C, ["e1", "e1", "e1", "e2"], (1, 1))
        ok &= ms.elements == [(F(2), F(c)) for c in range(p)]
        ok &= evaluated_inner_set(C, DualEvaluator(C.algebra, {"e1e4": 1}),
                                  ["e1", "e1", "e1", "e2"], (1, 1)).elements == [F(2)]
    assert verdict(7, ok, "stated +2[e1e4]; computed -2[e1e4], see notes/decisions.md")


def test_criterion_7_filiform_sign_corrected():
    ok = True
    for p in (3, 5):
        F = FieldSpec.gf(p)
        C = models.filiform(F)
        ms = cyclic_massey_set(C, ["e1", "e1", "e1", "e2"], (1, 1))
        ok &= ms.elements == [(F(-2), F(c)) for c in range(p)] and not ms.contains_zero
        ok &= evaluated_inner_set(C, DualEvaluator(C.algebra, {"e1e4": 1}),
                                  ["e1", "e1", "e1", "e2"], (1, 1)).elements == [F(-2)]
    assert verdict("7*", ok, "with -2 in place of 2")


def test_criterion_8_four_link():
    t0 = time.time()
    L = models.four_link()
    data = TransferData(L.B, L.splitting)
    ok = massey_set(L.B, ["a", "m", "b", "n"], ctx=StairContext(L.B, split_A=L.splitting)).empty
    res = transfer(data)
    ok &= massey_set(res.A, ["a", "m", "b", "n"]).empty
    M = module_over_itself(L.B)
    I = strict_pairing(M, L.evaluator)
    Ip = pullback_inner(res.k, induced_module_morphism(res.k), I)
    ok &= check_inner_product(Ip).ok
    ok &= massey_inner_set(Ip, ["a", "m", "b", "n"], (1, 1)).elements == [1]
    ctx = StairContext(L.B, M, split_A=L.splitting, split_M=L.splitting)
    ok &= massey_inner_set(I, ["a", "m", "b", "n"], (1, 1), ctx=ctx).elements == [1]
    for classes in (["a", "m", "b", "n"], ["a", "m", "b"], ["m", "b", "n"]):
        ok &= transferred_massey_equality_check(data, classes, result=res).equal
    dt = time.time() - t0
    assert verdict(8, ok and dt < 30, f"{dt:.2f}s, evaluator dual to [t]")


def test_criterion_9_hopf_module():
    H = models.hopf()
    ms = module_massey_set(H.module, ["x", "x", "1"], mpos=3)
    z = H.module.space.index("z")
    ok = ms.as_vectors() == [{z: 1}] and ms.meta["variables"] == 0 and len(ms.witnesses) == 1
    assert verdict(9, ok, f"truncation {H.truncation}")


def _closedness(rng):
    L = models.four_link()
    cases = [(models.lens_minimal_algebra(3), ["x", "x", "x"], None),
             (models.lens_minimal_algebra(5), ["x"] * 5, None),
             (models.a3_example(FieldSpec.gf(3)), ["b2", "b4", "b8", "b16"], None),
             (models.ex_2_9(FieldSpec.gf(5)), ["b2", "b4", "b8", "b16"], None),
             (L.B, ["a", "m", "b"], StairContext(L.B, split_A=L.splitting)),
             (L.B, ["m", "b", "n"], StairContext(L.B, split_A=L.splitting)),
             (models.hopf(FieldSpec.gf(5)).base.algebra, ["x", "x", "x"], None)]
    count, ok = 0, True
    for A, names, ctx in cases:
        ctx = ctx or StairContext(A)
        sym = enumerate_defining_systems(A, [A.space.vec(n) for n in names], ctx=ctx)
        for s in (sym.concrete(sym.grids[0], random_assignment(sym, rng)) for _ in range(20)):
            ok &= is_defining_system(s, ctx).ok and closedness_check(s, ctx)
            count += 1
    return ok and count >= 100, count


def _class_perturbations(rng):
    base = models.hopf(FieldSpec.gf(5)).base
    A, S, F = base.algebra, base.space, base.field
    ctx = StairContext(A)
    sym = enumerate_defining_systems(A, [S.vec("x")] * 3, ctx=ctx)
    count, ok = 0, True
    while count < 100:
        s = sym.concrete(sym.grids[0], random_assignment(sym, rng))
        kl = rng.choice([(1, 1), (2, 2), (3, 3), (1, 2), (2, 3)])
        cands = S.in_degree(s.degree(*kl) - 1)
        if not cands:
            continue
        new = perturb_defining_system(s, ctx, kl, {rng.choice(cands): F(rng.randrange(1, 5))})
        ok &= is_defining_system(new, ctx).ok
        ok &= ctx.split_A.f(staircase_product(new, ctx, 1, 3)) == ctx.split_A.f(staircase_product(s, ctx, 1, 3))
        count += 1
    return ok, count


def _inner_perturbations(rng):
    C = models.filiform(FieldSpec.gf(3))
    A = C.algebra
    M = module_over_itself(A)
    I = strict_pairing(M, {A.space.index("e1e4"): 1})
    ctx = StairContext(A, M)
    sym = cyclic_symbolic(ctx, ["e1", "e1", "e1", "e2"], 1, 1)
    gx, gxp = sym.grids
    count, ok = 0, True
    while count < 100:
        cs = _concrete_cyclic(sym, gx, gxp, 1, 1, random_assignment(sym, rng))
        grid = rng.choice(["x", "xp"])
        g = cs.x if grid == "x" else cs.xp
        i = rng.randrange(1, g.n + 1)
        j = rng.randrange(i, g.n + 1)
        cands = A.space.in_degree(g.degree(i, j) - 1)
        if (i, j) == (1, g.n) or not cands:
            continue
        new = perturb_cyclic(cs, ctx, grid, (i, j), {rng.choice(cands): A.field(rng.randrange(1, 3))})
        ok &= is_cyclic_defining_system(new, ctx)[0]
        ok &= staircase_inner_product(I, new) == staircase_inner_product(I, cs)
        count += 1
    return ok, count


def _transfers(rng):
    F = FieldSpec.gf(3)
    from randgen import exterior_dga
    algs = [exterior_dga(F, c) for c in rng.sample(valid_exterior_choices(F), 12)]
    while len(algs) < 24:
        dims = [rng.randrange(0, 3) for _ in range(3)]
        if sum(dims) + 1 <= 8:
            algs.append(square_zero_dga(F, dims, [rng.randrange(3) for _ in range(6)]))
    ok = True
    for A in algs:
        res = transfer(A)
        ok &= check_ainfty(res.A).ok and check_morphism(res.k).ok
    return ok, len(algs)


def _exact(rng):
    from test_inner_products import _random_exact
    C = models.filiform(FieldSpec.gf(3))
    M = module_over_itself(C.algebra)
    I = strict_pairing(M, {C.algebra.space.index("e1e4"): 1})
    ok = True
    for _ in range(6):
        J = _random_exact(M, I.degree - 1, rng)
        s = massey_inner_set(J, ["e1", "e1", "e1", "e2"], (1, 1))
        ok &= check_inner_product(J).ok and not s.empty and set(s.elements) <= {0}
    return ok


def _formal():
    import itertools
    from ainfmassey.ainfty_core import AInftyAlgebra, shift_op
    from ainfmassey.exact_linear import GradedBasisSpace
    F = FieldSpec.gf(3)
    S = GradedBasisSpace.build(F, [("1", 0), ("a", 2), ("b", 2), ("ab", 4)])
    plain = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (0, 2): {2: 1}, (2, 0): {2: 1},
             (0, 3): {3: 1}, (3, 0): {3: 1}, (1, 2): {3: 1}, (2, 1): {3: 1}}
    A = AInftyAlgebra(S, {2: shift_op(F, plain, S)})
    I = strict_pairing(module_over_itself(A), {3: 1})
    # every degree-admissible input: the pairing lands in total degree 4
    queries = []
    for n in (3, 4):
        for combo in itertools.product(["a", "b"], repeat=n):
            for k in range(n - 1):
                queries.append((list(combo), (k, n - 2 - k)))
    rep = formality_witness_check(I, queries)
    return rep.strict and rep.all_trivial


def test_criterion_10_property_suites():
    rng = random.Random(2024)
    a, na = _closedness(rng)
    b1, nb1 = _class_perturbations(rng)
    b2, nb2 = _inner_perturbations(rng)
    c, nc = _transfers(rng)
    d = _exact(rng)
    e = _formal()
    ok = a and b1 and b2 and c and d and e
    assert verdict(10, ok, f"a:{na} b:{nb1}+{nb2} c:{nc} d:{d} e:{e}")


def test_criterion_11_obstruction():
    ok = True
    primes = [3, 5, 7, 11, 13]
    for p in primes:
        for (q, r), want in residue_table(p).items():
            ok &= lens_obstruction(p, q, r) == want
    assert verdict(11, ok, "p in " + ",".join(map(str, primes)))


if __name__ == "__main__":
    import sys
    fails = 0
    tests = [(n, f) for n, f in globals().items() if n.startswith("test_criterion")]
    for _, fn in sorted(tests, key=lambda t: (int(t[0].split("_")[2]), t[0])):
        try:
            fn()
        except AssertionError:
            fails += 1
    sys.exit(1 if fails else 0)
