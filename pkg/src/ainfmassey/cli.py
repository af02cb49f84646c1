"""Command line surface: ``ainfmassey <command> ...``.

Exit codes: 0 pass, 1 computation or verification failure, 2 usage or
parse error.  Failures print one line ``error: <code> <text>`` to stderr.
"""

from __future__ import annotations

import sys

import click

from . import models
from .ainfty_core import (AInftyAlgebra, check_ainfty, check_coalgebra, check_module,
                          check_morphism, module_over_itself)
from .exact_linear import LinearMap, cohomology_splitting
from .fileformat import (ParseError, ResultReport, StructureBundle, StructureError, digest,
                         emit_structure, load_structure, parse_terms, system_entries,
                         system_header)


class CliFailure(Exception):
    def __init__(self, code: str, text: str, status: int = 1):
        super().__init__(text)
        self.code, self.text, self.status = code, text, status


def _fail(code, text, status=1):
    raise CliFailure(code, text, status)


def _load(path) -> StructureBundle:
    try:
        return load_structure(path)
    except OSError as e:
        _fail("io", str(e), 2)
    except ParseError as e:
        _fail("parse", str(e), 2)
    except StructureError as e:
        _fail(f"check:{e.check}", str(e), 1)


def _need_algebra(b: StructureBundle) -> AInftyAlgebra:
    if b.algebra is None:
        _fail("usage", "this command needs an algebra (mu ops), not a coalgebra", 2)
    return b.algebra


def _parse_classes(F, text: str) -> list:
    """'x,x:2,t+u' -> [{'x': 1}, {'x': 2}, {'t': 1, 'u': 1}]."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            _fail("usage", "empty class in --classes", 2)
        vec = parse_terms(F, tok.split("+"), 0)
        if not vec:
            _fail("usage", f"class {tok!r} is zero", 2)
        out.append(vec)
    return out


def _shape(text: str) -> tuple:
    try:
        k, l = (int(x) for x in text.split(","))
    except ValueError:
        _fail("usage", f"--shape must be 'k,l', got {text!r}", 2)
    return k, l


def _truncate(A: AInftyAlgebra, K: int | None) -> AInftyAlgebra:
    if K is None:
        return A
    mu = {k: t for k, t in A.mu.items() if k <= K}
    return AInftyAlgebra(A.space, mu, max_arity=K, complete=A.complete and K >= A.max_arity,
                         name=A.name)


def _common_fields(b, query):
    top = b.algebra if b.algebra is not None else b.coalgebra
    return {"query": query, "field": str(b.field), "digest": digest(b),
            "truncation": top.max_arity if not top.complete else "none"}


def _set_report(kind, b, query, ms, S_alg, S_mod=None, grids=("x",)) -> ResultReport:
    H = ms.h_space
    r = ResultReport(kind, _common_fields(b, query))
    r.fields["h_basis"] = " ".join(f"{n}:{d}" for n, d in zip(H.names, H.degrees))
    r.fields["h_slice"] = " ".join(H.names[t] for t in ms.h_indices) or "-"
    _flags(r, ms, contains_zero=ms.contains_zero)
    for k, v in ms.meta.items():
        r.fields[f"meta.{k}"] = v
    for i, e in enumerate(ms.elements):
        r.elements.append(" ".join(H.field.fmt(c) for c in e) or "-")
        _witness(r, i, ms.witnesses[e], S_alg, S_mod)
    return r


def _scalar_report(kind, b, query, ss, S_alg, S_mod) -> ResultReport:
    r = ResultReport(kind, _common_fields(b, query))
    _flags(r, ss, contains_zero=0 in ss.elements)
    for k, v in ss.meta.items():
        r.fields[f"meta.{k}"] = v
    for i, e in enumerate(ss.elements):
        r.elements.append(b.field.fmt(e))
        _witness(r, i, ss.witnesses[e], S_alg, S_mod)
    return r


def _flags(r, s, contains_zero):
    r.fields["count"] = len(s.elements)
    r.fields["empty"] = str(s.empty).lower()
    r.fields["contains_zero"] = str(bool(contains_zero)).lower()
    r.fields["trivial"] = str(s.empty or bool(contains_zero)).lower()


def _witness(r, i, sys, S_alg, S_mod):
    if hasattr(sys, "xp"):
        r.witnesses.append((i, f"cyclic k={sys.k} l={sys.l} | x {system_header(sys.x)} | "
                               f"xp {system_header(sys.xp)}",
                            system_entries(sys.x, S_alg, S_mod, "x")
                            + system_entries(sys.xp, S_alg, S_mod, "xp")))
    else:
        r.witnesses.append((i, system_header(sys), system_entries(sys, S_alg, S_mod)))


def _emit_report(r: ResultReport):
    click.echo(r.text(), nl=False)


# ---------------------------------------------------------------- commands

@click.group()
def cli():
    """Exact A-infinity structures, transfer and Massey product sets."""


@cli.command()
@click.argument("path")
def verify(path):
    """Run every structure check that applies to the file."""
    b = _load(path)
    checks = []
    if b.algebra is not None:
        checks.append(("stasheff", check_ainfty(b.algebra).ok))
        if b.meta.get("commutative", "").lower() in ("yes", "true"):
            from .cdga_cyclic import CommutativeDGA
            checks.append(("commutativity", not CommutativeDGA(b.algebra, (), ()).validate()))
    if b.coalgebra is not None:
        checks.append(("coassociativity", check_coalgebra(b.coalgebra).ok))
    if b.module is not None:
        checks.append(("module", check_module(b.module).ok))
    if b.morphism is not None:
        checks.append(("target_stasheff", check_ainfty(b.target).ok))
        checks.append(("morphism", check_morphism(b.morphism).ok))
    if b.inner is not None:
        from .inner_products import check_inner_product
        checks.append(("inner_product", check_inner_product(b.inner).ok))
    for name, ok in checks:
        click.echo(f"check {name} {'pass' if ok else 'fail'}")
    click.echo(f"digest {digest(b)}")
    bad = [n for n, ok in checks if not ok]
    if bad:
        _fail(f"check:{bad[0]}", f"structure check failed: {', '.join(bad)}")


@cli.command()
@click.argument("path")
def cohomology(path):
    """Ranks per degree and a chosen basis of representatives."""
    b = _load(path)
    if b.algebra is not None:
        d = b.algebra.differential()
    else:
        S = b.coalgebra.space
        cols = [{} for _ in range(S.dim)]
        for c, words in b.coalgebra.delta.get(1, {}).items():
            cols[c] = {w[0]: x for w, x in words.items()}
        d = LinearMap(S, S, -1, cols)
    try:
        split = cohomology_splitting(d)
    except ValueError as e:
        _fail("check:differential", str(e))
    H = split.h_space
    for deg, r in sorted(split.ranks().items()):
        click.echo(f"rank {deg} {r}")
    for t, name in enumerate(H.names):
        click.echo(f"class {name} {H.degrees[t]} {d.source.fmt(split.g.columns[t])}")


@cli.command()
@click.argument("path")
@click.option("--max-arity", type=int, default=None, help="Highest transferred arity.")
def transfer(path, max_arity):
    """Emit the transferred minimal structure with the morphism k into the input."""
    from .transfer import transfer as run_transfer
    b = _load(path)
    A = _need_algebra(b)
    res = run_transfer(A, max_arity)
    checks = res.checks()
    out = StructureBundle(b.field, algebra=res.A, target=A, morphism=res.k,
                          meta={"name": "transferred", "source_digest": digest(b)})
    click.echo(emit_structure(out), nl=False)
    if not all(checks.values()):
        _fail("check:transfer", f"transferred structure fails {checks}")


@cli.command()
@click.argument("path")
@click.option("--classes", required=True, help="Comma separated classes, e.g. x,x,x or x:2,y.")
@click.option("--max-arity", type=int, default=None, help="Use only mu_k with k <= K.")
@click.option("--full-coset", is_flag=True, help="Also vary the corner representatives.")
def massey(path, classes, max_arity, full_coset):
    """The Massey product set of the given cohomology classes."""
    from .massey import massey_set
    b = _load(path)
    A = _truncate(_need_algebra(b), max_arity)
    cl = _parse_classes(b.field, classes)
    ms = _run(lambda: massey_set(A, cl, full_coset=full_coset))
    _emit_report(_set_report("massey", b, f"massey {classes}", ms, A.space))


@cli.command("massey-module")
@click.argument("path")
@click.option("--classes", required=True)
@click.option("--mpos", type=int, default=None, help="1-based module slot; inferred when unique.")
def massey_module(path, classes, mpos):
    """Massey set with one module slot."""
    from .massey import StairContext, module_massey_set
    b = _load(path)
    A = _need_algebra(b)
    M = b.module or module_over_itself(A)
    ctx = StairContext(A, M)
    cl = _parse_classes(b.field, classes)
    if mpos is None:
        HA, HM = ctx.split_A.h_space.names, ctx.split_M.h_space.names
        only = [t for t, c in enumerate(cl, 1) if all(n in HM and n not in HA for n in c)]
        if len(only) != 1:
            _fail("usage", "cannot infer the module slot; pass --mpos", 2)
        mpos = only[0]
    ms = _run(lambda: module_massey_set(M, cl, mpos=mpos, ctx=ctx))
    _emit_report(_set_report("massey-module", b, f"massey-module {classes} mpos={mpos}", ms,
                             A.space, M.space))


@cli.command("massey-inner")
@click.argument("path")
@click.option("--shape", required=True, help="k,l")
@click.option("--classes", required=True)
@click.option("--eval", "evaluator", default=None,
              help="Closed functional for the strict pairing: a meta alias or terms t:1,u:1.")
@click.option("--transferred", is_flag=True, help="Pull the inner product back to the minimal model.")
def massey_inner(path, shape, classes, evaluator, transferred):
    """The Massey inner product set of shape (k,l)."""
    from .inner_products import (induced_module_morphism, massey_inner_set, pullback_inner,
                                 strict_pairing)
    b = _load(path)
    A = _need_algebra(b)
    k, l = _shape(shape)
    cl = _parse_classes(b.field, classes)
    if evaluator is not None:
        try:
            x = A.space.vec(b.evaluator(evaluator))
        except (KeyError, ParseError) as e:
            _fail("usage", f"bad evaluator: {e}", 2)
        I = strict_pairing(module_over_itself(A), x)
    elif b.inner is not None:
        I = b.inner
    else:
        _fail("usage", "need --eval or an inner section in the file", 2)
    if transferred:
        from .transfer import transfer as run_transfer
        if b.module is not None:
            _fail("usage", "--transferred needs the algebra over itself", 2)
        res = run_transfer(A)
        I = pullback_inner(res.k, induced_module_morphism(res.k), I)
    S = I.module.algebra.space
    ss = _run(lambda: massey_inner_set(I, cl, (k, l)))
    _emit_report(_scalar_report("massey-inner", b, f"massey-inner {shape} {classes}", ss,
                                S, I.module.space))


@cli.command("cyclic-massey")
@click.argument("path")
@click.option("--classes", required=True)
@click.option("--shape", default=None, help="k,l; defaults to the balanced split.")
@click.option("--eval", "evaluator", default=None, help="Evaluate against a closed functional.")
def cyclic_massey(path, classes, shape, evaluator):
    """Cyclic Massey products of a commutative dga, optionally evaluated."""
    from .cdga_cyclic import DualEvaluator, cdga_from_algebra, cyclic_massey_set, evaluated_inner_set
    b = _load(path)
    A = _need_algebra(b)
    try:
        C = cdga_from_algebra(A)
    except ValueError as e:
        _fail("check:commutativity", str(e))
    cl = _parse_classes(b.field, classes)
    n = len(cl)
    sh = _shape(shape) if shape else ((n - 2) // 2, n - 2 - (n - 2) // 2)
    if evaluator is None:
        ms = _run(lambda: cyclic_massey_set(C, cl, sh))
        _emit_report(_set_report("cyclic-massey", b, f"cyclic-massey {classes}", ms, A.space, A.space))
    else:
        try:
            x = DualEvaluator(A, A.space.vec(b.evaluator(evaluator)))
        except (KeyError, ParseError, ValueError) as e:
            _fail("usage", f"bad evaluator: {e}", 2)
        ss = _run(lambda: evaluated_inner_set(C, x, cl, sh))
        _emit_report(_scalar_report("cyclic-massey-eval", b, f"cyclic-massey {classes} eval={evaluator}",
                                    ss, A.space, A.space))


def _run(fn):
    try:
        return fn()
    except KeyError as e:
        _fail("usage", e.args[0] if e.args else "unknown name", 2)
    except ValueError as e:
        _fail("usage", str(e), 2)
    except ArithmeticError as e:
        _fail("computation", str(e))


@cli.command()
@click.argument("name")
@click.option("--p", "p", type=int, default=3)
@click.option("--q", "q", type=int, default=1)
@click.option("--minimal", "mode", flag_value="minimal", default=True)
@click.option("--chains", "mode", flag_value="chains")
@click.option("--solve-r", "solve_n", type=int, default=None, help="Solve the r morphism to order N.")
def model(name, p, q, mode, solve_n):
    """Emit a bundled example, or the lens models and solver summary."""
    if name == "lens":
        _lens(p, q, mode, solve_n)
        return
    try:
        obj = models.example_library(name, p)
    except KeyError as e:
        _fail("usage", e.args[0], 2)
    except ValueError as e:
        _fail("usage", str(e), 2)
    click.echo(emit_structure(_bundle_of(name, obj)), nl=False)


def _bundle_of(name, obj) -> StructureBundle:
    from .cdga_cyclic import CommutativeDGA
    if isinstance(obj, AInftyAlgebra):
        return StructureBundle(obj.field, algebra=obj, meta={"name": name})
    if isinstance(obj, CommutativeDGA):
        return StructureBundle(obj.field, algebra=obj.algebra, meta={"name": name, "commutative": "yes"})
    if isinstance(obj, models.HopfBundle):
        return StructureBundle(obj.module.field, algebra=obj.base.algebra, module=obj.module,
                               meta={"name": name, "degree_truncation": str(obj.truncation)})
    if isinstance(obj, models.FourLinkBundle):
        S = obj.B.space
        ev = {S.names[i]: c for i, c in obj.evaluator.items()}
        return StructureBundle(obj.B.field, algebra=obj.B, meta={"name": name},
                               evaluators={"t": ev, "tlit": {"t": 1}})
    raise TypeError(type(obj))


def _lens(p, q, mode, solve_n):
    try:
        if solve_n is None and mode == "minimal":
            A = models.lens_minimal_algebra(p)
            models._check_pq(p, q)
            click.echo(emit_structure(StructureBundle(A.field, algebra=A,
                                                      meta={"name": f"lens_minimal_p{p}"})), nl=False)
            return
        chain = models.lens_chain_complex(p, q)
    except ValueError as e:
        _fail("usage", str(e), 2)
    if solve_n is None:
        C = chain.C
        click.echo(emit_structure(StructureBundle(C.field, coalgebra=C,
                                                  meta={"name": f"lens_chains_p{p}_q{q}"})), nl=False)
        return
    try:
        sol = models.solve_r_morphism(chain, solve_n)
    except ArithmeticError as e:
        _fail("computation", str(e))
    bad = models.lens_solution_failures(sol)
    F = sol.theta.field
    click.echo(f"p {p}\nq {q}\nN {sol.N}")
    click.echo(f"c {F.fmt(sol.cconst)}")
    click.echo("y " + " ".join(f"{d}:{F.fmt(v)}" for d, v in sorted(sol.y.items()) if v))
    for label in ("theta_squared", "r_morphism", "c_equals_q", "y_p", "z_sums"):
        click.echo(f"assert {label} {'fail' if any(label in m for m in bad) else 'pass'}")
    if bad:
        _fail("check:lens", "; ".join(bad))


@cli.command("lens-obstruction")
@click.option("--p", "p", type=int, required=True)
@click.option("--q", "q", type=int, required=True)
@click.option("--qprime", "q2", type=int, required=True)
def lens_obstruction(p, q, q2):
    """Whether q q' is plus or minus a square mod p, with the witness n."""
    try:
        n = models.lens_obstruction_witness(p, q, q2)
    except ValueError as e:
        _fail("usage", str(e), 2)
    click.echo(f"result {'true' if n is not None else 'false'}")
    if n is not None:
        click.echo(f"witness {n}")


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="ainfmassey", standalone_mode=False)
    except CliFailure as e:
        click.echo(f"error: {e.code} {e.text}", err=True)
        sys.exit(e.status)
    except click.exceptions.UsageError as e:
        click.echo(f"error: usage {e.format_message()}", err=True)
        sys.exit(2)
    except click.exceptions.Abort:
        click.echo("error: abort interrupted", err=True)
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
