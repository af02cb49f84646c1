"""Graded commutative dgas, cyclic staircase products and evaluated inner sets.

A free graded commutative algebra is built on named generators: odd ones
square to zero, even ones are polynomial.  Monomials are exponent vectors
in generator order; the product sign comes from reordering odd generators.
Optionally everything above a degree is discarded (a quotient dga).

Plain products relate to the shifted mu_2 by ``ab = (-1)^{|a|-1} mu_2(a, b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .ainfty_core import AInftyAlgebra, apply_table, check_ainfty, module_over_itself
from .exact_linear import FieldSpec, GradedBasisSpace, vec_add
from .inner_products import (AInftyInnerProduct, CyclicDefiningSystem, ScalarMasseySet,
                             cyclic_symbolic, is_cyclic_defining_system, strict_pairing)
from .massey import MasseySet, StairContext
from .polys import enumerate_points, linear_map_poly, padd, pmul, pvec_add


# ---------------------------------------------------------------- free cdgas

def _mono_name(gens, e):
    parts = []
    for (g, _), k in zip(gens, e):
        if k:
            parts.append(g if k == 1 else f"{g}^{k}")
    return "".join(parts) or "1"


def _mono_sign(gens, a, b):
    """Sign of a*b against the sorted monomial; 0 if an odd generator repeats."""
    s = 1
    for i, (_, di) in enumerate(gens):
        if di % 2 and a[i] and b[i]:
            return 0
    for i, (_, di) in enumerate(gens):
        if di % 2 and b[i]:
            # b's generator i passes a's odd generators of larger index
            passed = sum(a[j] for j in range(i + 1, len(gens)) if gens[j][1] % 2)
            if passed % 2:
                s = -s
    return s


@dataclass
class CommutativeDGA:
    """A dga with mu_1, mu_2 only, built from generators, with its product certificate."""

    algebra: AInftyAlgebra
    generators: tuple
    monomials: tuple
    truncation: int | None = None

    @property
    def space(self):
        return self.algebra.space

    @property
    def field(self):
        return self.algebra.field

    def mul(self, u: dict, v: dict) -> dict:
        """Plain (unshifted) product of two vectors."""
        S = self.space
        F = self.field
        out: dict = {}
        for i, c in u.items():
            s = -1 if S.shdeg(i) % 2 else 1
            vec_add(F, out, apply_table(F, self.algebra.op(2), [{i: c}, v]), s)
        return out

    def d(self, v: dict) -> dict:
        return self.algebra.d(v)

    def validate(self) -> list[str]:
        """Failing properties among commutativity, associativity and Leibniz."""
        bad = []
        S = self.space
        F = self.field
        for a in range(S.dim):
            for b in range(S.dim):
                ab = self.mul({a: F.one}, {b: F.one})
                ba = self.mul({b: F.one}, {a: F.one})
                sgn = -1 if (S.degrees[a] * S.degrees[b]) % 2 else 1
                if ab != vec_add(F, {}, ba, sgn):
                    bad.append(f"commutativity at {S.names[a]}, {S.names[b]}")
                    return bad
        if not check_ainfty(self.algebra):
            bad.append("associativity or Leibniz")
        return bad


def free_cdga(F: FieldSpec, generators, differential: dict | None = None,
              truncate: int | None = None, name: str = "") -> CommutativeDGA:
    """Free graded commutative algebra on ``generators`` = [(name, degree)].

    ``differential`` maps a generator name to {product string: coef}, where a
    product string like "e2*e1" is multiplied in the order written.
    Without ``truncate`` every even generator must be absent (exterior case).
    """
    gens = tuple((g, int(d)) for g, d in generators)
    if any(d <= 0 for _, d in gens):
        raise ValueError("generators need positive degree")
    if truncate is None and any(d % 2 == 0 for _, d in gens):
        raise ValueError("even generators need a truncation degree")
    top = truncate if truncate is not None else sum(d for _, d in gens)
    ranges = [range(2) if d % 2 else range(top // d + 1) for _, d in gens]
    monos = []
    for e in product(*ranges):
        deg = sum(k * d for k, (_, d) in zip(e, gens))
        if deg <= top:
            monos.append((deg, e))
    monos.sort(key=lambda t: (t[0], [-k for k in t[1]]))
    monos = [e for _, e in monos]
    degs = [sum(k * d for k, (_, d) in zip(e, gens)) for e in monos]
    S = GradedBasisSpace(F, tuple(_mono_name(gens, e) for e in monos), tuple(degs))
    index = {e: i for i, e in enumerate(monos)}

    def mono_mul(a, b):
        s = _mono_sign(gens, a, b)
        if not s:
            return None, 0
        e = tuple(x + y for x, y in zip(a, b))
        if e not in index:
            return None, 0
        return index[e], s

    def vmul(u, v):
        out: dict = {}
        for i, c in u.items():
            for j, c2 in v.items():
                k, s = mono_mul(monos[i], monos[j])
                if k is not None:
                    vec_add(F, out, {k: F(s * c * c2)})
        return out

    unit = tuple(0 for _ in gens)
    gvec = {}
    for t, (g, _) in enumerate(gens):
        e = tuple(1 if s == t else 0 for s in range(len(gens)))
        if e in index:
            gvec[g] = {index[e]: F.one}
    dgen: dict = {}
    for t, (g, dg) in enumerate(gens):
        out: dict = {}
        for word, c in (differential or {}).get(g, {}).items():
            term = {index[unit]: F.one}
            for factor in word.split("*"):
                term = vmul(term, gvec[factor.strip()])
            vec_add(F, out, term, F(c))
        dgen[t] = out

    # Leibniz on monomials written as sorted generator words
    dcols = []
    for e in monos:
        word = [t for t, k in enumerate(e) for _ in range(k)]
        total: dict = {}
        left = {index[unit]: F.one}
        ldeg = 0
        for pos, t in enumerate(word):
            right = {index[unit]: F.one}
            for t2 in word[pos + 1:]:
                right = vmul(right, {index[tuple(1 if s == t2 else 0 for s in range(len(gens)))]: F.one})
            piece = vmul(vmul(left, dgen[t]), right)
            vec_add(F, total, piece, -1 if ldeg % 2 else 1)
            left = vmul(left, {index[tuple(1 if s == t else 0 for s in range(len(gens)))]: F.one})
            ldeg += gens[t][1]
        dcols.append(total)
    mu1 = {(i,): v for i, v in enumerate(dcols) if v}
    mu2 = {}
    for i in range(len(monos)):
        for j in range(len(monos)):
            k, s = mono_mul(monos[i], monos[j])
            if k is not None:
                s2 = -s if (degs[i] - 1) % 2 else s
                mu2[(i, j)] = {k: F(s2)}
    A = AInftyAlgebra(S, {1: mu1, 2: mu2}, max_arity=2, complete=True, name=name)
    for i, v in enumerate(dcols):
        if A.d(v):
            raise ValueError(f"d squared is nonzero at {S.names[i]}")
    return CommutativeDGA(A, tuple(g for g, _ in gens), tuple(monos), truncate)


def cdga_from_algebra(A: AInftyAlgebra) -> CommutativeDGA:
    """Wrap an algebra with only mu_1, mu_2 and check graded commutativity."""
    if set(A.mu) - {1, 2}:
        raise ValueError("a commutative dga has only mu_1 and mu_2")
    C = CommutativeDGA(A, (), ())
    bad = C.validate()
    if bad:
        raise ValueError("not a graded commutative dga: " + bad[0])
    return C


# ---------------------------------------------------------------- evaluators

@dataclass
class DualEvaluator:
    """A closed functional x on A, stored as {basis index: coef}."""

    algebra: AInftyAlgebra
    x: dict

    def __post_init__(self):
        F = self.algebra.field
        S = self.algebra.space
        self.x = {(S.index(k) if isinstance(k, str) else k): F(c) for k, c in self.x.items()}
        self.x = {k: c for k, c in self.x.items() if c}
        for (i,), v in self.algebra.op(1).items():
            if F(sum(c * self.x.get(j, 0) for j, c in v.items())):
                raise ValueError(f"evaluator is not closed: x(d {S.names[i]}) != 0")

    def __call__(self, v: dict):
        F = self.algebra.field
        return F(sum(c * self.x.get(j, 0) for j, c in v.items()))

    def inner_product(self) -> AInftyInnerProduct:
        return strict_pairing(module_over_itself(self.algebra), self.x)


# ---------------------------------------------------------------- cyclic staircase

def _terms(k: int, l: int):
    """(i, j, (start, end) of the x' factor) for the cyclic staircase sum."""
    n = k + l + 2
    for i in range(1, k + 2):
        for j in range(k + 1, k + l + 2):
            yield i, j, (j + 1, i - 1 if i > 1 else n)


def _eps(degs, i):
    a = sum(d - 1 for d in degs[:i - 1])
    b = sum(d - 1 for d in degs[i - 1:])
    return (1 + a * b) % 2


def cyclic_staircase_cdga(sys: CyclicDefiningSystem, C: CommutativeDGA, check: bool = True) -> dict:
    """C = sum (-1)^{|x_ij| + eps_i} x_ij . x'_{j+1, i-1}; asserted closed."""
    F = C.field
    degs = list(sys.x.diag_degrees) + [sys.xp.diag_degrees[sys.l]]
    out: dict = {}
    for i, j, (s, e) in _terms(sys.k, sys.l):
        xij = sys.x.get(i, j)
        sign = (sys.x.degree(i, j) + _eps(degs, i)) % 2
        vec_add(F, out, C.mul(xij, sys.xp_entry(s, e)), -1 if sign else 1)
    if check and C.d(out):
        raise ArithmeticError("cyclic staircase product is not closed")
    return out


def _symbolic_cyclic_product(C: CommutativeDGA, sym, k, l) -> dict:
    """The cyclic staircase product with symbolic entries, as a polynomial vector."""
    F = C.field
    S = C.space
    gx, gxp = sym.grids
    degs = [sym.diag[t][1] for t in range(1, k + l + 3)]
    loc = (lambda g: g - (k + 1) if g >= k + 2 else l + 1 + g)
    mu2 = C.algebra.op(2)
    out: dict = {}
    for i, j, (s, e) in _terms(k, l):
        xij = sym._get(gx, i, j)
        yv = sym._get(gxp, loc(s), loc(e))
        if not xij or not yv:
            continue
        deg = sym.shdeg(gx, i, j) + 1
        sign = (deg + _eps(degs, i)) % 2
        # plain product = (-1)^{|x|-1} mu_2, and |x| is constant on the entry
        s2 = -1 if (sign + deg - 1) % 2 else 1
        for a, P in xij.items():
            for b, Q in yv.items():
                for c, coef in mu2.get((a, b), {}).items():
                    padd(F, out.setdefault(c, {}), pmul(F, P, Q), s2 * coef)
    return {c: P for c, P in out.items() if P}


def _cyclic_sym(C: CommutativeDGA, classes, shape, full_coset=False, cocycles=False):
    k, l = shape
    M = module_over_itself(C.algebra)
    ctx = StairContext(C.algebra, M)
    sym = cyclic_symbolic(ctx, classes, k, l, full_coset, cocycles)
    return ctx, sym


def cyclic_massey_set(C: CommutativeDGA, classes, shape: tuple, full_coset: bool = False,
                      verify: bool = True) -> MasseySet:
    """Classes of cyclic staircase products over all cyclic defining systems."""
    k, l = shape
    ctx, sym = _cyclic_sym(C, classes, shape, full_coset)
    split = ctx.split_A
    H = split.h_space
    deg = sum(sym.diag[t][1] - 1 for t in sym.diag) + 2
    idx = tuple(H.in_degree(deg))
    meta = {"shape": shape, "field": str(C.field), "variables": sym.nvars}
    if sym.obstruction is not None:
        return MasseySet([], H, idx, {}, dict(meta, obstruction=str(sym.obstruction[0])))
    P = _symbolic_cyclic_product(C, sym, k, l)
    fP = linear_map_poly(C.field, split.f.columns, P)
    pts = enumerate_points(C.field, sym.constraints, [fP.get(t, {}) for t in idx])
    wit = {}
    gx, gxp = sym.grids
    for val, assign in pts.items():
        cs = CyclicDefiningSystem(k, l, sym.concrete(gx, assign), sym.concrete(gxp, assign))
        val = tuple(C.field(v) for v in val)
        if verify:
            ok, where = is_cyclic_defining_system(cs, ctx)
            if not ok:
                raise ArithmeticError(f"enumerated cyclic system fails at {where}")
            cl = split.f(cyclic_staircase_cdga(cs, C))
            if tuple(cl.get(t, 0) for t in idx) != val:
                raise ArithmeticError("symbolic and concrete cyclic products differ")
        wit[val] = cs
    return MasseySet(sorted(wit), H, idx, wit, meta)


def evaluated_inner_set(C: CommutativeDGA, x: DualEvaluator, classes, shape: tuple,
                        full_coset: bool = False, verify: bool = True) -> ScalarMasseySet:
    """{ x(C) : cyclic defining systems }."""
    k, l = shape
    F = C.field
    ctx, sym = _cyclic_sym(C, classes, shape, full_coset)
    meta = {"shape": shape, "field": str(F), "variables": sym.nvars}
    if sym.obstruction is not None:
        return ScalarMasseySet([], {}, dict(meta, obstruction=str(sym.obstruction[0])))
    P = _symbolic_cyclic_product(C, sym, k, l)
    out: dict = {}
    for c, Q in P.items():
        if x.x.get(c):
            padd(F, out, Q, x.x[c])
    pts = enumerate_points(F, sym.constraints, [out])
    gx, gxp = sym.grids
    wit = {}
    for (val,), assign in pts.items():
        cs = CyclicDefiningSystem(k, l, sym.concrete(gx, assign), sym.concrete(gxp, assign))
        if verify and x(cyclic_staircase_cdga(cs, C)) != F(val):
            raise ArithmeticError("symbolic and concrete evaluations differ")
        wit[F(val)] = cs
    return ScalarMasseySet(sorted(wit), wit, meta)
