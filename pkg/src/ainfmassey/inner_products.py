"""Dual modules, module-map families, A-infinity inner products and Massey inner products.

A family ``F`` of shape M -> N is a dict ``{(k, l): table}`` whose tables
send keys (a_1..a_k, m, b_1..b_l) to vectors in N.  An inner product is a
family M -> M*, where M* carries the dual basis; reading the output at the
dual basis element m~* gives the scalar I(a.., m, b..)(m~).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ainfty_core import (AInftyAlgebra, AInftyModule, AInftyMorphism, CheckResult, _merge,
                          compose_at, family_composites, family_key_degree, module_over_itself,
                          pull_family)
from .exact_linear import FieldSpec, GradedBasisSpace, solve_linear, vec_add
from .massey import (Grid, StairContext, SymbolicSystems, TriangularSystem, _cocycles,
                     _lift_classes, compositions, is_defining_system, perturb_defining_system)
from .polys import apply_table_poly, enumerate_points, pmul, padd, pvec_eval


# ---------------------------------------------------------------- dual module

def dual_space(S: GradedBasisSpace) -> GradedBasisSpace:
    """Dual basis e*; shifted degree of e* is minus the shifted degree of e."""
    return GradedBasisSpace(S.field, tuple(n + "*" for n in S.names),
                            tuple(2 - d for d in S.degrees))


def _parity(x):
    return -1 if x % 2 else 1


def dual_module(M: AInftyModule) -> AInftyModule:
    """beta'_{k,l}(a.., e*, b..)(m~) = -(-1)^eps e*(beta_{l,k}(b.., m~, a..)).

    eps = (sum a)(|e*| + sum b + |m~|) + |e*| in shifted degrees.
    """
    F = M.field
    SA, SM = M.algebra.space, M.space
    D = dual_space(SM)
    beta: dict = {}
    for (l, k), tab in M.beta.items():
        out = beta.setdefault((k, l), {})
        for key, vec in tab.items():
            bs, mt, as_ = key[:l], key[l], key[l + 1:]
            sa = sum(SA.shdeg(x) for x in as_)
            sb = sum(SA.shdeg(x) for x in bs)
            for e, c in vec.items():
                de = D.shdeg(e)
                eps = sa * (de + sb + SM.shdeg(mt)) + de
                nkey = tuple(as_) + (e,) + tuple(bs)
                vec_add(F, out.setdefault(nkey, {}), {mt: c}, -_parity(eps))
    return AInftyModule(M.algebra, D, beta, max_total=M.max_total, complete=M.complete,
                        name=(M.name + " dual").strip())


# ---------------------------------------------------------------- families and delta

@dataclass
class ModuleFamily:
    """A family of maps M -> N over the identity of A, of shifted degree ``degree``."""

    source: AInftyModule
    target: AInftyModule
    maps: dict
    degree: int = 0
    max_total: int | None = None

    def __post_init__(self):
        self.maps = {kl: {k: v for k, v in t.items() if v} for kl, t in self.maps.items()}
        self.maps = {kl: t for kl, t in self.maps.items() if t}
        if self.max_total is None:
            self.max_total = max((a + b for a, b in self.maps), default=0)
        SA, SM, SN = self.source.algebra.space, self.source.space, self.target.space
        for (k, l), tab in self.maps.items():
            for key, vec in tab.items():
                want = family_key_degree(SA, SM, key, k) + self.degree
                for j in vec:
                    if SN.shdeg(j) != want:
                        raise ValueError(f"family entry {key} breaks degree {self.degree}")

    @property
    def field(self):
        return self.source.field


def delta(Fam: ModuleFamily, bound: int | None = None) -> ModuleFamily:
    """delta(F) = F o (mu, beta) - (-1)^|F| gamma o F, up to total arity ``bound``."""
    M, N = Fam.source, Fam.target
    F = Fam.field
    A = M.algebra
    T = bound if bound is not None else Fam.max_total + max(M.max_total, A.max_arity - 1, N.max_total)
    res = family_composites(F, A.mu, M.beta, Fam.maps, A.space, M.space, T)
    SA = A.space
    s0 = -_parity(Fam.degree)
    for (i, j), gtab in N.beta.items():
        for (k, l), ftab in Fam.maps.items():
            if i + k + j + l > T:
                continue
            sign = (lambda i: lambda okey, ikey: _parity(Fam.degree * sum(SA.shdeg(a) for a in okey[:i])))(i)
            _merge(F, res.setdefault((i + k, j + l), {}), compose_at(F, gtab, i, ftab, sign), s0)
    return ModuleFamily(M, N, res, Fam.degree + 1, T)


def compose_families(G: ModuleFamily, Fm: ModuleFamily, bound: int | None = None) -> ModuleFamily:
    """(G o F)_{r,s} = sum (-1)^{|G| sum a before} G(a.., F(..), ..)."""
    F = Fm.field
    SA = Fm.source.algebra.space
    T = bound if bound is not None else Fm.max_total + G.max_total
    out: dict = {}
    for (i, j), gtab in G.maps.items():
        for (k, l), ftab in Fm.maps.items():
            if i + j + k + l > T:
                continue
            sign = (lambda i: lambda okey, ikey: _parity(G.degree * sum(SA.shdeg(a) for a in okey[:i])))(i)
            _merge(F, out.setdefault((i + k, j + l), {}), compose_at(F, gtab, i, ftab, sign))
    return ModuleFamily(Fm.source, G.target, out, G.degree + Fm.degree, T)


def transpose_family(Fm: ModuleFamily, source_dual: AInftyModule, target_dual: AInftyModule) -> ModuleFamily:
    """F*: N* -> M*, F*_{i,j}(a.., n*, b..)(m~) = (-1)^eps n*(F_{j,i}(b.., m~, a..)).

    eps = (sum a)(|n*| + sum b + |m~|) + |F| |n*|.
    """
    F = Fm.field
    SA = Fm.source.algebra.space
    SM, SN = Fm.source.space, Fm.target.space
    DN = target_dual.space
    out: dict = {}
    for (j, i), tab in Fm.maps.items():
        o = out.setdefault((i, j), {})
        for key, vec in tab.items():
            bs, mt, as_ = key[:j], key[j], key[j + 1:]
            sa = sum(SA.shdeg(x) for x in as_)
            sb = sum(SA.shdeg(x) for x in bs)
            for e, c in vec.items():
                de = DN.shdeg(e)
                eps = sa * (de + sb + SM.shdeg(mt)) + Fm.degree * de
                vec_add(F, o.setdefault(tuple(as_) + (e,) + tuple(bs), {}), {mt: c}, _parity(eps))
    return ModuleFamily(target_dual, source_dual, out, Fm.degree, Fm.max_total)


def induced_module_morphism(f: AInftyMorphism, M: AInftyModule | None = None,
                            N: AInftyModule | None = None) -> ModuleFamily:
    """F_{k,l} = f_{k+l+1}: the algebra over itself mapped to the target over itself, restricted."""
    M = M or module_over_itself(f.source)
    N0 = N or module_over_itself(f.target)
    from .ainfty_core import restrict_module
    N_res = restrict_module(f, N0, bound=f.max_arity - 1)
    maps = {}
    for n, tab in f.f.items():
        for k in range(n):
            maps[(k, n - 1 - k)] = dict(tab)
    return ModuleFamily(M, N_res, maps, 0, f.max_arity - 1)


# ---------------------------------------------------------------- inner products

@dataclass
class AInftyInnerProduct:
    module: AInftyModule
    maps: dict                 # (k, l) -> {(a.., m, b..): {m~ index: scalar}}
    degree: int = 0
    max_total: int | None = None
    dual: AInftyModule | None = None

    def __post_init__(self):
        if self.dual is None:
            self.dual = dual_module(self.module)
        fam = self.family()
        self.maps = fam.maps
        self.max_total = fam.max_total

    def family(self) -> ModuleFamily:
        return ModuleFamily(self.module, self.dual, self.maps, self.degree, self.max_total)

    @property
    def field(self):
        return self.module.field

    def value(self, key: tuple, k: int, mt: int):
        tab = self.maps.get((k, len(key) - k - 1), {})
        return tab.get(key, {}).get(mt, 0)

    @classmethod
    def from_family(cls, fam: ModuleFamily) -> "AInftyInnerProduct":
        return cls(fam.source, fam.maps, fam.degree, fam.max_total, dual=fam.target)


def check_inner_product(I: AInftyInnerProduct, bound: int | None = None) -> CheckResult:
    d = delta(I.family(), bound)
    wit = []
    for rs in sorted(d.maps):
        for key, vec in sorted(d.maps[rs].items()):
            wit.append((rs, key, vec))
    return CheckResult(not wit, wit, d.max_total)


def strict_pairing(M: AInftyModule, x: dict, degree: int | None = None) -> AInftyInnerProduct:
    """I_{0,0}(m)(m~) = x(mu_2(m, m~)) for an algebra over itself.

    In plain products this is (-1)^{|m|-1} x(m . m~); the sign is what makes
    the pairing closed under delta in the shifted convention.
    """
    A = M.algebra
    F = A.field
    tab: dict = {}
    for (a, b), vec in A.op(2).items():
        val = F(sum(c * x.get(j, 0) for j, c in vec.items()))
        if val:
            tab.setdefault((a,), {})[b] = val
    if degree is None:
        D = dual_space(M.space)
        degs = {D.shdeg(b) - M.space.shdeg(a) for (a,), row in tab.items() for b in row}
        degree = degs.pop() if degs else 0
    return AInftyInnerProduct(M, {(0, 0): tab}, degree, 0)


def pullback_inner(f: AInftyMorphism, Fm: ModuleFamily, I: AInftyInnerProduct,
                   bound: int | None = None) -> AInftyInnerProduct:
    """F#(I) = F* o I_{/A} o F over the source algebra."""
    T = bound if bound is not None else Fm.max_total
    N = I.module
    Nres = Fm.target
    Ires = ModuleFamily(Nres, _restricted_dual(f, I.dual, T), pull_family(f, I.maps, T), I.degree, T)
    IF = compose_families(Ires, Fm, T)
    src_dual = dual_module(Fm.source)
    Ft = transpose_family(Fm, src_dual, Ires.target)
    out = compose_families(Ft, IF, T)
    return AInftyInnerProduct(Fm.source, out.maps, out.degree, T, dual=src_dual)


def _restricted_dual(f, D: AInftyModule, T):
    from .ainfty_core import restrict_module
    return restrict_module(f, D, bound=T)


def is_exact_inner_product(I: AInftyInnerProduct, bound: int = 0):
    """A family G with delta(G) = I on total arity <= bound, or None."""
    M, D = I.module, I.dual
    SA, SM, SD = M.algebra.space, M.space, D.space
    F = I.field
    gdeg = I.degree - 1
    unknowns = []
    for tot in range(bound + 1):
        for k in range(tot + 1):
            l = tot - k
            for key in _all_keys(SA, SM, k, l):
                want = family_key_degree(SA, SM, key, k) + gdeg
                for e in range(SD.dim):
                    if SD.shdeg(e) == want:
                        unknowns.append(((k, l), key, e))
    rows: dict = {}
    cols = []
    for u in unknowns:
        kl, key, e = u
        G = ModuleFamily(M, D, {kl: {key: {e: F.one}}}, gdeg, bound)
        dG = delta(G, bound)
        col = {}
        for rs, tab in dG.maps.items():
            for kk, vec in tab.items():
                for j, c in vec.items():
                    r = rows.setdefault((rs, kk, j), len(rows))
                    col[r] = c
        cols.append(col)
    rhs = {}
    for rs, tab in I.maps.items():
        if sum(rs) > bound:
            continue
        for kk, vec in tab.items():
            for j, c in vec.items():
                r = rows.setdefault((rs, kk, j), len(rows))
                rhs[r] = c
    nrows = len(rows)
    if not unknowns:
        return None if rhs else ModuleFamily(M, D, {}, gdeg, bound)
    mat = [[F.zero] * len(unknowns) for _ in range(nrows)]
    for c, col in enumerate(cols):
        for r, x in col.items():
            mat[r][c] = x
    b = [rhs.get(r, F.zero) for r in range(nrows)]
    sol = solve_linear(F, mat, b, len(unknowns))
    if not sol.consistent:
        return None
    maps: dict = {}
    for (kl, key, e), x in zip(unknowns, sol.particular):
        if x:
            maps.setdefault(kl, {}).setdefault(key, {})[e] = x
    return ModuleFamily(M, D, maps, gdeg, bound)


def _all_keys(SA, SM, k, l):
    from itertools import product
    return (tuple(a) + (m,) + tuple(b) for a in product(range(SA.dim), repeat=k)
            for m in range(SM.dim) for b in product(range(SA.dim), repeat=l))


# ---------------------------------------------------------------- cyclic defining systems

@dataclass
class CyclicDefiningSystem:
    """Two triangular systems x (positions 1..k+l+1) and x' (cyclic order from k+2)."""

    k: int
    l: int
    x: TriangularSystem
    xp: TriangularSystem

    @property
    def n(self):
        return self.k + self.l + 2

    def xp_local(self, g: int) -> int:
        """Local index in x' of global position g."""
        k, l = self.k, self.l
        return g - (k + 1) if g >= k + 2 else l + 1 + g

    def xp_entry(self, g1: int, g2: int) -> dict:
        """x'_{g1, g2} in global labels (g2 = 0 stands for k + l + 2)."""
        if g2 == 0:
            g2 = self.n
        return self.xp.get(self.xp_local(g1), self.xp_local(g2))


def cyclic_grids(k: int, l: int) -> tuple[Grid, Grid]:
    n = k + l + 2
    gx = Grid("x", tuple(range(1, k + l + 2)), k + 1, True)
    gxp = Grid("xp", tuple(range(k + 2, n + 1)) + tuple(range(1, k + 1)), l + 1, True)
    return gx, gxp


def is_cyclic_defining_system(sys: CyclicDefiningSystem, ctx: StairContext) -> tuple:
    """Both systems defining including corners, and their shared entries agree."""
    c1 = is_defining_system(sys.x, ctx, include_corner=True)
    if not c1:
        return False, ("x", c1.failed)
    c2 = is_defining_system(sys.xp, ctx, include_corner=True)
    if not c2:
        return False, ("xp", c2.failed)
    k, l = sys.k, sys.l
    for i in range(1, k + 1):
        for j in range(i, k + 1):
            if sys.x.get(i, j) != sys.xp_entry(i, j):
                return False, ("overlap", (i, j))
    for i in range(k + 2, k + l + 2):
        for j in range(i, k + l + 2):
            if sys.x.get(i, j) != sys.xp_entry(i, j):
                return False, ("overlap", (i, j))
    return True, None


def _ip_terms(k: int, l: int):
    """(sign-exponent start u, left pieces, M entry (v, w), right pieces, x' entry (w'+1, u-1))."""
    n = k + l + 2
    for u in range(1, k + 2):
        for v in range(u, k + 2):
            lefts = compositions(u, v - 1, 10 ** 6, 0) if v > u else [[]]
            for w in range(k + 1, k + l + 2):
                for wp in range(w, k + l + 2):
                    rights = compositions(w + 1, wp, 10 ** 6, 0) if wp > w else [[]]
                    for lp in lefts:
                        for rp in rights:
                            yield u, lp, (v, w), rp, (wp + 1, (u - 1) if u > 1 else n)


def _ip_sign(degs: list, u: int) -> int:
    """Koszul sign of moving the first u-1 diagonal entries to the end."""
    a = sum(d - 1 for d in degs[:u - 1])
    b = sum(d - 1 for d in degs[u - 1:])
    return _parity(a * b)


def staircase_inner_product(I: AInftyInnerProduct, sys: CyclicDefiningSystem):
    F = I.field
    degs = list(sys.x.diag_degrees) + [sys.xp.diag_degrees[sys.l]]
    total = F.zero
    for u, lp, (v, w), rp, (s, e) in _ip_terms(sys.k, sys.l):
        tab = I.maps.get((len(lp), len(rp)))
        if not tab:
            continue
        vecs = [sys.x.get(a, b) for a, b in lp] + [sys.x.get(v, w)] + [sys.x.get(a, b) for a, b in rp]
        if any(not x for x in vecs):
            continue
        from .ainfty_core import apply_table
        out = apply_table(F, tab, vecs)
        ev = sys.xp_entry(s, e)
        val = sum(c * ev.get(j, 0) for j, c in out.items())
        total = F(total + _ip_sign(degs, u) * val)
    return total


def _ip_symbolic(I: AInftyInnerProduct, sym: SymbolicSystems, gx: Grid, gxp: Grid, k: int, l: int,
                 degs: list) -> dict:
    F = I.field
    n = k + l + 2
    total: dict = {}

    def xp(g1, g2):
        loc = (lambda g: g - (k + 1) if g >= k + 2 else l + 1 + g)
        return sym._get(gxp, loc(g1), loc(g2))

    for u, lp, (v, w), rp, (s, e) in _ip_terms(k, l):
        tab = I.maps.get((len(lp), len(rp)))
        if not tab:
            continue
        vecs = [sym._get(gx, a, b) for a, b in lp] + [sym._get(gx, v, w)] + \
               [sym._get(gx, a, b) for a, b in rp]
        if any(not x for x in vecs):
            continue
        out = apply_table_poly(F, tab, vecs)
        ev = xp(s, e)
        sg = _ip_sign(degs, u)
        for j, P in out.items():
            if j in ev:
                padd(F, total, pmul(F, P, ev[j]), sg)
    return total


def cyclic_symbolic(ctx: StairContext, classes: list, k: int, l: int, full_coset: bool = False,
                    cocycles: bool = False, degrees=None) -> SymbolicSystems:
    """Symbolic cyclic defining systems on (a_1..a_k, m, b_1..b_l, m')."""
    n = k + l + 2
    if len(classes) != n:
        raise ValueError(f"shape ({k},{l}) needs {n} inputs")
    if k + l < 1:
        raise ValueError("need k + l >= 1")
    diag = {}
    for t, c in enumerate(classes, start=1):
        module = t in (k + 1, n)
        split = ctx.split(module)
        if cocycles:
            (vec, deg), = _cocycles([c], ctx.space(module), None if degrees is None else [degrees[t - 1]])
        else:
            (vec, deg), = _lift_classes([c], split.h_space, split)
        diag[t] = (vec, deg, module)
    gx, gxp = cyclic_grids(k, l)
    return SymbolicSystems(ctx, diag, [gx, gxp], full_coset)


def _concrete_cyclic(sym, gx, gxp, k, l, assign) -> CyclicDefiningSystem:
    return CyclicDefiningSystem(k, l, sym.concrete(gx, assign), sym.concrete(gxp, assign))


def enumerate_cyclic_defining_systems(ctx: StairContext, classes, k: int, l: int, **kw):
    """Every essentially different cyclic defining system (finite fields)."""
    sym = cyclic_symbolic(ctx, classes, k, l, **kw)
    gx, gxp = sym.grids
    return [_concrete_cyclic(sym, gx, gxp, k, l, a) for a in sym.all_assignments()]


@dataclass
class ScalarMasseySet:
    elements: list
    witnesses: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def empty(self):
        return not self.elements

    @property
    def trivial(self):
        return self.empty or 0 in self.elements

    def as_set(self):
        return set(self.elements)


def massey_inner_set(I: AInftyInnerProduct, classes, shape: tuple, ctx: StairContext | None = None,
                     full_coset: bool = False, cocycles: bool = False, degrees=None,
                     verify: bool = True) -> ScalarMasseySet:
    """{ staircase inner product of every cyclic defining system }."""
    k, l = shape
    M = I.module
    ctx = ctx or StairContext(M.algebra, M)
    sym = cyclic_symbolic(ctx, classes, k, l, full_coset, cocycles, degrees)
    gx, gxp = sym.grids
    meta = {"shape": (k, l), "field": str(I.field), "variables": sym.nvars}
    if sym.obstruction is not None:
        return ScalarMasseySet([], {}, dict(meta, obstruction=str(sym.obstruction[0])))
    degs = [sym.diag[t][1] for t in range(1, k + l + 3)]
    P = _ip_symbolic(I, sym, gx, gxp, k, l, degs)
    pts = enumerate_points(I.field, sym.constraints, [P])
    wit = {}
    for (val,), assign in pts.items():
        cs = _concrete_cyclic(sym, gx, gxp, k, l, assign)
        if verify:
            ok, where = is_cyclic_defining_system(cs, ctx)
            if not ok:
                raise ArithmeticError(f"enumerated cyclic system fails at {where}")
            if staircase_inner_product(I, cs) != I.field(val):
                raise ArithmeticError("symbolic and concrete staircase inner products differ")
        wit[I.field(val)] = cs
    return ScalarMasseySet(sorted(wit), wit, meta)


def perturb_cyclic(sys: CyclicDefiningSystem, ctx: StairContext, grid: str, kl: tuple, z: dict
                   ) -> CyclicDefiningSystem:
    """Perturb an entry by dz; shared entries are perturbed in both systems."""
    k, l = sys.k, sys.l
    if grid == "x":
        i, j = kl
        shared = j <= k or i >= k + 2
        x2 = perturb_defining_system(sys.x, ctx, kl, z, include_corner=True)
        xp2 = sys.xp
        if shared:
            xp2 = perturb_defining_system(sys.xp, ctx, (sys.xp_local(i), sys.xp_local(j)), z,
                                          include_corner=True)
        return CyclicDefiningSystem(k, l, x2, xp2)
    i, j = kl
    xp2 = perturb_defining_system(sys.xp, ctx, kl, z, include_corner=True)
    return CyclicDefiningSystem(k, l, sys.x, xp2)


# ---------------------------------------------------------------- formality

@dataclass
class FormalityReport:
    strict: bool
    sets: dict = field(default_factory=dict)
    all_trivial: bool = True


def formality_witness_check(I: AInftyInnerProduct, queries=()) -> FormalityReport:
    """Is the stored structure strict (mu_2, beta_{1,0}, beta_{0,1}, I_{0,0} only)?

    For a strict structure the requested Massey inner sets are computed and
    their triviality is reported.
    """
    M = I.module
    A = M.algebra
    strict = (set(A.mu) <= {2} and set(M.beta) <= {(1, 0), (0, 1)}
              and set(I.maps) <= {(0, 0)})
    rep = FormalityReport(strict)
    for classes, shape in queries:
        s = massey_inner_set(I, classes, shape)
        rep.sets[(tuple(map(str, classes)), shape)] = s
        rep.all_trivial = rep.all_trivial and s.trivial
    return rep
