"""Triangular and defining systems, staircase products and Massey product sets.

Positions on the diagonal are numbered from 1.  An entry (i, j) of a system
covers the positions i..j; in a module system the entries covering the
module slot live in M and are fed to the module maps beta, all other
entries live in A and are fed to mu.

Enumeration keeps every free choice symbolic: an entry is written as
``h(S) + sum_t c_t g(t)`` over a basis of cohomology in its degree, and the
requirement that S be exact becomes the polynomial condition ``f(S) = 0``.
Solutions are then counted exactly over GF(p).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ainfty_core import AInftyAlgebra, AInftyModule, AInftyMorphism, apply_table
from .exact_linear import (CohomologySplitting, FieldSpec, GradedBasisSpace, LinearMap,
                           cohomology_splitting, kernel_basis, vec_add, vec_sub, vec_to_dense,
                           rank)
from .polys import (InfiniteEnumerationError, apply_table_poly, enumerate_points, linear_map_poly,
                    pvar, pvec_add, pvec_eval, pvec_from_vec, pvec_scale_poly)

DEFAULT_MAX_N = 12


# ---------------------------------------------------------------- contexts

@dataclass
class StairContext:
    """The algebra, an optional module, and the splittings used for enumeration."""

    A: AInftyAlgebra
    M: AInftyModule | None = None
    split_A: CohomologySplitting | None = None
    split_M: CohomologySplitting | None = None

    def __post_init__(self):
        if self.split_A is None:
            self.split_A = splitting_of(self.A)
        if self.M is not None and self.split_M is None:
            self.split_M = module_splitting_of(self.M)

    @property
    def field(self) -> FieldSpec:
        return self.A.field

    def op(self, r: int, u: int | None) -> dict:
        """mu_r, or beta_{u, r-u-1} when piece u carries the module slot."""
        if u is None:
            return self.A.op(r)
        return self.M.op(u, r - u - 1)

    def max_pieces(self, module: bool) -> int:
        if not module:
            return self.A.max_arity if self.A.complete else self.A.max_arity
        return self.M.max_total + 1

    def space(self, module: bool) -> GradedBasisSpace:
        return self.M.space if module else self.A.space

    def split(self, module: bool) -> CohomologySplitting:
        return self.split_M if module else self.split_A

    def d(self, v: dict, module: bool) -> dict:
        return apply_table(self.field, self.op(1, 0 if module else None), [v])


_SPLIT_CACHE: dict = {}


def splitting_of(A: AInftyAlgebra) -> CohomologySplitting:
    key = id(A)
    hit = _SPLIT_CACHE.get(key)
    if hit is not None and hit[0] is A:
        return hit[1]
    s = cohomology_splitting(A.differential())
    _SPLIT_CACHE[key] = (A, s)
    return s


def module_splitting_of(M: AInftyModule) -> CohomologySplitting:
    key = id(M)
    hit = _SPLIT_CACHE.get(key)
    if hit is not None and hit[0] is M:
        return hit[1]
    s = cohomology_splitting(M.differential())
    _SPLIT_CACHE[key] = (M, s)
    return s


# ---------------------------------------------------------------- systems

@dataclass
class TriangularSystem:
    """Entries x_{i,j} (1-based) with the unshifted degrees of the diagonal."""

    n: int
    entries: dict
    diag_degrees: tuple
    mpos: int | None = None

    def shdeg(self, i: int, j: int) -> int:
        return sum(d - 1 for d in self.diag_degrees[i - 1:j])

    def degree(self, i: int, j: int) -> int:
        return self.shdeg(i, j) + 1

    def is_module_entry(self, i: int, j: int) -> bool:
        return self.mpos is not None and i <= self.mpos <= j

    def get(self, i: int, j: int) -> dict:
        return self.entries.get((i, j), {})

    def copy(self) -> "TriangularSystem":
        return TriangularSystem(self.n, {k: dict(v) for k, v in self.entries.items()},
                                self.diag_degrees, self.mpos)


DefiningSystem = TriangularSystem


def compositions(i: int, j: int, max_pieces: int, min_pieces: int = 2):
    """Ordered splittings of i..j into consecutive pieces (lists of (start, end))."""
    out = []

    def rec(start, acc):
        if start > j:
            if len(acc) >= min_pieces:
                out.append(list(acc))
            return
        if len(acc) >= max_pieces:
            return
        for end in range(start, j + 1):
            acc.append((start, end))
            rec(end + 1, acc)
            acc.pop()

    rec(i, [])
    return out


def _module_piece(pieces, mpos):
    if mpos is None:
        return None
    for u, (s, e) in enumerate(pieces):
        if s <= mpos <= e:
            return u
    return None


def staircase_product(sys: TriangularSystem, ctx: StairContext | AInftyAlgebra, p: int, q: int) -> dict:
    """S^{p,q}: the sum over splittings of p..q into at least two pieces."""
    if isinstance(ctx, AInftyAlgebra):
        ctx = StairContext(ctx)
    F = ctx.field
    module = sys.is_module_entry(p, q)
    total: dict = {}
    for pieces in compositions(p, q, ctx.max_pieces(module)):
        u = _module_piece(pieces, sys.mpos)
        tab = ctx.op(len(pieces), u)
        if not tab:
            continue
        vecs = [sys.get(s, e) for s, e in pieces]
        vec_add(F, total, apply_table(F, tab, vecs))
    return total


@dataclass
class SystemCheck:
    ok: bool
    failed: tuple | None = None
    residual: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def is_defining_system(sys: TriangularSystem, ctx, include_corner: bool = False) -> SystemCheck:
    """d(x_{i,j}) = -S^{i,j} for all (i, j) other than the corner (unless included)."""
    if isinstance(ctx, AInftyAlgebra):
        ctx = StairContext(ctx)
    F = ctx.field
    for length in range(1, sys.n + 1):
        for i in range(1, sys.n - length + 2):
            j = i + length - 1
            if (i, j) == (1, sys.n) and not include_corner:
                continue
            lhs = ctx.d(sys.get(i, j), sys.is_module_entry(i, j))
            S = staircase_product(sys, ctx, i, j) if length > 1 else {}
            res = vec_add(F, dict(lhs), S)
            if res:
                return SystemCheck(False, (i, j), res)
    return SystemCheck(True)


def closedness_check(sys: TriangularSystem, ctx) -> bool:
    if isinstance(ctx, AInftyAlgebra):
        ctx = StairContext(ctx)
    S = staircase_product(sys, ctx, 1, sys.n)
    return not ctx.d(S, sys.is_module_entry(1, sys.n))


def perturb_defining_system(sys: TriangularSystem, ctx, kl: tuple, z: dict,
                            include_corner: bool = False) -> TriangularSystem:
    """Replace x_{k,l} by x_{k,l} + dz and correct the entries above and to the right.

    With ``include_corner`` the corner entry is corrected as well.
    """
    if isinstance(ctx, AInftyAlgebra):
        ctx = StairContext(ctx)
    F = ctx.field
    k, l = kl
    if (k, l) == (1, sys.n):
        raise ValueError("the corner cannot be perturbed")
    new = sys.copy()
    dz = ctx.d(z, sys.is_module_entry(k, l))
    new.entries[(k, l)] = vec_add(F, dict(sys.get(k, l)), dz)
    for p in range(1, k + 1):
        for q in range(l, sys.n + 1):
            if (p, q) == (k, l) or ((p, q) == (1, sys.n) and not include_corner):
                continue
            Z = _z_term(sys, ctx, p, q, k, l, z)
            if Z:
                new.entries[(p, q)] = vec_add(F, dict(sys.get(p, q)), Z)
    return new


def _z_term(sys, ctx, p, q, k, l, z):
    F = ctx.field
    out: dict = {}
    module = sys.is_module_entry(p, q)
    left = compositions(p, k - 1, 10 ** 6, 0) if k > p else [[]]
    right = compositions(l + 1, q, 10 ** 6, 0) if q > l else [[]]
    for lp in left:
        for rp in right:
            pieces = lp + [(k, l)] + rp
            r = len(pieces)
            if r < 2 or r > ctx.max_pieces(module):
                continue
            u = _module_piece(pieces, sys.mpos)
            tab = ctx.op(r, u)
            if not tab:
                continue
            eps = sum(sys.shdeg(s, e) for s, e in lp)
            vecs = [sys.get(s, e) for s, e in lp] + [z] + [sys.get(s, e) for s, e in rp]
            vec_add(F, out, apply_table(F, tab, vecs), -1 if eps % 2 else 1)
    return out


# ---------------------------------------------------------------- symbolic builder

@dataclass
class Grid:
    """One triangular system laid over global diagonal positions."""

    name: str
    positions: tuple
    mpos: int | None = None
    include_corner: bool = False

    @property
    def n(self):
        return len(self.positions)

    def is_module_entry(self, i, j):
        return self.mpos is not None and i <= self.mpos <= j

    def label(self, i, j):
        if self.is_module_entry(i, j):
            return ("M", self.name, i, j)
        return ("A",) + tuple(self.positions[i - 1:j])


class SymbolicSystems:
    """Defining systems with symbolic class choices on one or more grids."""

    def __init__(self, ctx: StairContext, diag: dict, grids: list, full_coset: bool = False):
        self.ctx = ctx
        self.F = ctx.field
        self.diag = diag          # global position -> (cocycle, unshifted degree, is_module)
        self.grids = grids
        self.full_coset = full_coset
        self.entries: dict = {}   # label -> polynomial vector
        self.constraints: list = []
        self.var_info: list = []  # (label, kind, basis index)
        self.obstruction = None
        self._build()

    # degree bookkeeping
    def shdeg(self, grid: Grid, i: int, j: int) -> int:
        return sum(self.diag[g][1] - 1 for g in grid.positions[i - 1:j])

    def _get(self, grid, i, j):
        if i == j:
            return self.entries[("D", grid.positions[i - 1])]
        return self.entries.get(grid.label(i, j), {})

    def _stair(self, grid: Grid, i: int, j: int) -> dict:
        F = self.F
        module = grid.is_module_entry(i, j)
        total: dict = {}
        for pieces in compositions(i, j, self.ctx.max_pieces(module)):
            u = _module_piece(pieces, grid.mpos)
            tab = self.ctx.op(len(pieces), u)
            if not tab:
                continue
            vecs = [self._get(grid, s, e) for s, e in pieces]
            pvec_add(F, total, apply_table_poly(F, tab, vecs))
        return total

    def _build(self):
        F = self.F
        for g, (v, _, _) in self.diag.items():
            self.entries[("D", g)] = pvec_from_vec(F, v)
        todo = []
        seen = set()
        for gi, grid in enumerate(self.grids):
            for length in range(2, grid.n + 1):
                for i in range(1, grid.n - length + 2):
                    j = i + length - 1
                    if (i, j) == (1, grid.n) and not grid.include_corner:
                        continue
                    lab = grid.label(i, j)
                    if lab in seen:
                        continue
                    seen.add(lab)
                    rank_key = (0, length) if lab[0] == "A" else (1 + gi, length)
                    todo.append((rank_key, grid, i, j, lab))
        todo.sort(key=lambda t: t[0])
        for _, grid, i, j, lab in todo:
            module = grid.is_module_entry(i, j)
            S = self._stair(grid, i, j)
            split = self.ctx.split(module)
            fS = linear_map_poly(F, split.f.columns, S)
            for t, P in sorted(fS.items()):
                if list(P) == [()]:
                    self.obstruction = (lab, {t: P[()]})
                    self.constraints.append(P)
                    return
                self.constraints.append(P)
            x = linear_map_poly(F, split.h.columns, S)
            deg = self.shdeg(grid, i, j) + 1
            H = split.h_space
            classes = H.in_degree(deg)
            extra = []
            if self.full_coset:
                extra = boundary_basis(split.d, deg)
            if (classes or extra) and not F.is_finite:
                raise InfiniteEnumerationError(
                    f"infinite enumeration over infinite field at entry {i},{j} "
                    f"(H-dimension {len(classes)} in degree {deg})")
            for t in classes:
                v = len(self.var_info)
                self.var_info.append((lab, "class", t))
                pvec_add(F, x, pvec_scale_poly(F, pvec_from_vec(F, split.g.columns[t]), pvar(F, v)))
            for b in extra:
                v = len(self.var_info)
                self.var_info.append((lab, "boundary", b))
                pvec_add(F, x, pvec_scale_poly(F, pvec_from_vec(F, b), pvar(F, v)))
            self.entries[lab] = x

    @property
    def nvars(self) -> int:
        return len(self.var_info)

    def corner_stair(self, grid: Grid) -> dict:
        return self._stair(grid, 1, grid.n)

    def concrete(self, grid: Grid, assign: dict) -> TriangularSystem:
        F = self.F
        ents = {}
        for i in range(1, grid.n + 1):
            for j in range(i, grid.n + 1):
                if i == j:
                    ents[(i, j)] = pvec_eval(F, self.entries[("D", grid.positions[i - 1])], assign)
                elif (i, j) != (1, grid.n) or grid.include_corner:
                    ents[(i, j)] = pvec_eval(F, self.entries.get(grid.label(i, j), {}), assign)
        degs = tuple(self.diag[g][1] for g in grid.positions)
        return TriangularSystem(grid.n, ents, degs, grid.mpos)

    def all_assignments(self, cap: int = 200_000) -> list:
        """Every solution of the constraints (finite fields only)."""
        outs = [pvar(self.F, v) for v in range(self.nvars)]
        if self.obstruction is not None:
            return []
        pts = enumerate_points(self.F, self.constraints, outs, max_rows=cap)
        return [dict(a) for a in pts.values()]


def boundary_basis(d: LinearMap, deg: int) -> list[dict]:
    """A basis of the image of d inside degree ``deg``."""
    S = d.source
    F = S.field
    src = S.in_degree(deg - d.degree)
    imgs = [d.columns[i] for i in src]
    out, dense = [], []
    tgt = S.in_degree(deg)
    pos = {j: r for r, j in enumerate(tgt)}
    for v in imgs:
        row = vec_to_dense({pos[j]: c for j, c in v.items()}, len(tgt), F.zero)
        if any(row) and rank(F, dense + [row]) > len(dense):
            dense.append(row)
            out.append(v)
    return out


# ---------------------------------------------------------------- Massey sets

@dataclass
class MasseySet:
    """Classes [S^{1,n}] as coefficient tuples over the H basis of one degree."""

    elements: list
    h_space: GradedBasisSpace
    h_indices: tuple
    witnesses: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return not self.elements

    @property
    def contains_zero(self) -> bool:
        return any(not any(e) for e in self.elements)

    @property
    def trivial(self) -> bool:
        return self.empty or self.contains_zero

    def as_vectors(self) -> list[dict]:
        return [{t: c for t, c in zip(self.h_indices, e) if c} for e in self.elements]

    def as_set(self) -> set:
        return set(self.elements)

    def element(self, vec: dict) -> tuple:
        """Coordinates of an H vector in this set's layout."""
        return tuple(vec.get(t, 0) for t in self.h_indices)

    def describe(self) -> list[str]:
        return [self.h_space.fmt(v) for v in self.as_vectors()]


def _lift_classes(classes, H: GradedBasisSpace, split: CohomologySplitting):
    out = []
    for c in classes:
        if isinstance(c, str):
            vec = H.vec(c)
        else:
            vec = {(H.index(k) if isinstance(k, str) else k): H.field(x) for k, x in c.items()}
            vec = {k: x for k, x in vec.items() if x}
        if not vec:
            raise ValueError("zero classes are not supported as Massey inputs; degree is undefined")
        deg = H.vec_degree(vec)
        out.append((split.g(vec), deg))
    return out


def _cocycles(vectors, space: GradedBasisSpace, degrees=None):
    out = []
    for t, v in enumerate(vectors):
        v = space.vec(v) if not isinstance(v, dict) or any(isinstance(k, str) for k in v) else v
        deg = degrees[t] if degrees is not None else space.vec_degree(v)
        if deg is None:
            raise ValueError("pass degrees for zero cocycles")
        out.append((v, deg))
    return out


def _check_n(n, max_n):
    if n < 3:
        raise ValueError("Massey products need at least three inputs; n = 2 is the plain product mu_2")
    if n > max_n:
        raise ValueError(f"n = {n} exceeds the bound {max_n}")


def _finish(ctx, sym, grid, out_module, meta, verify=True) -> MasseySet:
    F = ctx.field
    split = ctx.split(out_module)
    H = split.h_space
    deg = sym.shdeg(grid, 1, grid.n) + 2  # S^{1,n} sits one above the corner entry
    idx = tuple(H.in_degree(deg))
    if sym.obstruction is not None:
        meta = dict(meta, obstruction=str(sym.obstruction[0]))
        return MasseySet([], H, idx, {}, meta)
    S = sym.corner_stair(grid)
    fS = linear_map_poly(F, split.f.columns, S)
    outs = [fS.get(t, {}) for t in idx]
    pts = enumerate_points(F, sym.constraints, outs)
    witnesses = {}
    for val, assign in pts.items():
        sysx = sym.concrete(grid, assign)
        if verify:
            chk = is_defining_system(sysx, ctx)
            if not chk:
                raise ArithmeticError(f"enumerated system fails at {chk.failed}")
            cls = split.f(staircase_product(sysx, ctx, 1, grid.n))
            if tuple(cls.get(t, 0) for t in idx) != tuple(F(x) for x in val):
                raise ArithmeticError("class of a witness differs from its symbolic value")
        witnesses[tuple(F(x) for x in val)] = sysx
    elems = sorted(witnesses)
    meta = dict(meta, variables=sym.nvars, constraints=len(sym.constraints))
    return MasseySet(elems, H, idx, witnesses, meta)


def enumerate_defining_systems(A, diagonal, degrees=None, M: AInftyModule | None = None,
                               mpos: int | None = None, full_coset: bool = False,
                               ctx: StairContext | None = None) -> SymbolicSystems:
    """Symbolic defining systems on a diagonal of cocycles (module slot at ``mpos``)."""
    ctx = ctx or StairContext(A, M)
    n = len(diagonal)
    diag = {}
    for t, v in enumerate(diagonal, start=1):
        space = ctx.space(mpos == t)
        (vec, deg), = _cocycles([v], space, None if degrees is None else [degrees[t - 1]])
        if ctx.d(vec, mpos == t):
            raise ValueError(f"diagonal entry {t} is not a cocycle")
        diag[t] = (vec, deg, mpos == t)
    grid = Grid("x", tuple(range(1, n + 1)), mpos)
    return SymbolicSystems(ctx, diag, [grid], full_coset)


def iter_defining_systems(sym: SymbolicSystems, cap: int = 200_000):
    """Yield every essentially different defining system (finite fields)."""
    grid = sym.grids[0]
    for a in sym.all_assignments(cap):
        yield sym.concrete(grid, a)


def massey_set(A: AInftyAlgebra, classes=None, cocycles=None, degrees=None,
               max_n: int = DEFAULT_MAX_N, full_coset: bool = False,
               ctx: StairContext | None = None, verify: bool = True) -> MasseySet:
    """The Massey product set of classes in H(A) (or of explicit cocycles)."""
    ctx = ctx or StairContext(A)
    split = ctx.split_A
    if cocycles is None:
        lifted = _lift_classes(classes, split.h_space, split)
    else:
        lifted = _cocycles(cocycles, A.space, degrees)
    _check_n(len(lifted), max_n)
    sym = enumerate_defining_systems(A, [v for v, _ in lifted], [d for _, d in lifted],
                                     full_coset=full_coset, ctx=ctx)
    meta = {"n": len(lifted), "field": str(A.field), "max_arity": A.max_arity,
            "full_coset": full_coset}
    return _finish(ctx, sym, sym.grids[0], False, meta, verify)


def module_massey_set(M: AInftyModule, classes=None, mpos: int | None = None, cocycles=None,
                      degrees=None, max_n: int = DEFAULT_MAX_N, full_coset: bool = False,
                      ctx: StairContext | None = None, verify: bool = True) -> MasseySet:
    """Massey set with one diagonal slot (``mpos``, 1-based) taken from the module M."""
    ctx = ctx or StairContext(M.algebra, M)
    if mpos is None:
        raise ValueError("mpos (the module slot) is required")
    if cocycles is None:
        lifted = []
        for t, c in enumerate(classes, start=1):
            s = ctx.split(t == mpos)
            lifted += _lift_classes([c], s.h_space, s)
    else:
        lifted = []
        for t, v in enumerate(cocycles, start=1):
            lifted += _cocycles([v], ctx.space(t == mpos), None if degrees is None else [degrees[t - 1]])
    _check_n(len(lifted), max_n)
    sym = enumerate_defining_systems(M.algebra, [v for v, _ in lifted], [d for _, d in lifted],
                                     M=M, mpos=mpos, full_coset=full_coset, ctx=ctx)
    meta = {"n": len(lifted), "field": str(M.field), "module_slot": mpos}
    return _finish(ctx, sym, sym.grids[0], True, meta, verify)


# ---------------------------------------------------------------- pushforward

def push_defining_system(f: AInftyMorphism, sys: TriangularSystem) -> TriangularSystem:
    """y_{p,q} = sum over splittings of p..q (one piece allowed) of f_r on the pieces."""
    F = f.field
    ents = {}
    for p in range(1, sys.n + 1):
        for q in range(p, sys.n + 1):
            if (p, q) == (1, sys.n) and (1, sys.n) not in sys.entries:
                continue
            total: dict = {}
            for pieces in compositions(p, q, f.max_arity, 1):
                tab = f.op(len(pieces))
                if tab:
                    vec_add(F, total, apply_table(F, tab, [sys.get(s, e) for s, e in pieces]))
            ents[(p, q)] = total
    return TriangularSystem(sys.n, ents, sys.diag_degrees, sys.mpos)


def push_corner(f: AInftyMorphism, sys: TriangularSystem, ctx_src) -> dict:
    """f_1 applied to the staircase product of the source system."""
    S = staircase_product(sys, ctx_src, 1, sys.n)
    return apply_table(f.field, f.op(1), [S])
