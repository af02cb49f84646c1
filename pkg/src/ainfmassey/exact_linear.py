"""Exact linear algebra over GF(p) and the rationals.

Vectors are sparse dicts ``{basis index: coefficient}``; matrices handed to
``row_reduce`` and ``solve_linear`` are dense lists of rows.  Coefficients are
plain ints in ``[0, p)`` for prime fields and ``fractions.Fraction`` for Q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A prime field GF(p) (``p`` set) or the rationals (``p is None``)."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @classmethod
    def gf(cls, p: int) -> "FieldSpec":
        return cls(p)

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    @property
    def one(self):
        return 1 if self.p is not None else Fraction(1)

    @property
    def zero(self):
        return 0 if self.p is not None else Fraction(0)

    def __call__(self, x):
        """Coerce an int, Fraction or numeric string into the field."""
        if isinstance(x, str):
            x = Fraction(x)
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in GF({self.p})")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def mul(self, a, b):
        return a * b % self.p if self.p else a * b

    def neg(self, a):
        return -a % self.p if self.p else -a

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p) if self.p else 1 / Fraction(a)

    def elements(self):
        if self.p is None:
            raise ValueError("the rationals are not enumerable")
        return range(self.p)

    def fmt(self, a) -> str:
        a = self(a)
        if self.p is None and a.denominator != 1:
            return f"{a.numerator}/{a.denominator}"
        return str(int(a))

    def __str__(self):
        return f"GF({self.p})" if self.p else "Q"


# ---------------------------------------------------------------- sparse vectors

def vec_add(F: FieldSpec, acc: dict, v: dict, scale=1) -> dict:
    """acc += scale * v in place; returns acc."""
    p = F.p
    for i, c in v.items():
        x = acc.get(i, 0) + scale * c
        if p:
            x %= p
        if x:
            acc[i] = x
        else:
            acc.pop(i, None)
    return acc


def vec_scale(F: FieldSpec, v: dict, s) -> dict:
    if not s:
        return {}
    if F.p:
        return {i: c * s % F.p for i, c in v.items() if c * s % F.p}
    return {i: c * s for i, c in v.items()}


def vec_sub(F: FieldSpec, u: dict, v: dict) -> dict:
    return vec_add(F, dict(u), v, -1)


def vec_to_dense(v: dict, n: int, zero=0) -> list:
    out = [zero] * n
    for i, c in v.items():
        out[i] = c
    return out


def dense_to_vec(row: Sequence) -> dict:
    return {i: c for i, c in enumerate(row) if c}


# ---------------------------------------------------------------- dense matrices

def row_reduce(F: FieldSpec, matrix: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form with leftmost pivots, scanning rows top down."""
    M = [[F(x) for x in row] for row in matrix]
    nrows = len(M)
    ncols = len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.mul(x, inv) for x in M[r]]
        for i in range(nrows):
            if i != r and M[i][c]:
                s = M[i][c]
                M[i] = [F.add(x, F.neg(F.mul(s, y))) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(F: FieldSpec, matrix) -> int:
    if not matrix:
        return 0
    return len(row_reduce(F, matrix)[1])


@dataclass
class AffineSolutionSet:
    """Solutions of A x = b: ``particular + span(kernel)``, or empty."""

    particular: list | None
    kernel: list[list] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.particular is not None

    @property
    def dimension(self) -> int:
        return len(self.kernel) if self.consistent else -1


def kernel_basis(F: FieldSpec, matrix, ncols: int | None = None) -> list[list]:
    if not matrix:
        n = ncols or 0
        return [[F.one if j == i else F.zero for j in range(n)] for i in range(n)]
    R, pivots = row_reduce(F, matrix)
    ncols = len(R[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [F.zero] * ncols
        v[fc] = F.one
        for r, pc in enumerate(pivots):
            v[pc] = F.neg(R[r][fc])
        basis.append(v)
    return basis


def solve_linear(F: FieldSpec, A: Sequence[Sequence], b: Sequence, ncols: int | None = None) -> AffineSolutionSet:
    """Solve A x = b exactly.  ``ncols`` is needed only when A has no rows."""
    if not A:
        n = ncols or 0
        if any(F(x) for x in b):
            return AffineSolutionSet(None)
        return AffineSolutionSet([F.zero] * n, kernel_basis(F, [], n))
    n = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = row_reduce(F, aug)
    if n in pivots:
        return AffineSolutionSet(None)
    x = [F.zero] * n
    for r, pc in enumerate(pivots):
        x[pc] = R[r][n]
    free = [c for c in range(n) if c not in pivots]
    kernel = []
    for fc in free:
        v = [F.zero] * n
        v[fc] = F.one
        for r, pc in enumerate(pivots):
            v[pc] = F.neg(R[r][fc])
        kernel.append(v)
    return AffineSolutionSet(x, kernel)


def inverse_matrix(F: FieldSpec, M: Sequence[Sequence]) -> list[list]:
    n = len(M)
    aug = [list(row) + [F.one if i == j else F.zero for j in range(n)] for i, row in enumerate(M)]
    R, pivots = row_reduce(F, aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in R]


# ---------------------------------------------------------------- graded spaces

@dataclass(frozen=True)
class GradedBasisSpace:
    """Ordered basis of named, graded elements.  Degrees are unshifted."""

    field: FieldSpec
    names: tuple
    degrees: tuple

    def __post_init__(self):
        if len(self.names) != len(self.degrees):
            raise ValueError("names and degrees differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate basis names")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    @classmethod
    def build(cls, F: FieldSpec, pairs: Iterable[tuple[str, int]]) -> "GradedBasisSpace":
        pairs = list(pairs)
        return cls(F, tuple(n for n, _ in pairs), tuple(int(d) for _, d in pairs))

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown basis element {name!r}") from None

    def shdeg(self, i: int) -> int:
        return self.degrees[i] - 1

    def in_degree(self, d: int) -> list[int]:
        return [i for i, x in enumerate(self.degrees) if x == d]

    def degree_set(self) -> list[int]:
        return sorted(set(self.degrees))

    def vec(self, spec) -> dict:
        """Build a vector from a name, a dict {name: coef} or a sparse dict."""
        if isinstance(spec, str):
            return {self.index(spec): self.field.one}
        out = {}
        for k, c in spec.items():
            i = self.index(k) if isinstance(k, str) else k
            vec_add(self.field, out, {i: self.field(c)})
        return out

    def vec_degree(self, v: dict) -> int | None:
        ds = {self.degrees[i] for i in v}
        if len(ds) > 1:
            raise ValueError("vector is not homogeneous")
        return ds.pop() if ds else None

    def fmt(self, v: dict) -> str:
        if not v:
            return "0"
        F = self.field
        return " + ".join(f"{F.fmt(c)}*{self.names[i]}" for i, c in sorted(v.items()))


@dataclass
class LinearMap:
    """A homogeneous linear map stored by the images of basis elements."""

    source: GradedBasisSpace
    target: GradedBasisSpace
    degree: int
    columns: list  # columns[i] = sparse image of source basis element i

    def __post_init__(self):
        for i, col in enumerate(self.columns):
            for j in col:
                if self.target.degrees[j] != self.source.degrees[i] + self.degree:
                    raise ValueError(
                        f"{self.source.names[i]} -> {self.target.names[j]} breaks degree {self.degree}")

    @classmethod
    def zero(cls, source, target, degree=0) -> "LinearMap":
        return cls(source, target, degree, [{} for _ in range(source.dim)])

    @classmethod
    def identity(cls, space) -> "LinearMap":
        return cls(space, space, 0, [{i: space.field.one} for i in range(space.dim)])

    def __call__(self, v: dict) -> dict:
        out: dict = {}
        F = self.target.field
        for i, c in v.items():
            vec_add(F, out, self.columns[i], c)
        return out

    def compose(self, other: "LinearMap") -> "LinearMap":
        """self after other."""
        return LinearMap(other.source, self.target, self.degree + other.degree,
                         [self(col) for col in other.columns])

    def matrix(self, src_idx: Sequence[int], tgt_idx: Sequence[int]) -> list[list]:
        """Dense block with rows indexed by tgt_idx and columns by src_idx."""
        F = self.target.field
        pos = {j: r for r, j in enumerate(tgt_idx)}
        M = [[F.zero] * len(src_idx) for _ in tgt_idx]
        for c, i in enumerate(src_idx):
            for j, x in self.columns[i].items():
                M[pos[j]][c] = x
        return M

    def __eq__(self, other):
        return (isinstance(other, LinearMap) and self.degree == other.degree
                and self.columns == other.columns)


# ---------------------------------------------------------------- cohomology

@dataclass
class CohomologySplitting:
    """H with f: C -> H, g: H -> C and h: C -> C satisfying gf - id = dh + hd."""

    d: LinearMap
    h_space: GradedBasisSpace
    f: LinearMap
    g: LinearMap
    h: LinearMap

    def verify(self) -> list[str]:
        """Names of the failing identities (empty when all hold)."""
        C = self.d.source
        bad = []
        if any(self.d(col) for col in self.g.columns):
            bad.append("d g = 0")
        if any(self.f(col) != {i: C.field.one} for i, col in enumerate(self.g.columns)):
            bad.append("f g = id")
        F = C.field
        for i in range(C.dim):
            e = {i: F.one}
            lhs = vec_sub(F, self.g(self.f(e)), e)
            rhs = vec_add(F, self.d(self.h(e)), self.h(self.d(e)))
            if lhs != rhs:
                bad.append(f"g f - id = d h + h d at {C.names[i]}")
                break
        return bad

    def ranks(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d in self.h_space.degrees:
            out[d] = out.get(d, 0) + 1
        return out


def _independent_extend(F, chosen: list[list], candidates: list[list]) -> list[int]:
    """Greedy: indices of candidates that enlarge span(chosen) in turn."""
    basis = [list(v) for v in chosen]
    r = rank(F, basis) if basis else 0
    picked = []
    for k, v in enumerate(candidates):
        trial = basis + [list(v)]
        rr = rank(F, trial)
        if rr > r:
            basis, r = trial, rr
            picked.append(k)
    return picked


def cohomology_splitting(d: LinearMap, names=None) -> CohomologySplitting:
    """Deterministic splitting of a finite complex (d of degree +1 or -1).

    In each degree the chain space is written as B + Z' + W where B = im d,
    Z' spans chosen class representatives and W complements the cocycles.
    B is given the basis d(w) for w in the basis of W one step down, and
    h(d w) = -w, so that g f - id = d h + h d.
    """
    C = d.source
    F = C.field
    if d.target != C:
        raise ValueError("differential must be an endomorphism")
    for i in range(C.dim):
        if d(d.columns[i]):
            raise ValueError(f"d squared is nonzero at {C.names[i]}")
    step = d.degree
    degrees = C.degree_set()
    # W[n]: chosen complement of the cocycles in degree n (lists of basis idx-vectors)
    W: dict[int, list[dict]] = {}
    Z: dict[int, list[list]] = {}
    for n in degrees:
        idx = C.in_degree(n)
        tgt = C.in_degree(n + step)
        D = d.matrix(idx, tgt) if tgt else []
        ker = kernel_basis(F, D, len(idx)) if tgt else kernel_basis(F, [], len(idx))
        Z[n] = ker
        unit = [[F.one if a == b else F.zero for b in range(len(idx))] for a in range(len(idx))]
        picked = _independent_extend(F, ker, unit)
        W[n] = [{idx[k]: F.one} for k in picked]

    h_pairs = []
    reps: list[dict] = []
    h_cols: list[dict] = [{} for _ in range(C.dim)]
    f_rows: dict[int, list] = {}  # per degree: coordinate matrix
    coord_info = {}
    for n in degrees:
        idx = C.in_degree(n)
        m = len(idx)
        pos = {j: r for r, j in enumerate(idx)}
        bvecs = [d(w) for w in W.get(n - step, [])]
        bdense = [vec_to_dense({pos[j]: c for j, c in b.items()}, m, F.zero) for b in bvecs]
        picked = _independent_extend(F, bdense, Z[n])
        zreps = [Z[n][k] for k in picked]
        wdense = [vec_to_dense({pos[j]: c for j, c in w.items()}, m, F.zero) for w in W[n]]
        basis = bdense + zreps + wdense
        if len(basis) != m:
            raise ArithmeticError("splitting construction failed to span")
        first = len(reps)
        for z in zreps:
            reps.append({idx[r]: c for r, c in enumerate(z) if c})
            h_pairs.append(n)
        # columns of basis as matrix; coordinates = inverse * e
        Bmat = [[basis[c][r] for c in range(m)] for r in range(m)]
        inv = inverse_matrix(F, Bmat) if m else []
        coord_info[n] = (idx, inv, len(bdense), len(zreps), first)

    if names is None:
        # a class represented by a single basis element keeps that element's name
        names = []
        for k, r in enumerate(reps):
            (i, c), = r.items() if len(r) == 1 else ((None, None),)
            names.append(C.names[i] if c == F.one else f"h{k}")
        if len(set(names)) != len(names):
            names = [f"h{k}" for k in range(len(reps))]
    H = GradedBasisSpace(F, tuple(names), tuple(h_pairs))
    f_cols: list[dict] = [{} for _ in range(C.dim)]
    for n, (idx, inv, nb, nz, first) in coord_info.items():
        wprev = W.get(n - step, [])
        for r, j in enumerate(idx):
            coords = [inv[a][r] for a in range(len(idx))]
            f_cols[j] = {first + t: coords[nb + t] for t in range(nz) if coords[nb + t]}
            hv: dict = {}
            for a in range(nb):
                if coords[a]:
                    vec_add(F, hv, wprev[a], F.neg(coords[a]))
            h_cols[j] = hv
    f = LinearMap(C, H, 0, f_cols)
    g = LinearMap(H, C, 0, reps)
    h = LinearMap(C, C, -step, h_cols)
    return CohomologySplitting(d, H, f, g, h)
