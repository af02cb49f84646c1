"""Concrete structures: lens spaces, small minimal algebras, filiform, Hopf, a 4-component link.

Lens space conventions.  The chain coalgebra of L(p,q) over GF(p) is stored
in the shifted convention, with one total co-operation per generator split
by arity.  The minimal model lives on E, X, Y, Z.  Coalgebra morphisms
are stored as letter -> formal sum of words and extended to words
letterwise, without signs since every shifted component has degree 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ainfty_core import (AInftyAlgebra, AInftyCoalgebra, AInftyMorphism, CheckResult,
                          algebra_from_names, check_ainfty, check_coalgebra, check_module,
                          coderivation, dualize_coalgebra, module_over_itself, restrict_module)
from .exact_linear import (CohomologySplitting, FieldSpec, GradedBasisSpace, LinearMap,
                           _is_prime, cohomology_splitting, solve_linear)

# ---------------------------------------------------------------- lens chains


@dataclass
class LensChainModel:
    p: int
    q: int
    C: AInftyCoalgebra

    def gen(self, name: str) -> int:
        return self.C.space.index(name)

    def differential(self) -> LinearMap:
        """The arity one co-operation as a degree -1 map."""
        S = self.C.space
        cols = [{} for _ in range(S.dim)]
        for c, words in self.C.delta.get(1, {}).items():
            cols[c] = {w[0]: x for w, x in words.items()}
        return LinearMap(S, S, -1, cols)

    def homology(self) -> CohomologySplitting:
        return cohomology_splitting(self.differential())

    def fundamental_cycle(self) -> dict:
        return {self.gen(f"s{j}"): self.C.field.one for j in range(self.p)}


def _check_pq(p: int, q: int):
    if p < 3 or not _is_prime(p):
        raise ValueError(f"p must be a prime >= 3, got {p}")
    if not 1 <= q < p:
        raise ValueError(f"q must satisfy 1 <= q < p, got {q}")


def lens_generators(p: int) -> list[tuple[str, int]]:
    gens = [("A", 0), ("B", 0), ("a", 1), ("b", 1)]
    gens += [(f"c{j}", 1) for j in range(p)]
    gens += [(f"alpha{j}", 2) for j in range(p)]
    gens += [(f"beta{j}", 2) for j in range(p)]
    gens += [(f"s{j}", 3) for j in range(p)]
    return gens


def lens_chain_complex(p: int, q: int) -> LensChainModel:
    """Shifted boundary plus Alexander-Whitney coproduct for L(p,q) over GF(p).

    The second term of the coproduct of b is taken as b B, which is what
    the co-Leibniz rule forces.
    """
    _check_pq(p, q)
    F = FieldSpec.gf(p)
    S = GradedBasisSpace.build(F, lens_generators(p))
    ix = S.index

    def c(j):
        return ix(f"c{j % p}")

    def al(j):
        return ix(f"alpha{j % p}")

    def be(j):
        return ix(f"beta{j % p}")

    A, B, a, b = ix("A"), ix("B"), ix("a"), ix("b")
    table: dict = {}

    def put(gen, *terms):
        words: dict = {}
        for coef, w in terms:
            words[w] = F(words.get(w, 0) + coef)
        table[gen] = words

    put(A, (-1, (A, A)))
    put(B, (-1, (B, B)))
    put(a, (-1, (A, a)), (1, (a, A)))
    put(b, (-1, (B, b)), (1, (b, B)))
    for j in range(p):
        put(c(j), (1, (A,)), (-1, (B,)), (-1, (A, c(j))), (1, (c(j), B)))
        put(al(j), (-1, (c(j + 1),)), (1, (c(j),)), (-1, (a,)), (-1, (A, al(j))),
            (1, (a, c(j + 1))), (-1, (al(j), B)))
        put(be(j), (-1, (b,)), (1, (c(j - q),)), (-1, (c(j),)), (-1, (A, be(j))),
            (1, (c(j), b)), (-1, (be(j), B)))
        put(ix(f"s{j}"), (-1, (be(j + 1),)), (1, (be(j),)), (-1, (al(j - q),)),
            (1, (al(j),)), (-1, (A, ix(f"s{j}"))), (1, (a, be(j + 1))),
            (-1, (al(j), b)), (1, (ix(f"s{j}"), B)))
    delta: dict = {1: {}, 2: {}}
    for gen, words in table.items():
        for w, x in words.items():
            if x:
                delta[len(w)].setdefault(gen, {})[w] = x
    C = AInftyCoalgebra(S, delta, max_arity=2, name=f"C(L({p},{q}))")
    res = check_coalgebra(C)
    if not res.ok:
        raise ArithmeticError(f"Delta^2 != 0 for L({p},{q}): {res.witnesses[:3]}")
    return LensChainModel(p, q, C)


# ---------------------------------------------------------------- minimal model

E, X, Y, Z = 0, 1, 2, 3


def _hspace(F: FieldSpec, names=("E", "X", "Y", "Z")) -> GradedBasisSpace:
    return GradedBasisSpace(F, tuple(names), (0, 1, 2, 3))


def lens_minimal_coalgebra(p: int) -> AInftyCoalgebra:
    if p < 3 or not _is_prime(p):
        raise ValueError(f"p must be a prime >= 3, got {p}")
    F = FieldSpec.gf(p)
    delta = {
        2: {E: {(E, E): F(-1)},
            X: {(X, E): F(1), (E, X): F(-1)},
            Y: {(Y, E): F(-1), (E, Y): F(-1)},
            Z: {(Z, E): F(1), (E, Z): F(-1), (X, Y): F(1), (Y, X): F(-1)}},
        p: {Y: {(X,) * p: F(-1)}},
    }
    C = AInftyCoalgebra(_hspace(F), delta, name=f"H(L({p},q))")
    assert check_coalgebra(C).ok
    return C


def lens_minimal_algebra(p: int) -> AInftyAlgebra:
    """The dual algebra on e, x, y, z."""
    A = dualize_coalgebra(lens_minimal_coalgebra(p), names=("e", "x", "y", "z"))
    A.name = f"H*(L({p},q))"
    return A


# ---------------------------------------------------------------- coalgebra morphisms


def _extend(F: FieldSpec, comp: dict, words: dict, max_len: int) -> dict:
    """Apply a letterwise map to a formal sum of words, dropping long words."""
    out: dict = {}
    for w, x in words.items():
        partial = {(): x}
        for letter in w:
            img = comp.get(letter, {})
            nxt: dict = {}
            for u, y in partial.items():
                for v, z in img.items():
                    uv = u + v
                    if len(uv) <= max_len:
                        nxt[uv] = F(nxt.get(uv, 0) + y * z)
            partial = nxt
            if not partial:
                break
        for u, y in partial.items():
            if len(u) <= max_len:
                out[u] = F(out.get(u, 0) + y)
    return {w: x for w, x in out.items() if x}


def _sum(F: FieldSpec, *parts) -> dict:
    out: dict = {}
    for scale, words in parts:
        for w, x in words.items():
            out[w] = F(out.get(w, 0) + scale * x)
    return {w: x for w, x in out.items() if x}


@dataclass
class TruncatedCoalgebraMorphism:
    """Components r(c) = sum of words, valid on words of length <= N."""

    source: AInftyCoalgebra
    target: AInftyCoalgebra
    components: dict
    N: int
    steps: list = field(default_factory=list)

    def __post_init__(self):
        S, T = self.source.space, self.target.space
        for c, words in self.components.items():
            for w in words:
                if sum(T.shdeg(t) for t in w) != S.shdeg(c):
                    raise ValueError(f"component on {S.names[c]} is not of degree 0")

    @property
    def field(self):
        return self.target.field

    def component(self, k: int) -> dict:
        """The arity k part: {source index: {word of length k: coef}}."""
        out = {}
        for c, words in self.components.items():
            part = {w: x for w, x in words.items() if len(w) == k}
            if part:
                out[c] = part
        return out

    def apply(self, words: dict, max_len: int | None = None) -> dict:
        return _extend(self.field, self.components, words, self.N if max_len is None else max_len)

    def defect(self, c: int, bound: int | None = None) -> dict:
        """target(r(c)) - r(source(c)) on words of length <= bound."""
        N = self.N if bound is None else bound
        F = self.field
        lhs = coderivation(F, self.target.space, self.target.full,
                           self.components.get(c, {}), N)
        rhs = self.apply(self.source.full(c), N)
        return _sum(F, (1, lhs), (-1, rhs))

    def check(self, bound: int | None = None) -> CheckResult:
        wit = []
        S = self.source.space
        for c in range(S.dim):
            for w, x in sorted(self.defect(c, bound).items()):
                wit.append((S.names[c], w, x))
        return CheckResult(not wit, wit, self.N if bound is None else bound)

    def linear(self) -> LinearMap:
        S, T = self.source.space, self.target.space
        cols = [{} for _ in range(S.dim)]
        for c, words in self.component(1).items():
            cols[c] = {w[0]: x for w, x in words.items()}
        return LinearMap(S, T, 0, cols)


def compose_coalgebra_morphisms(s: TruncatedCoalgebraMorphism,
                                r: TruncatedCoalgebraMorphism) -> TruncatedCoalgebraMorphism:
    """s after r."""
    N = min(s.N, r.N)
    comps = {c: s.apply(words, N) for c, words in r.components.items()}
    return TruncatedCoalgebraMorphism(r.source, s.target, comps, N)


# ---------------------------------------------------------------- the r solve


@dataclass
class LensSolution:
    """Coefficient families of the quasi-isomorphism r and the structure on the target."""

    p: int
    q: int
    N: int
    a: dict
    b: dict
    c: dict
    alpha: dict
    y: dict
    z: dict
    cconst: int
    theta: AInftyCoalgebra
    r: TruncatedCoalgebraMorphism
    steps: list = field(default_factory=list)

    def z_sums(self) -> dict:
        out: dict = {}
        for (k, l), v in self.z.items():
            out[k + l] = (out.get(k + l, 0) + v) % self.p
        return out


def g_series(p: int, k: int, N: int) -> dict:
    """Coefficients of 1 - (1 - x)^(p-k) mod p, up to x^N."""
    from math import comb
    out = {}
    for i in range(1, min(p - k, N) + 1):
        v = (-comb(p - k, i) * (-1) ** i) % p
        if v:
            out[i] = v
    return out


def _theta(F: FieldSpec, p: int, N: int, y: dict, z: dict) -> AInftyCoalgebra:
    delta: dict = {2: {E: {(E, E): F(-1)},
                       X: {(X, E): F(1), (E, X): F(-1)},
                       Y: {(Y, E): F(-1), (E, Y): F(-1)},
                       Z: {(Z, E): F(1), (E, Z): F(-1)}}}
    for k, v in y.items():
        if v and k <= N:
            delta.setdefault(k, {}).setdefault(Y, {})[(X,) * k] = F(v)
    for (k, l), v in z.items():
        if v and k + l + 1 <= N + 1:
            w = (X,) * k + (Y,) + (X,) * l
            zt = delta.setdefault(len(w), {}).setdefault(Z, {})
            zt[w] = F(zt.get(w, 0) + v)
    return AInftyCoalgebra(_hspace(F, ("E'", "X'", "Y'", "Z'")), delta,
                           max_arity=N + 1, complete=False, name="H'")


def solve_r_morphism(model: LensChainModel, N: int | None = None, verify: bool = True) -> LensSolution:
    """Solve for r: C -> H' and the structure on H', degree by degree in the number of X's.

    Order per X-degree d: a_d (alpha_{p-1} equation), the alpha ladder
    j = 2q, 3q, ... (s_j equations), c_{j,d} for j = p-2..1 (alpha_j
    equations), y_d (alpha_0 equation), b_d = c_{p-q,d}; z comes last
    from the s_0 equation.
    """
    p, q = model.p, model.q
    if N is None:
        N = p + 4
    F = model.C.field
    a = {1: 1}
    b = {1: q % p}
    c = {j: {} for j in range(p)}
    c[p - 1] = {1: 1}
    alpha = {j: {} for j in range(p)}
    alpha[0] = {(0, 0): 1}
    y: dict = {}
    steps: list = []
    ladder = [(m * q) % p for m in range(2, p)]

    def hat(j, m):
        return sum(v for (k, l), v in alpha[j].items() if k + l == m)

    def hat_y(j, d):
        return sum(hat(j, m) * y.get(d - m, 0) for m in range(1, d) if d - m >= p)

    for d in range(1, N + 1):
        a[d] = F((1 if d == 1 else 0) - hat_y(p - 1, d))
        steps.append((f"a_{d}", "alpha_{p-1} equation: r(a) = X - alpha^_{p-1} y^"))
        for j in ladder:
            prev = alpha[(j - q) % p]
            for l in range(0, d):
                k = d - l
                v = prev.get((k, l), 0)
                if j < q and l == 0:
                    v -= a[k]
                v += sum(alpha[j].get((k, l - i), 0) * b[i] for i in range(1, l + 1))
                v = F(v)
                if v:
                    alpha[j][(k, l)] = v
            steps.append((f"alpha_{j},deg {d}", f"s_{j} equation"))
        for j in range(p - 2, 0, -1):
            v = hat_y(j, d) + a[d] + c[j + 1].get(d, 0)
            v -= sum(a[i] * c[j + 1].get(d - i, 0) for i in range(1, d))
            v = F(v)
            if v:
                c[j][d] = v
            steps.append((f"c_{j},{d}", f"alpha_{j} equation"))
        v = F(-c[1].get(d, 0) - a[d] + sum(a[i] * c[1].get(d - i, 0) for i in range(1, d)))
        if v:
            y[d] = v
        steps.append((f"y_{d}", "alpha_0 equation"))
        if d >= 2:
            b[d] = F(c[p - q].get(d, 0))
            steps.append((f"b_{d}", "beta_0 equation: r(b) = r(c_{p-q})"))
    if any(y.get(d, 0) for d in range(1, p)) or y.get(p, 0) != F(-1):
        raise ArithmeticError(f"y series does not start with -X^{p}; the (1-x)^p step failed")
    z: dict = {}
    last = alpha[(p - q) % p]
    for n in range(1, N + 1):
        for l in range(0, n + 1):
            k = n - l
            v = -last.get((k, l), 0)
            if l == 0:
                v += a.get(k, 0)
            if k == 0:
                v -= b.get(l, 0)
            v = F(v)
            if v:
                z[(k, l)] = v
    steps.append(("z", "s_0 equation"))
    cconst = F(z.get((1, 0), 0))
    if F(-z.get((0, 1), 0)) != cconst:
        raise ArithmeticError("degree one part of Theta(Z) is not c(XY - YX)")
    theta = _theta(F, p, N, y, z)
    S = model.C.space
    ix = S.index

    def series(coefs):
        return {(X,) * k: F(v) for k, v in coefs.items() if v and k <= N}

    comps: dict = {ix("A"): {(E,): F(1)}, ix("B"): {(E,): F(1)},
                   ix("a"): series(a), ix("b"): series(b), ix("s0"): {(Z,): F(1)}}
    for j in range(p):
        if c[j]:
            comps[ix(f"c{j}")] = series(c[j])
        comps[ix(f"alpha{j}")] = {(X,) * k + (Y,) + (X,) * l: F(v)
                                  for (k, l), v in alpha[j].items() if v and k + l <= N}
        if 1 <= j <= q:
            comps[ix(f"beta{j}")] = {(Y,): F(1)}
    comps = {k: v for k, v in comps.items() if v}
    r = TruncatedCoalgebraMorphism(model.C, theta, comps, N, steps)
    sol = LensSolution(p, q, N, a, b, c, alpha, y, z, int(cconst), theta, r, steps)
    if verify:
        bad = lens_solution_failures(sol)
        if bad:
            raise ArithmeticError("lens solve failed: " + "; ".join(bad))
    return sol


def lens_solution_failures(sol: LensSolution) -> list[str]:
    bad = []
    if not check_coalgebra(sol.theta, bound=sol.N).ok:
        bad.append("theta_squared: Theta^2 != 0")
    res = sol.r.check()
    if not res.ok:
        bad.append(f"r_morphism: Delta r != r Delta at {res.witnesses[:2]}")
    if sol.cconst != sol.q % sol.p:
        bad.append(f"c_equals_q: c = {sol.cconst} != q")
    if sol.y.get(sol.p) != sol.p - 1:
        bad.append("y_p: y_p != -1")
    if any(v for n, v in sol.z_sums().items() if n >= 2):
        bad.append("z_sums: sum of z_{i,j} over i+j=n is nonzero")
    return bad


# ---------------------------------------------------------------- the s solve


def _theta_coefficients(theta: AInftyCoalgebra, p: int):
    y = {len(w): x for w, x in theta.full(Y).items() if set(w) == {X}}
    z = {}
    for w, x in theta.full(Z).items():
        if w.count(Y) == 1 and set(w) <= {X, Y}:
            k = w.index(Y)
            z[(k, len(w) - 1 - k)] = x
    return y, z


def solve_s_morphism(theta: AInftyCoalgebra, p: int, N: int,
                     target: AInftyCoalgebra | None = None) -> TruncatedCoalgebraMorphism:
    """A morphism H' -> H with s(Y) = Y + sum v X^i Y X^j and s(Z) = cZ + sum w X^i Z X^j.

    v_{0,m} = -y_{m+p}; the w are solved one X-degree at a time.
    """
    target = target or lens_minimal_coalgebra(p)
    F = target.field
    y, z = _theta_coefficients(theta, p)
    c = z.get((1, 0), 0)
    if not c or F(-z.get((0, 1), 0)) != F(c):
        raise ValueError("Theta(Z) must start with c(XY - YX), c invertible")
    sums: dict = {}
    for (i, j), v in z.items():
        if i + j >= 2:
            sums[i + j] = F(sums.get(i + j, 0) + v)
    if any(sums.values()):
        raise ValueError("hypothesis violated: sum of z_{i,j} over i+j=n must vanish")
    if y.get(p, 0) != F(-1):
        raise ValueError("Theta(Y) must contain -X^p")
    comps = {E: {(E,): F(1)}, X: {(X,): F(1)}, Y: {(Y,): F(1)}, Z: {(Z,): F(c)}}
    for k, v in y.items():
        if k > p and v and k - p + 1 <= N:
            comps[Y][(Y,) + (X,) * (k - p)] = F(-v)
    s = TruncatedCoalgebraMorphism(theta, target, comps, N)
    for m in range(1, N - 1):
        res = s.defect(Z, m + 2)
        rows = {w: x for w, x in res.items() if len(w) == m + 2 and w.count(Y) == 1
                and set(w) <= {X, Y}}
        if not rows:
            continue
        cols = [(i, m - i) for i in range(m + 1)]
        # the unknown w_{i,j} contributes X^i (XY - YX) X^j
        row_keys = [(X,) * t + (Y,) + (X,) * (m + 1 - t) for t in range(m + 2)]
        A = []
        for rk in row_keys:
            t = rk.index(Y)
            A.append([F((1 if t == i + 1 else 0) - (1 if t == i else 0)) for i, _ in cols])
        rhs = [F(-rows.get(rk, 0)) for rk in row_keys]
        sol = solve_linear(F, A, rhs, len(cols))
        if not sol.consistent:
            raise ArithmeticError(f"w ladder inconsistent at X-degree {m}")
        for (i, j), v in zip(cols, sol.particular):
            if v:
                comps[Z][(X,) * i + (Z,) + (X,) * j] = F(v)
    s = TruncatedCoalgebraMorphism(theta, target, comps, N)
    res = s.check()
    if not res.ok:
        raise ArithmeticError(f"Delta s != s Theta: {res.witnesses[:3]}")
    return s


def lens_quasi_isomorphism_check(model: LensChainModel, sol: LensSolution,
                                 s: TruncatedCoalgebraMorphism) -> bool:
    """(s r)_1 sends homology representatives of C to a basis of H."""
    sr = compose_coalgebra_morphisms(s, sol.r).linear()
    split = model.homology()
    images = [sr(col) for col in split.g.columns]
    F = model.C.field
    from .exact_linear import rank
    M = [[img.get(t, F.zero) for t in range(4)] for img in images]
    return len(images) == 4 and rank(F, M) == 4


# ---------------------------------------------------------------- obstruction


def lens_obstruction(p: int, q: int, q2: int) -> bool:
    """Whether q q' = +-n^2 mod p for some nonzero n (exhaustive squares)."""
    if not _is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    return lens_obstruction_witness(p, q, q2) is not None


def lens_obstruction_witness(p: int, q: int, q2: int) -> int | None:
    """The least n in 1..p-1 with n^2 = +-q q' mod p, or None."""
    if not _is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    t = (q * q2) % p
    for n in range(1, p):
        if (n * n - t) % p == 0 or (n * n + t) % p == 0:
            return n
    return None


# ---------------------------------------------------------------- small minimal algebras


def _b(*degs):
    return [(f"b{d}", d + 1) for d in degs]


def ex_2_9(F: FieldSpec) -> AInftyAlgebra:
    basis = _b(2, 4, 6, 8, 12, 15, 16, 24, 29, 31)
    ops = {2: {("b2", "b12"): "b15", ("b6", "b8"): "b15", ("b4", "b24"): "b29",
               ("b12", "b16"): "b29", ("b6", "b24"): "b31"},
           4: {("b2", "b4", "b8", "b16"): "b31"}}
    return algebra_from_names(F, basis, ops, name="ex_2_9")


def ex_2_10(F: FieldSpec) -> AInftyAlgebra:
    basis = _b(2, 4, 6, 8, 12, 15, 16, 24, 29, 31, 32, 63)
    ops = {2: {("b2", "b12"): "b15", ("b6", "b8"): "b15", ("b4", "b24"): "b29",
               ("b12", "b16"): "b29", ("b6", "b24"): "b31"},
           4: {("b2", "b4", "b8", "b16"): "b31"},
           5: {("b2", "b4", "b8", "b16", "b32"): "b63"}}
    return algebra_from_names(F, basis, ops, name="ex_2_10")


def circle_example(F: FieldSpec) -> AInftyAlgebra:
    basis = _b(*[2 ** i for i in range(1, 10)], 6, 12, 24, 96, 192, 384,
               15, 29, 225, 449, 511, 1023) + [("bt1023", 1024)]
    powers = tuple(f"b{2 ** i}" for i in range(1, 10))
    ops = {2: {("b2", "b12"): "b15", ("b6", "b8"): "b15",
               ("b12", "b16"): "b29", ("b4", "b24"): "b29",
               ("b32", "b192"): "b225", ("b96", "b128"): "b225",
               ("b64", "b384"): "b449", ("b192", "b256"): "b449"},
           6: {("b6", "b24", "b32", "b64", "b128", "b256"): "b511",
               ("b2", "b4", "b8", "b16", "b96", "b384"): "b511"},
           8: {powers[:8]: {"b511": -1},
               ("b6", "b8", "b16", "b32", "b64", "b128", "b256", "b512"): "b1023",
               ("b2", "b4", "b8", "b16", "b32", "b64", "b384", "b512"): "bt1023"}}
    return algebra_from_names(F, basis, ops, name="circle")


def a3_example(F: FieldSpec) -> AInftyAlgebra:
    basis = _b(2, 4, 6, 8, 15, 16, 31)
    ops = {2: {("b6", "b8"): "b15"},
           3: {("b2", "b4", "b8"): "b15", ("b6", "b8", "b16"): "b31"}}
    return algebra_from_names(F, basis, ops, name="a3_example")


# ---------------------------------------------------------------- cdga models


def filiform(F: FieldSpec):
    from .cdga_cyclic import free_cdga
    return free_cdga(F, [("e1", 1), ("e2", 1), ("e3", 1), ("e4", 1)],
                     {"e3": {"e2*e1": 1}, "e4": {"e3*e1": 1}}, name="filiform")


HOPF_TRUNCATION = 7


@dataclass
class HopfBundle:
    base: object          # CommutativeDGA, truncated polynomial model of S^2
    total: object         # CommutativeDGA, exterior model of S^3
    f: AInftyMorphism     # y -> z
    module: object        # AInftyModule over base.algebra
    truncation: int = HOPF_TRUNCATION


def hopf(F: FieldSpec | None = None, truncate: int = HOPF_TRUNCATION) -> HopfBundle:
    """Models of S^2 and S^3 with the module structure a . m = f(a) m."""
    from .cdga_cyclic import free_cdga
    F = F or FieldSpec.rationals()
    base = free_cdga(F, [("x", 2), ("y", 3)], {"y": {"x*x": 1}}, truncate=truncate, name="M(S^2)")
    total = free_cdga(F, [("z", 3)], {}, name="M(S^3)")
    Sb, St = base.space, total.space
    cols = {}
    for i, n in enumerate(Sb.names):
        if n == "1":
            cols[(i,)] = {St.index("1"): F.one}
        elif n == "y":
            cols[(i,)] = {St.index("z"): F.one}
    f = AInftyMorphism(base.algebra, total.algebra, {1: cols}, max_arity=1)
    M = restrict_module(f, module_over_itself(total.algebra))
    M.name = "M(S^3) over M(S^2)"
    return HopfBundle(base, total, f, M, truncate)


# ---------------------------------------------------------------- 4-component link


@dataclass
class FourLinkBundle:
    B: AInftyAlgebra
    splitting: CohomologySplitting
    evaluator: dict       # the cocycle dual to [t], as {basis index: coef}
    literal_evaluator: dict   # t* alone
    products: dict        # the listed intersection pairs


FOUR_LINK_PRODUCTS = {
    ("a", "m"): ["r"], ("b", "n"): ["s"], ("p", "q"): ["t"],
    ("p", "n"): ["t", "u"], ("m", "q"): ["t", "w"], ("m", "n"): ["t", "u", "v", "w"],
}


def four_link() -> FourLinkBundle:
    """GF(2) relative chains with intersection, graded by codimension.

    2-chains a, m, b, n, p, q sit in degree 1 and 1-chains r, s, t, u, v, w
    in degree 2.  Intersection is commutative over GF(2); pairs not listed
    intersect trivially (m.b = n.a = p.b = q.a = 0 among them).
    """
    F = FieldSpec.gf(2)
    two = ["a", "m", "b", "n", "p", "q"]
    one = ["r", "s", "t", "u", "v", "w"]
    S = GradedBasisSpace.build(F, [(n, 1) for n in two] + [(n, 2) for n in one])
    ix = S.index
    mu2: dict = {}
    for (x, y), out in FOUR_LINK_PRODUCTS.items():
        v = {ix(o): F.one for o in out}
        mu2[(ix(x), ix(y))] = v
        mu2[(ix(y), ix(x))] = dict(v)
    mu1 = {(ix("p"),): {ix("r"): F.one}, (ix("q"),): {ix("s"): F.one}}
    B = AInftyAlgebra(S, {1: mu1, 2: mu2}, max_arity=2, name="C(S^3,L)")
    H = GradedBasisSpace.build(F, [(n, 1) for n in ("a", "m", "b", "n")]
                               + [(n, 2) for n in ("t", "u", "v", "w")])
    d = B.differential()
    fcols = [{} for _ in range(S.dim)]
    for n in H.names:
        fcols[ix(n)] = {H.index(n): F.one}
    gcols = [{ix(n): F.one} for n in H.names]
    hcols = [{} for _ in range(S.dim)]
    hcols[ix("r")] = {ix("p"): F.one}
    hcols[ix("s")] = {ix("q"): F.one}
    split = CohomologySplitting(d, H, LinearMap(S, H, 0, fcols), LinearMap(H, S, 0, gcols),
                                LinearMap(S, S, -1, hcols))
    bad = split.verify()
    if bad:
        raise ArithmeticError("4-link splitting: " + ", ".join(bad))
    # mod 2 the arcs t, u, v, w are homologous in the link complement,
    # so the functional dual to [t] takes the value 1 on each of them
    dual_t = {ix(n): F.one for n in ("t", "u", "v", "w")}
    return FourLinkBundle(B, split, dual_t, {ix("t"): F.one}, dict(FOUR_LINK_PRODUCTS))


# ---------------------------------------------------------------- library


LIBRARY = ("ex_2_9", "ex_2_10", "circle", "a3_example", "filiform", "hopf", "four_link")


def example_library(name: str, p: int = 3):
    """Named example structures; ``p`` picks GF(p) where the example allows it."""
    F = FieldSpec.gf(p)
    if name == "ex_2_9":
        return ex_2_9(F)
    if name == "ex_2_10":
        return ex_2_10(F)
    if name == "circle":
        return circle_example(F)
    if name == "a3_example":
        return a3_example(F)
    if name == "filiform":
        return filiform(F)
    if name == "hopf":
        return hopf()
    if name == "four_link":
        return four_link()
    if name == "lens":
        return lens_minimal_algebra(p)
    raise KeyError(f"unknown example {name!r}; known: {', '.join(LIBRARY + ('lens',))}")


def validate_example(obj) -> bool:
    if isinstance(obj, AInftyAlgebra):
        return check_ainfty(obj).ok
    if isinstance(obj, HopfBundle):
        return (not obj.base.validate() and not obj.total.validate()
                and check_module(obj.module).ok)
    if isinstance(obj, FourLinkBundle):
        return check_ainfty(obj.B).ok and not obj.splitting.verify()
    validate = getattr(obj, "validate", None)
    return validate is not None and not validate()
