"""A-infinity algebras, morphisms, modules and coalgebras.

Every operation is stored in the shifted convention as a sparse table
``{input index tuple: sparse output vector}``.  Shifted degrees are the
stored (unshifted) basis degrees minus one, so every shifted structure map
has degree +1 and all signs are Koszul signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .exact_linear import FieldSpec, GradedBasisSpace, LinearMap, vec_add


# ---------------------------------------------------------------- signs

def koszul_sign(op_degree: int, passed: list[int] | tuple) -> int:
    """(-1)^(op_degree * sum(passed)) for an operator moving past arguments."""
    return -1 if (op_degree * sum(passed)) % 2 else 1


def shift_sign(shdegs) -> int:
    """Sign relating shifted and unshifted k-ary maps on inputs of these shifted degrees."""
    k = len(shdegs)
    e = sum(d * (k - 1 - i) for i, d in enumerate(shdegs))
    return -1 if e % 2 else 1


@dataclass
class MultilinearOp:
    """A homogeneous sparse multilinear map with a role tag."""

    shape: tuple
    degree: int
    table: dict
    role: str = "algebra"


def shift_op(F: FieldSpec, table: dict, space: GradedBasisSpace) -> dict:
    """Convert an unshifted table to the shifted convention (an involution)."""
    out = {}
    for key, vec in table.items():
        s = shift_sign([space.shdeg(i) for i in key])
        out[key] = {j: F(s * c) for j, c in vec.items() if F(s * c)}
    return out


unshift_op = shift_op


@dataclass
class CheckResult:
    ok: bool
    witnesses: list = field(default_factory=list)
    bound: int | None = None

    def __bool__(self):
        return self.ok


def _clean(table: dict) -> dict:
    return {k: v for k, v in table.items() if v}


def _check_degrees(tab: dict, deg_of_key, out_space: GradedBasisSpace, op_degree: int, label: str):
    for key, vec in tab.items():
        want = deg_of_key(key) + op_degree
        for j in vec:
            if out_space.shdeg(j) != want:
                raise ValueError(f"{label} entry {key} breaks degree homogeneity: "
                                 f"output {out_space.names[j]} has shifted degree "
                                 f"{out_space.shdeg(j)}, expected {want}")


def apply_table(F: FieldSpec, table: dict, vecs: list[dict]) -> dict:
    """Evaluate a sparse multilinear table on sparse vectors."""
    out: dict = {}
    if any(not v for v in vecs):
        return out
    size = 1
    for v in vecs:
        size *= len(v)
    if size <= len(table):
        for key in product(*[list(v) for v in vecs]):
            ovec = table.get(key)
            if ovec:
                c = 1
                for v, i in zip(vecs, key):
                    c = c * v[i]
                vec_add(F, out, ovec, c)
    else:
        for key, ovec in table.items():
            c = 1
            for v, i in zip(vecs, key):
                x = v.get(i)
                if not x:
                    break
                c = c * x
            else:
                vec_add(F, out, ovec, c)
    return out


def compose_at(F: FieldSpec, outer: dict, pos: int, inner: dict, sign_fn=None) -> dict:
    """Insert ``inner`` into slot ``pos`` of ``outer``; sign_fn(okey, ikey) -> +-1."""
    index: dict = {}
    for okey, ovec in outer.items():
        index.setdefault(okey[pos], []).append((okey, ovec))
    out: dict = {}
    for ikey, ivec in inner.items():
        for c, coef in ivec.items():
            for okey, ovec in index.get(c, ()):
                key = okey[:pos] + ikey + okey[pos + 1:]
                s = sign_fn(okey, ikey) if sign_fn else 1
                vec_add(F, out.setdefault(key, {}), ovec, s * coef)
    return _clean(out)


def preimage_index(tables: dict) -> dict:
    """{target basis index: [(source key, coef)]} over all arities of a map family."""
    pre: dict = {}
    for tab in tables.values():
        for key, vec in tab.items():
            for c, coef in vec.items():
                pre.setdefault(c, []).append((key, coef))
    return pre


def precompose(F: FieldSpec, outer: dict, slot_pre, max_len: int) -> dict:
    """Sum of outer(phi(..) x ... x phi(..)) with slot preimages from slot_pre(pos, c).

    Returns {concatenated source key: output vector}, dropping keys longer
    than max_len.  No signs: every inserted map has degree zero.
    """
    out: dict = {}
    for okey, ovec in outer.items():
        choices = []
        for pos, c in enumerate(okey):
            pre = slot_pre(pos, c)
            if not pre:
                break
            choices.append(pre)
        else:
            _expand(F, choices, 0, (), 1, max_len, ovec, out)
    return _clean(out)


def _expand(F, choices, t, key, coef, max_len, ovec, out):
    if t == len(choices):
        vec_add(F, out.setdefault(key, {}), ovec, coef)
        return
    rest = len(choices) - t - 1
    for k, c in choices[t]:
        if len(key) + len(k) + rest <= max_len:
            _expand(F, choices, t + 1, key + k, coef * c, max_len, ovec, out)


def _merge(F, acc: dict, tab: dict, scale=1):
    for key, vec in tab.items():
        v = vec_add(F, acc.setdefault(key, {}), vec, scale)
        if not v:
            del acc[key]


# ---------------------------------------------------------------- algebras

@dataclass
class AInftyAlgebra:
    """Shifted operations mu[k] on a graded basis; ``complete`` means no ops above max_arity."""

    space: GradedBasisSpace
    mu: dict
    max_arity: int | None = None
    complete: bool = True
    name: str = ""

    def __post_init__(self):
        self.mu = {k: _clean(t) for k, t in self.mu.items() if _clean(t)}
        if self.max_arity is None:
            self.max_arity = max(self.mu, default=1)
        for k, tab in self.mu.items():
            if k < 1:
                raise ValueError("arity must be positive")
            _check_degrees(tab, lambda key: sum(self.space.shdeg(i) for i in key),
                           self.space, 1, f"mu{k}")

    @property
    def field(self) -> FieldSpec:
        return self.space.field

    def op(self, k: int) -> dict:
        return self.mu.get(k, {})

    def apply(self, k: int, vecs: list[dict]) -> dict:
        return apply_table(self.field, self.op(k), vecs)

    def d(self, v: dict) -> dict:
        return self.apply(1, [v])

    def differential(self) -> LinearMap:
        cols = [dict(self.op(1).get((i,), {})) for i in range(self.space.dim)]
        return LinearMap(self.space, self.space, 1, cols)

    def is_minimal(self) -> bool:
        return not self.op(1)

    def check_bound(self) -> int:
        return 2 * self.max_arity - 1 if self.complete else self.max_arity


def stasheff_defect(A: AInftyAlgebra, n: int) -> dict:
    """Sum of mu_k o_i mu_l with k + l - 1 = n; zero for a valid structure."""
    F, S = A.field, A.space
    total: dict = {}
    for l in range(1, n + 1):
        k = n - l + 1
        if k not in A.mu or l not in A.mu:
            continue
        for i in range(k):
            sign = (lambda i: lambda okey, ikey: koszul_sign(1, [S.shdeg(a) for a in okey[:i]]))(i)
            _merge(F, total, compose_at(F, A.mu[k], i, A.mu[l], sign))
    return total


def _witness_list(space_names, defect, label):
    out = []
    for key, vec in sorted(defect.items()):
        out.append((label, key, vec))
    return out


def check_ainfty(A: AInftyAlgebra, bound: int | None = None) -> CheckResult:
    N = A.check_bound()
    if bound is not None:
        N = min(N, bound)
    wit = []
    for n in range(1, N + 1):
        wit += _witness_list(A.space.names, stasheff_defect(A, n), n)
    return CheckResult(not wit, wit, N)


def algebra_from_names(F: FieldSpec, basis, ops: dict, **kw) -> AInftyAlgebra:
    """Build an algebra from {k: {(names...): {name: coef}}} given in the shifted convention."""
    S = GradedBasisSpace.build(F, basis)
    mu = {}
    for k, tab in ops.items():
        t = {}
        for key, out in tab.items():
            ikey = tuple(S.index(x) for x in key)
            v = t.setdefault(ikey, {})
            vec_add(F, v, S.vec(out if isinstance(out, dict) else {out: 1}))
        mu[k] = t
    return AInftyAlgebra(S, mu, **kw)


# ---------------------------------------------------------------- morphisms

@dataclass
class AInftyMorphism:
    source: AInftyAlgebra
    target: AInftyAlgebra
    f: dict
    max_arity: int | None = None
    complete: bool = True      # no components above max_arity

    def __post_init__(self):
        self.f = {k: _clean(t) for k, t in self.f.items() if _clean(t)}
        if self.max_arity is None:
            self.max_arity = max(self.f, default=1)
        src = self.source.space
        for k, tab in self.f.items():
            _check_degrees(tab, lambda key: sum(src.shdeg(i) for i in key),
                           self.target.space, 0, f"f{k}")

    @property
    def field(self):
        return self.source.field

    def op(self, k):
        return self.f.get(k, {})

    def linear(self) -> LinearMap:
        cols = [dict(self.op(1).get((i,), {})) for i in range(self.source.space.dim)]
        return LinearMap(self.source.space, self.target.space, 0, cols)

    def apply(self, k, vecs):
        return apply_table(self.field, self.op(k), vecs)

    def check_bound(self) -> int:
        """Largest arity at which the morphism equation can have a nonzero term."""
        if not self.complete:
            return self.max_arity
        A, B = self.source, self.target
        if not (A.complete and B.complete):
            return min(x.max_arity for x in (A, B) if not x.complete)
        return max(self.max_arity + A.max_arity - 1, B.max_arity * self.max_arity)

    @classmethod
    def identity(cls, A: AInftyAlgebra) -> "AInftyMorphism":
        one = A.field.one
        return cls(A, A, {1: {(i,): {i: one} for i in range(A.space.dim)}}, max_arity=1)


def _by_length(tab: dict) -> dict:
    out: dict = {}
    for key, vec in tab.items():
        out.setdefault(len(key), {})[key] = vec
    return out


def morphism_defect(phi: AInftyMorphism, N: int) -> dict:
    """{n: LHS_n - RHS_n} of the morphism equation for n <= N."""
    F = phi.field
    A, B = phi.source, phi.target
    S = A.space
    lhs: dict = {}
    for k, ftab in phi.f.items():
        for l, mtab in A.mu.items():
            if k + l - 1 > N:
                continue
            for i in range(k):
                sign = (lambda i: lambda okey, ikey: koszul_sign(1, [S.shdeg(a) for a in okey[:i]]))(i)
                _merge(F, lhs, compose_at(F, ftab, i, mtab, sign))
    pre = preimage_index(phi.f)
    rhs: dict = {}
    for k, ntab in B.mu.items():
        if k > N:
            continue
        _merge(F, rhs, precompose(F, ntab, lambda pos, c: pre.get(c), N))
    _merge(F, lhs, rhs, -1)
    return _by_length(lhs)


def check_morphism(phi: AInftyMorphism, bound: int | None = None) -> CheckResult:
    N = phi.check_bound() if bound is None else min(bound, phi.check_bound())
    defect = morphism_defect(phi, N)
    wit = []
    for n in sorted(defect):
        wit += _witness_list(None, defect[n], n)
    return CheckResult(not wit, wit, N)


def compose_morphisms(g: AInftyMorphism, f: AInftyMorphism) -> AInftyMorphism:
    """(g o f)_r = sum g_k(f_{s1} x ... x f_{sk}), truncated at the smaller bound."""
    F = f.field
    complete = f.complete and g.complete
    N = f.max_arity * g.max_arity if complete else min(f.max_arity, g.max_arity)
    pre = preimage_index(f.f)
    total: dict = {}
    for k, gtab in g.f.items():
        if k <= N:
            _merge(F, total, precompose(F, gtab, lambda pos, c: pre.get(c), N))
    return AInftyMorphism(f.source, g.target, _by_length(total), max_arity=N, complete=complete)


# ---------------------------------------------------------------- modules

@dataclass
class AInftyModule:
    """Shifted module maps beta[(k, l)] with keys (a_1..a_k, m, b_1..b_l)."""

    algebra: AInftyAlgebra
    space: GradedBasisSpace
    beta: dict
    max_total: int | None = None
    complete: bool = True
    name: str = ""

    def __post_init__(self):
        self.beta = {kl: _clean(t) for kl, t in self.beta.items() if _clean(t)}
        if self.max_total is None:
            self.max_total = max((k + l for k, l in self.beta), default=0)
        for (k, l), tab in self.beta.items():
            _check_degrees(tab, lambda key, k=k: family_key_degree(self.algebra.space, self.space, key, k),
                           self.space, 1, f"beta{k},{l}")

    @property
    def field(self):
        return self.space.field

    def op(self, k, l):
        return self.beta.get((k, l), {})

    def differential(self) -> LinearMap:
        cols = [dict(self.op(0, 0).get((i,), {})) for i in range(self.space.dim)]
        return LinearMap(self.space, self.space, 1, cols)

    def check_bound(self) -> int:
        if not self.complete:
            return self.max_total
        return self.max_total + max(self.max_total, self.algebra.max_arity - 1)


def family_key_degree(SA: GradedBasisSpace, SM: GradedBasisSpace, key: tuple, mpos: int) -> int:
    return sum(SM.shdeg(x) if t == mpos else SA.shdeg(x) for t, x in enumerate(key))


def _prefix_sign(SA, SM, key, upto, mpos, factor=1):
    """(-1)^(factor * shifted degrees of key[:upto]), the M slot read in SM."""
    e = 0
    for t in range(upto):
        e += SM.shdeg(key[t]) if t == mpos else SA.shdeg(key[t])
    return -1 if (factor * e) % 2 else 1


def family_composites(F, mu: dict, beta: dict, outer: dict, SA, SM_in, N: int) -> dict:
    """The three pre-composition sums of a family ``outer`` with mu and beta.

    ``outer`` maps (k, l) to tables with keys (a.., m, b..) whose M slot
    lies in SM_in; ``beta`` is the module structure on SM_in.  Returns the
    result grouped by (r, s).
    """
    res: dict = {}
    for (k, s), otab in outer.items():
        for l, mtab in mu.items():
            # mu inserted on the left
            if k >= 1 and k + l - 1 + s <= N:
                for i in range(k):
                    sign = (lambda i, k: lambda okey, ikey: _prefix_sign(SA, SM_in, okey, i, k))(i, k)
                    _merge(F, res.setdefault((k + l - 1, s), {}),
                           compose_at(F, otab, i, mtab, sign))
            # mu inserted on the right
            if s >= 1 and k + s + l - 1 <= N:
                for i in range(s):
                    pos = k + 1 + i
                    sign = (lambda pos, k: lambda okey, ikey: _prefix_sign(SA, SM_in, okey, pos, k))(pos, k)
                    _merge(F, res.setdefault((k, s + l - 1), {}),
                           compose_at(F, otab, pos, mtab, sign))
        for (a, b), btab in beta.items():
            if k + a + s + b <= N:
                sign = (lambda k: lambda okey, ikey: _prefix_sign(SA, SM_in, okey, k, k))(k)
                _merge(F, res.setdefault((k + a, s + b), {}),
                       compose_at(F, otab, k, btab, sign))
    return {rs: t for rs, t in res.items() if t}


def check_module(M: AInftyModule, bound: int | None = None) -> CheckResult:
    N = M.check_bound() if bound is None else min(bound, M.check_bound())
    F = M.field
    res = family_composites(F, M.algebra.mu, M.beta, M.beta, M.algebra.space, M.space, N)
    wit = []
    for rs in sorted(res):
        wit += _witness_list(None, res[rs], rs)
    return CheckResult(not wit, wit, N)


def module_over_itself(A: AInftyAlgebra) -> AInftyModule:
    beta = {}
    for n, tab in A.mu.items():
        for k in range(n):
            beta[(k, n - 1 - k)] = dict(tab)
    return AInftyModule(A, A.space, beta, max_total=A.max_arity - 1, complete=A.complete,
                        name=(A.name + " over itself").strip())


def restrict_module(f: AInftyMorphism, N: AInftyModule, bound: int | None = None) -> AInftyModule:
    """Module structure over f.source induced along f."""
    T = N.max_total if bound is None else bound
    beta = pull_family(f, N.beta, T)
    return AInftyModule(f.source, N.space, beta, max_total=T, complete=False,
                        name=(N.name + " restricted").strip())


def pull_family(f: AInftyMorphism, fam: dict, T: int) -> dict:
    """Restrict a family keyed (k, l) along f, keeping total arity k + l <= T."""
    F = f.field
    pre = preimage_index(f.f)
    out: dict = {}
    for (i, j), tab in fam.items():
        for key, vec in tab.items():
            lefts = _concat_choices(F, [pre.get(c) for c in key[:i]], T)
            if not lefts:
                continue
            rights = _concat_choices(F, [pre.get(c) for c in key[i + 1:]], T)
            for lk, lc in lefts.items():
                for rk, rc in rights.items():
                    if len(lk) + len(rk) > T:
                        continue
                    tab2 = out.setdefault((len(lk), len(rk)), {})
                    vec_add(F, tab2.setdefault(lk + (key[i],) + rk, {}), vec, lc * rc)
    return {kl: _clean(t) for kl, t in out.items() if _clean(t)}


def _concat_choices(F, slots, T) -> dict:
    """{concatenated key: coefficient} for all choices of one preimage per slot."""
    acc = {(): F.one}
    for pre in slots:
        if not pre:
            return {}
        nxt: dict = {}
        for k, c in acc.items():
            for k2, c2 in pre:
                if len(k) + len(k2) <= T:
                    key = k + k2
                    v = nxt.get(key, 0) + c * c2
                    nxt[key] = F(v)
        acc = {k: c for k, c in nxt.items() if c}
    return acc


# ---------------------------------------------------------------- coalgebras

@dataclass
class AInftyCoalgebra:
    """Shifted co-operations delta[k] = {basis index: {output key (len k): coef}}."""

    space: GradedBasisSpace
    delta: dict
    max_arity: int | None = None
    complete: bool = True
    name: str = ""

    def __post_init__(self):
        self.delta = {k: {c: {w: x for w, x in v.items() if x} for c, v in t.items()}
                      for k, t in self.delta.items()}
        self.delta = {k: {c: v for c, v in t.items() if v} for k, t in self.delta.items()}
        self.delta = {k: t for k, t in self.delta.items() if t}
        if self.max_arity is None:
            self.max_arity = max(self.delta, default=1)
        S = self.space
        for k, tab in self.delta.items():
            for c, words in tab.items():
                for w in words:
                    if len(w) != k or sum(S.shdeg(x) for x in w) != S.shdeg(c) - 1:
                        raise ValueError(f"Delta{k}({S.names[c]}) has a term of wrong degree or length")

    @property
    def field(self):
        return self.space.field

    def full(self, c: int) -> dict:
        """All co-operations on c as one formal sum of words."""
        out: dict = {}
        for tab in self.delta.values():
            for w, x in tab.get(c, {}).items():
                out[w] = self.field(out.get(w, 0) + x)
        return {w: x for w, x in out.items() if x}


def coderivation(F: FieldSpec, S: GradedBasisSpace, cof, words: dict, max_len: int | None = None) -> dict:
    """Extend a degree -1 map ``cof`` (letter -> words) to words as a coderivation."""
    out: dict = {}
    for w, x in words.items():
        e = 0
        for i, c in enumerate(w):
            s = -1 if e % 2 else 1
            for u, y in cof(c).items():
                nw = w[:i] + u + w[i + 1:]
                if max_len is None or len(nw) <= max_len:
                    out[nw] = F(out.get(nw, 0) + s * x * y)
            e += S.shdeg(c)
    return {w: x for w, x in out.items() if x}


def check_coalgebra(C: AInftyCoalgebra, bound: int | None = None) -> CheckResult:
    F, S = C.field, C.space
    N = (2 * C.max_arity - 1) if C.complete else C.max_arity
    if bound is not None:
        N = min(N, bound)
    wit = []
    for c in range(S.dim):
        sq = coderivation(F, S, C.full, C.full(c), N)
        for w, x in sorted(sq.items()):
            wit.append((len(w), S.names[c], w, x))
    return CheckResult(not wit, wit, N)


def dualize_coalgebra(C: AInftyCoalgebra, names=None) -> AInftyAlgebra:
    """Algebra on the dual basis: mu_k(a_1..a_k) = (-1)^k sum_c <Delta_k c; a_1..a_k> c.

    Degrees are kept as given, so the dual element of c sits in the degree of c.
    The arity sign (-1)^k is the sign of transposing a map of degree k - 2.
    """
    F = C.field
    S = C.space
    if names is not None:
        S = GradedBasisSpace(F, tuple(names), S.degrees)
    mu: dict = {}
    for k, tab in C.delta.items():
        s = -1 if k % 2 else 1
        t = mu.setdefault(k, {})
        for c, words in tab.items():
            for w, x in words.items():
                vec_add(F, t.setdefault(w, {}), {c: F(s * x)})
    return AInftyAlgebra(S, mu, max_arity=C.max_arity, complete=C.complete,
                         name=(C.name + " dual").strip())


def codualize_algebra(A: AInftyAlgebra) -> AInftyCoalgebra:
    """Inverse of dualize_coalgebra."""
    F = A.field
    delta: dict = {}
    for k, tab in A.mu.items():
        s = -1 if k % 2 else 1
        t = delta.setdefault(k, {})
        for key, vec in tab.items():
            for c, x in vec.items():
                words = t.setdefault(c, {})
                words[key] = F(words.get(key, 0) + s * x)
    return AInftyCoalgebra(A.space, delta, max_arity=A.max_arity, complete=A.complete)
