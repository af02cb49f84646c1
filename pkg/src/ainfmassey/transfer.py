"""Homotopy transfer of an A-infinity structure to cohomology.

Given B with splitting (f, g, h), the p-kernel is
    p_2 = nu_2,   p_n = sum_{l>=2} nu_l(Q_{r_1}, ..., Q_{r_l}),
where Q_1 = id and Q_r = h p_r.  Transferred operations are
mu_n = f p_n g^{(n)} and the inclusion morphism is k_1 = g,
k_n = h p_n g^{(n)}.  Each Q_r has degree zero, so no signs appear.
Everything is evaluated only on tuples of cohomology basis elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .ainfty_core import (AInftyAlgebra, AInftyMorphism, apply_table, check_ainfty,
                          check_morphism, compose_at)
from .exact_linear import CohomologySplitting, GradedBasisSpace, cohomology_splitting, vec_add
from .massey import StairContext, compositions, massey_set

DEFAULT_TRANSFER_ARITY = 6


@dataclass
class TransferData:
    B: AInftyAlgebra
    splitting: CohomologySplitting | None = None
    max_arity: int | None = None

    def __post_init__(self):
        if self.splitting is None:
            self.splitting = cohomology_splitting(self.B.differential())
        bad = self.splitting.verify()
        if bad:
            raise ValueError("splitting identities fail: " + ", ".join(bad))
        if self.max_arity is None:
            self.max_arity = vanishing_arity(self.splitting.h_space) or DEFAULT_TRANSFER_ARITY
        self._q: dict = {}
        self._p: dict = {}

    @property
    def H(self) -> GradedBasisSpace:
        return self.splitting.h_space


def vanishing_arity(H: GradedBasisSpace, cap: int = 64) -> int | None:
    """Largest n with a degree-admissible n-tuple, when all shifted degrees are positive."""
    sh = [d - 1 for d in H.degrees]
    if not sh or min(sh) < 1:
        return None
    lo, hi = min(sh), max(sh)
    n = 1
    while (n + 1) * lo + 1 <= hi and n < cap:
        n += 1
    return max(n, 2)


def _p_on(data: TransferData, key: tuple) -> dict:
    """p_n(g(t_1), ..., g(t_n)) for a tuple of cohomology basis indices."""
    hit = data._p.get(key)
    if hit is not None:
        return hit
    F = data.B.field
    n = len(key)
    out: dict = {}
    for pieces in compositions(0, n - 1, n):
        tab = data.B.op(len(pieces))
        if not tab or len(pieces) == 1:
            continue
        vecs = [_q_on(data, key[s:e + 1]) for s, e in pieces]
        if any(not v for v in vecs):
            continue
        vec_add(F, out, apply_table(F, tab, vecs))
    data._p[key] = out
    return out


def _q_on(data: TransferData, key: tuple) -> dict:
    if len(key) == 1:
        return data.splitting.g.columns[key[0]]
    hit = data._q.get(key)
    if hit is not None:
        return hit
    # degree pruning: the value lives in shifted degree sum(key), if that exists in B
    deg = sum(data.H.degrees[t] - 1 for t in key) + 1
    if not data.B.space.in_degree(deg):
        data._q[key] = {}
        return {}
    v = data.splitting.h(_p_on(data, key))
    data._q[key] = v
    return v


def p_kernel(data: TransferData, n: int) -> dict:
    """The table of p_n on g-images of cohomology basis tuples."""
    if n < 2:
        raise ValueError("the p-kernel starts at n = 2")
    H = data.H
    out = {}
    for key in product(range(H.dim), repeat=n):
        v = _p_on(data, key)
        if v:
            out[key] = v
    return out


def p_kernel_full(B: AInftyAlgebra, h_cols: list, n: int) -> dict:
    """p_n on all of B^{(n)}; only for small checks."""
    F = B.field
    S = B.space
    memo: dict = {}

    def p(key):
        if key in memo:
            return memo[key]
        out: dict = {}
        for pieces in compositions(0, len(key) - 1, len(key)):
            tab = B.op(len(pieces))
            if not tab:
                continue
            vecs = [q(key[s:e + 1]) for s, e in pieces]
            vec_add(F, out, apply_table(F, tab, vecs))
        memo[key] = out
        return out

    def q(key):
        if len(key) == 1:
            return {key[0]: F.one}
        out: dict = {}
        for i, c in p(key).items():
            vec_add(F, out, h_cols[i], c)
        return out

    return {key: v for key in product(range(S.dim), repeat=n) if (v := p(key))}


@dataclass
class TransferResult:
    data: TransferData
    A: AInftyAlgebra
    k: AInftyMorphism
    K: dict = field(default_factory=dict)

    def checks(self, bound: int | None = None) -> dict:
        return {"ainfty": check_ainfty(self.A, bound).ok,
                "morphism": check_morphism(self.k, bound).ok}


def _admissible_tuples(H: GradedBasisSpace, n: int, target_shdegs: set):
    """Tuples of H basis indices whose shifted degree sum + 1 can be hit."""
    by_deg: dict = {}
    for t, d in enumerate(H.degrees):
        by_deg.setdefault(d - 1, []).append(t)
    degs = sorted(by_deg)

    def rec(i, total, acc):
        if i == n:
            if total in target_shdegs:
                yield tuple(acc)
            return
        for d in degs:
            for t in by_deg[d]:
                acc.append(t)
                yield from rec(i + 1, total + d, acc)
                acc.pop()

    yield from rec(0, 0, [])


def transfer(data: TransferData | AInftyAlgebra, max_arity: int | None = None) -> TransferResult:
    """Minimal A-infinity structure on cohomology with the inclusion morphism k."""
    if isinstance(data, AInftyAlgebra):
        data = TransferData(data, max_arity=max_arity)
    elif max_arity is not None:
        data.max_arity = max_arity
    F = data.B.field
    H = data.H
    split = data.splitting
    N = data.max_arity
    H_out = {d - 1 - 1 for d in H.degrees}            # mu_n: sum + 1 = shdeg(out)
    B_out = {d - 1 for d in data.B.space.degrees}      # k_n: sum = shdeg(out)
    mu: dict = {}
    kk: dict = {1: {(t,): dict(split.g.columns[t]) for t in range(H.dim) if split.g.columns[t]}}
    for n in range(2, N + 1):
        mtab, ktab = {}, {}
        for key in _admissible_tuples(H, n, H_out | B_out):
            pv = _p_on(data, key)
            if not pv:
                continue
            m = split.f(pv)
            if m:
                mtab[key] = m
            kv = split.h(pv)
            if kv:
                ktab[key] = kv
        if mtab:
            mu[n] = mtab
        if ktab:
            kk[n] = ktab
    A = AInftyAlgebra(H, mu, max_arity=N, complete=False,
                      name=(data.B.name + " transferred").strip())
    k = AInftyMorphism(A, data.B, kk, max_arity=N, complete=False)
    K = {(a, b): dict(kk.get(a + b + 1, {})) for a in range(N) for b in range(N - a)
         if kk.get(a + b + 1)}
    return TransferResult(data, A, k, K)


@dataclass
class EqualityReport:
    equal: bool
    transferred: list
    original: list
    detail: str = ""

    def __bool__(self):
        return self.equal


def transferred_massey_equality_check(data: TransferData | AInftyAlgebra, classes, result=None,
                                      **kw) -> EqualityReport:
    """Compare Massey sets on H (transferred) and on B (classes lifted via g).

    The transferred set lives in H; k_1 = g induces the identity on cohomology
    with respect to the splitting, so the comparison is coordinatewise.
    """
    if isinstance(data, AInftyAlgebra):
        data = TransferData(data)
    result = result or transfer(data)
    ms_h = massey_set(result.A, classes, **kw)
    ctx_b = StairContext(data.B, split_A=data.splitting)
    ms_b = massey_set(data.B, classes, ctx=ctx_b, **kw)
    # push the transferred classes to B through (k_1)_* = f g = id
    pushed = {tuple(x for x in e) for e in ms_h.elements}
    return EqualityReport(pushed == ms_b.as_set(), sorted(pushed), ms_b.elements)
