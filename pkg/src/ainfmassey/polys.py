"""Sparse polynomials over an exact field and a finite-field point enumerator.

A polynomial is ``{monomial: coef}`` where a monomial is a sorted tuple of
variable indices with repetition, ``()`` being the constant monomial.  A
polynomial vector is ``{basis index: polynomial}``.  These carry the
coefficients of a defining system whose free choices are still symbolic.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .exact_linear import FieldSpec, rank


def pconst(F: FieldSpec, c) -> dict:
    c = F(c)
    return {(): c} if c else {}


def pvar(F: FieldSpec, v: int) -> dict:
    return {(v,): F.one}


def padd(F: FieldSpec, acc: dict, P: dict, scale=1) -> dict:
    p = F.p
    for m, c in P.items():
        x = acc.get(m, 0) + scale * c
        if p:
            x %= p
        if x:
            acc[m] = x
        else:
            acc.pop(m, None)
    return acc


def pmul(F: FieldSpec, P: dict, Q: dict) -> dict:
    if not P or not Q:
        return {}
    if len(P) == 1 and () in P:
        c = P[()]
        return {m: F(c * x) for m, x in Q.items() if F(c * x)}
    if len(Q) == 1 and () in Q:
        return pmul(F, Q, P)
    out: dict = {}
    p = F.p
    for m1, c1 in P.items():
        for m2, c2 in Q.items():
            m = tuple(sorted(m1 + m2))
            x = out.get(m, 0) + c1 * c2
            if p:
                x %= p
            if x:
                out[m] = x
            else:
                out.pop(m, None)
    return out


def pvars(P: dict) -> set:
    return {v for m in P for v in m}


def peval(F: FieldSpec, P: dict, values: dict):
    total = F.zero
    for m, c in P.items():
        t = c
        for v in m:
            t = t * values.get(v, 0)
        total = total + t
    return F(total)


def pvec_add(F: FieldSpec, acc: dict, V: dict, scale=1) -> dict:
    for i, P in V.items():
        Q = padd(F, acc.setdefault(i, {}), P, scale)
        if not Q:
            del acc[i]
    return acc


def pvec_scale_poly(F: FieldSpec, V: dict, P: dict) -> dict:
    out = {}
    for i, Q in V.items():
        R = pmul(F, P, Q)
        if R:
            out[i] = R
    return out


def pvec_from_vec(F: FieldSpec, v: dict) -> dict:
    return {i: {(): c} for i, c in v.items() if c}


def pvec_eval(F: FieldSpec, V: dict, values: dict) -> dict:
    out = {}
    for i, P in V.items():
        x = peval(F, P, values)
        if x:
            out[i] = x
    return out


def apply_table_poly(F: FieldSpec, table: dict, vecs: list[dict], index=None) -> dict:
    """Evaluate a multilinear table on polynomial vectors."""
    out: dict = {}
    if any(not v for v in vecs):
        return out
    size = 1
    for v in vecs:
        size *= len(v)
    if size <= len(table):
        keys = (k for k in product(*[list(v) for v in vecs]) if k in table)
    else:
        keys = (k for k in table if all(i in v for i, v in zip(k, vecs)))
    for key in keys:
        coef = vecs[0][key[0]]
        for v, i in zip(vecs[1:], key[1:]):
            coef = pmul(F, coef, v[i])
            if not coef:
                break
        if coef:
            for j, c in table[key].items():
                Q = padd(F, out.setdefault(j, {}), coef, c)
                if not Q:
                    del out[j]
    return out


def linear_map_poly(F: FieldSpec, columns: list[dict], V: dict) -> dict:
    """Apply a linear map given by sparse columns to a polynomial vector."""
    out: dict = {}
    for i, P in V.items():
        for j, c in columns[i].items():
            Q = padd(F, out.setdefault(j, {}), P, c)
            if not Q:
                del out[j]
    return out


class InfiniteEnumerationError(ValueError):
    """A free class choice over an infinite field."""


def _eval_rows(P: dict, col: dict, rows: np.ndarray, p: int) -> np.ndarray:
    acc = np.zeros(rows.shape[0], dtype=np.int64)
    for m, c in P.items():
        t = np.full(rows.shape[0], c % p, dtype=np.int64)
        for v in m:
            t = t * rows[:, col[v]] % p
        acc = (acc + t) % p
    return acc


def enumerate_points(F: FieldSpec, constraints: list[dict], outputs: list[dict],
                     max_rows: int = 5_000_000) -> dict:
    """All values of ``outputs`` at common zeros of ``constraints``.

    Returns {output value tuple: witnessing assignment {var: value}}.
    Variables that appear only linearly in the outputs, never together with
    another such variable and never in a constraint, are handled in closed
    form: for fixed other variables their contribution is a linear span.
    """
    constraints = [c for c in constraints if c]
    if F.p is None:
        for P in constraints + outputs:
            if pvars(P):
                raise InfiniteEnumerationError("symbolic choice over an infinite field")
        if any(constraints):
            return {}
        return {tuple(peval(F, P, {}) for P in outputs): {}}
    p = F.p
    cvars = set().union(*[pvars(c) for c in constraints]) if constraints else set()
    ovars = set().union(*[pvars(o) for o in outputs]) if outputs else set()
    lin = set(ovars - cvars)
    changed = True
    while changed:
        changed = False
        for o in outputs:
            for m in o:
                inm = [v for v in m if v in lin]
                if len(inm) != len(set(inm)):
                    for v in set(inm):
                        if inm.count(v) > 1:
                            lin.discard(v)
                            changed = True
                    inm = [v for v in m if v in lin]
                if len(inm) > 1:
                    for v in inm[1:]:
                        lin.discard(v)
                    changed = True
    search = sorted((cvars | ovars) - lin)
    lin = sorted(lin)
    col = {v: i for i, v in enumerate(search)}
    # attach each constraint to the last search variable it mentions
    by_last: dict = {}
    for c in constraints:
        vs = pvars(c)
        if not vs:
            return {}  # nonzero constant
        by_last.setdefault(max(col[v] for v in vs), []).append(c)
    rows = np.zeros((1, 0), dtype=np.int64)
    vals = np.arange(p, dtype=np.int64)
    for t in range(len(search)):
        n = rows.shape[0]
        if n * p > max_rows:
            raise MemoryError(f"point enumeration exceeds {max_rows} rows")
        rows = np.hstack([np.repeat(rows, p, axis=0), np.tile(vals, n)[:, None]])
        for c in by_last.get(t, ()):
            keep = _eval_rows(c, col, rows, p) == 0
            rows = rows[keep]
            if rows.shape[0] == 0:
                return {}
    # split outputs into the part free of linear variables and the linear coefficients
    base_parts = []
    lin_parts = {v: [] for v in lin}
    for o in outputs:
        base: dict = {}
        coefs: dict = {v: {} for v in lin}
        for m, c in o.items():
            lv = [v for v in m if v in lin]
            if lv:
                rest = tuple(x for x in m if x != lv[0])
                coefs[lv[0]][rest] = (coefs[lv[0]].get(rest, 0) + c) % p
            else:
                base[m] = c
        base_parts.append(base)
        for v in lin:
            lin_parts[v].append(coefs[v])
    base_vals = np.stack([_eval_rows(b, col, rows, p) for b in base_parts], axis=1) \
        if outputs else np.zeros((rows.shape[0], 0), dtype=np.int64)
    lin_vals = [np.stack([_eval_rows(q, col, rows, p) for q in lin_parts[v]], axis=1) for v in lin] \
        if outputs else []
    sig = np.hstack([base_vals] + lin_vals) if lin_vals else base_vals
    _, first = np.unique(sig, axis=0, return_index=True)
    result: dict = {}
    for r in sorted(first.tolist()):
        assign = {v: int(rows[r, col[v]]) for v in search}
        b = [int(x) for x in base_vals[r]]
        gens = [[int(x) for x in lv[r]] for lv in lin_vals]
        # keep an independent subset of generators with their variables
        chosen, chosen_vars = [], []
        for v, g in zip(lin, gens):
            if any(g) and rank(F, chosen + [g]) > len(chosen):
                chosen.append(g)
                chosen_vars.append(v)
        for combo in product(range(p), repeat=len(chosen)):
            val = list(b)
            for s, g in zip(combo, chosen):
                if s:
                    val = [(x + s * y) % p for x, y in zip(val, g)]
            key = tuple(val)
            if key not in result:
                a = dict(assign)
                a.update({v: s for v, s in zip(chosen_vars, combo)})
                result[key] = a
    return result
