"""Independent brute-force oracles used by the tests.

These deliberately avoid the library's solvers: they walk every coefficient
choice and apply operation tables directly.
"""

from __future__ import annotations

import itertools


def gf_vectors(p, dim):
    return itertools.product(range(p), repeat=dim)


def apply_op(p, table, vecs):
    """Multilinear extension of a sparse table over GF(p), written out by hand."""
    out = {}
    for combo in itertools.product(*[list(v.items()) for v in vecs]):
        key = tuple(i for i, _ in combo)
        coef = 1
        for _, c in combo:
            coef = coef * c % p
        for j, c in table.get(key, {}).items():
            out[j] = (out.get(j, 0) + coef * c) % p
    return {j: c for j, c in out.items() if c}


def splittings(i, j):
    """Ways to cut i..j into at least two consecutive pieces."""
    cuts = list(range(i, j))
    for r in range(1, len(cuts) + 1):
        for chosen in itertools.combinations(cuts, r):
            bounds = [i] + [c + 1 for c in chosen]
            ends = list(chosen) + [j]
            yield list(zip(bounds, ends))


def stair(p, mu, x, i, j):
    total = {}
    for pieces in splittings(i, j):
        tab = mu.get(len(pieces))
        if not tab:
            continue
        for k, c in apply_op(p, tab, [x.get(pc, {}) for pc in pieces]).items():
            total[k] = (total.get(k, 0) + c) % p
    return {k: c for k, c in total.items() if c}


def brute_minimal_massey(A, diag_names):
    """Every corner class over every coefficient choice, for a minimal algebra over GF(p).

    Entries are chosen length by length; a branch stops as soon as a
    non-corner staircase fails to vanish.  Returns {corner vector as a
    sorted tuple of (index, coef)}.
    """
    p = A.field.p
    S = A.space
    mu = A.mu
    assert not mu.get(1), "oracle is for minimal algebras"
    n = len(diag_names)
    sh = [S.shdeg(S.index(nm)) for nm in diag_names]
    by_sh = {}
    for t in range(S.dim):
        by_sh.setdefault(S.shdeg(t), []).append(t)
    x = {(t, t): {S.index(nm): 1} for t, nm in enumerate(diag_names, start=1)}
    order = [(i, i + L - 1) for L in range(2, n + 1) for i in range(1, n - L + 2)]
    found = set()

    def rec(pos):
        i, j = order[pos]
        s = stair(p, mu, x, i, j)
        if (i, j) == (1, n):
            found.add(tuple(sorted(s.items())))
            return
        if s:
            return
        idx = by_sh.get(sum(sh[i - 1:j]), [])
        for coefs in gf_vectors(p, len(idx)):
            x[(i, j)] = {b: c for b, c in zip(idx, coefs) if c}
            rec(pos + 1)
        x.pop((i, j), None)

    rec(0)
    return found


def circle_points(p):
    return sum(1 for a in range(p) for b in range(p) if (a * a + b * b) % p == 1)


def residue_table(p):
    """{(q, q'): q q' or -q q' is a nonzero square}, by squaring every unit."""
    sq = {n * n % p for n in range(1, p)}
    return {(q, r): (q * r % p in sq) or (-q * r % p in sq)
            for q in range(1, p) for r in range(1, p)}


def brute_rank(p, rows):
    """Rank over GF(p) from the size of the row space (tiny matrices only)."""
    if not rows:
        return 0
    m = len(rows[0])
    span = set()
    for coefs in gf_vectors(p, len(rows)):
        span.add(tuple(sum(c * r[k] for c, r in zip(coefs, rows)) % p for k in range(m)))
    size, r = len(span), 0
    while p ** r < size:
        r += 1
    return r


def poly_series_mul(a, b, N):
    out = [0] * (N + 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j <= N:
                out[i + j] += x * y
    return out


def _mono(bits):
    return "".join(f"e{i + 1}" for i in range(4) if bits >> i & 1) or "1"


def _ext_mul(a, b):
    """Sign and product of exterior monomials given as bitmasks."""
    if a & b:
        return 0, 0
    swaps = sum(1 for i in range(4) if a >> i & 1 for j in range(i) if b >> j & 1)
    return (-1) ** swaps, a | b


def filiform_unshifted_text(p):
    """Lambda(e1..e4), d e3 = e2 e1, d e4 = e3 e1, in plain (unshifted) products."""
    d_gen = {2: {0b0011: -1}, 3: {0b0101: -1}}  # e3 -> -e1e2, e4 -> -e1e3
    lines = [f"field gf {p}", "basis"]
    monos = sorted(range(16), key=lambda m: (bin(m).count("1"), m))
    lines += [f"  {_mono(m)} {bin(m).count('1')}" for m in monos]
    lines.append("ops mu 1")
    for m in monos:
        letters = [i for i in range(4) if m >> i & 1]
        out = {}
        for t, i in enumerate(letters):
            pre = sum(1 << j for j in letters[:t])
            post = sum(1 << j for j in letters[t + 1:])
            for D, c in d_gen.get(i, {}).items():
                s1, x = _ext_mul(pre, D)
                s2, y = _ext_mul(x, post) if s1 else (0, 0)
                if s1 and s2:
                    out[y] = out.get(y, 0) + (-1) ** t * c * s1 * s2
        terms = " ".join(f"{_mono(k)}:{v % p}" for k, v in sorted(out.items()) if v % p)
        if terms:
            lines.append(f"  1 ( {_mono(m)} ) -> {terms}")
    lines.append("ops mu 2")
    for a in monos:
        for b in monos:
            s, m = _ext_mul(a, b)
            if s:
                lines.append(f"  2 ( {_mono(a)} {_mono(b)} ) -> {_mono(m)}:{s % p}")
    lines += ["meta", "  convention unshifted", "  commutative yes", "  name filiform"]
    return "\n".join(lines) + "\n"
