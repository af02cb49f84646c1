"""Plain-text structure files and result reports.

A structure file is line oriented; ``#`` starts a comment.  Sections::

    field gf 3              # or: field rationals
    basis                   # algebra basis, one "name degree" per line
      x 1
    module_basis            # optional module basis
    target_basis            # optional target of a morphism
    ops mu 2                # kind and shape; kinds: mu f beta inner delta1 delta2
      2 ( x x ) -> y:1
    ops mu 2 target         # operations of the morphism target
    meta
      convention shifted    # or unshifted (converted on load; mu, f and beta only)
      truncation 7
      eval t t:1 u:1        # evaluator alias used by --eval

Op lines repeat the shape, list the inputs and give the output as
``name:coef`` terms.  Coalgebra outputs are words written ``A*a:-1``.
Inner product outputs are dual names such as ``m*:1``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction

from .ainfty_core import (AInftyAlgebra, AInftyCoalgebra, AInftyModule, AInftyMorphism,
                          family_key_degree, module_over_itself, shift_sign)
from .exact_linear import FieldSpec, GradedBasisSpace

KINDS = ("mu", "f", "beta", "inner", "delta1", "delta2")
HEADERS = ("field", "basis", "module_basis", "target_basis", "ops", "meta")


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class StructureError(ValueError):
    """A parsed structure violates an invariant; ``check`` names it."""

    def __init__(self, check: str, msg: str):
        super().__init__(f"{check}: {msg}")
        self.check = check


@dataclass
class StructureBundle:
    field: FieldSpec
    algebra: AInftyAlgebra | None = None
    module: AInftyModule | None = None
    inner: object | None = None
    coalgebra: AInftyCoalgebra | None = None
    morphism: AInftyMorphism | None = None
    target: AInftyAlgebra | None = None
    meta: dict = field(default_factory=dict)
    evaluators: dict = field(default_factory=dict)

    def evaluator(self, spec: str) -> dict:
        """An alias from the meta section, or terms like ``t:1,u:1`` or a single name."""
        if spec in self.evaluators:
            return dict(self.evaluators[spec])
        return parse_terms(self.field, spec.replace(",", " ").split(), 0)


# ---------------------------------------------------------------- parsing helpers

def parse_coef(F: FieldSpec, tok: str, lineno: int):
    try:
        return F(tok)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(lineno, f"bad coefficient {tok!r}") from e


def parse_terms(F: FieldSpec, toks, lineno: int) -> dict:
    out: dict = {}
    for tok in toks:
        if tok in ("+", "0"):
            continue
        if ":" in tok:
            name, c = tok.rsplit(":", 1)
            coef = parse_coef(F, c, lineno)
        else:
            name, coef = tok, F.one
        out[name] = F(out.get(name, 0) + coef)
    return {k: v for k, v in out.items() if v}


def _split_sections(text: str):
    sections = []
    cur = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] in HEADERS:
            if toks[0] == "field":
                sections.append(("field", toks[1:], lineno, []))
                cur = None
                continue
            cur = (toks[0], toks[1:], lineno, [])
            sections.append(cur)
        elif cur is None:
            raise ParseError(lineno, f"content outside a section: {line!r}")
        else:
            cur[3].append((lineno, toks))
    return sections


def _parse_field(args, lineno) -> FieldSpec:
    if args[:1] == ["rationals"] and len(args) == 1:
        return FieldSpec.rationals()
    if len(args) == 2 and args[0] == "gf":
        try:
            return FieldSpec.gf(int(args[1]))
        except ValueError as e:
            raise ParseError(lineno, str(e)) from e
    raise ParseError(lineno, "field must be 'gf <p>' or 'rationals'")


def _parse_basis(F, lines) -> GradedBasisSpace:
    pairs, seen = [], set()
    for lineno, toks in lines:
        if len(toks) != 2:
            raise ParseError(lineno, "basis lines are 'name degree'")
        name, deg = toks
        if name in seen:
            raise ParseError(lineno, f"duplicate basis element {name!r}")
        seen.add(name)
        try:
            pairs.append((name, int(deg)))
        except ValueError as e:
            raise ParseError(lineno, f"bad degree {deg!r}") from e
    return GradedBasisSpace.build(F, pairs)


def _parse_shape(kind, tok, lineno):
    try:
        if kind in ("beta", "inner"):
            k, l = tok.split(",")
            return (int(k), int(l))
        return int(tok)
    except ValueError as e:
        raise ParseError(lineno, f"bad shape {tok!r} for {kind}") from e


def _op_line(toks, lineno):
    """'<shape> ( names ) -> terms' -> (shape token, names, term tokens)."""
    line = " ".join(toks).replace("(", " ( ").replace(")", " ) ").replace(",", " , ")
    toks = line.split()
    try:
        o = toks.index("(")
        c = toks.index(")")
        a = toks.index("->")
    except ValueError as e:
        raise ParseError(lineno, "op lines are '<shape> ( inputs ) -> terms'") from e
    if not (o < c < a) or o != 1 and o != 3:
        raise ParseError(lineno, "op lines are '<shape> ( inputs ) -> terms'")
    shape = "".join(toks[:o])
    names = [t for t in toks[o + 1:c] if t != ","]
    terms = [t for t in toks[a + 1:] if t != ","]
    return shape, names, terms


def _idx(S: GradedBasisSpace, name: str, lineno: int) -> int:
    try:
        return S.index(name)
    except KeyError:
        raise ParseError(lineno, f"unknown name {name!r}") from None


def _vec(F, S, terms, lineno, strip_star=False) -> dict:
    out = {}
    for name, c in parse_terms(F, terms, lineno).items():
        if strip_star:
            if not name.endswith("*"):
                raise ParseError(lineno, f"inner product outputs are dual names, got {name!r}")
            name = name[:-1]
        out[_idx(S, name, lineno)] = c
    return out


def parse_structure(text: str) -> StructureBundle:
    sections = _split_sections(text)
    fields = [s for s in sections if s[0] == "field"]
    if len(fields) != 1:
        raise ParseError(sections[0][2] if sections else 1, "exactly one 'field' line is required")
    F = _parse_field(fields[0][1], fields[0][2])
    spaces = {}
    meta: dict = {}
    evaluators: dict = {}
    for name, args, lineno, lines in sections:
        if name in ("basis", "module_basis", "target_basis"):
            if name in spaces:
                raise ParseError(lineno, f"duplicate section {name}")
            spaces[name] = _parse_basis(F, lines)
        elif name == "meta":
            for ln, toks in lines:
                if toks[0] == "eval":
                    if len(toks) < 3:
                        raise ParseError(ln, "eval lines are 'eval <alias> <terms>'")
                    evaluators[toks[1]] = parse_terms(F, toks[2:], ln)
                else:
                    meta[toks[0]] = " ".join(toks[1:])
    if "basis" not in spaces:
        raise ParseError(1, "a 'basis' section is required")
    S = spaces["basis"]
    SM = spaces.get("module_basis", S)
    ST = spaces.get("target_basis")
    unshifted = meta.get("convention", "shifted") == "unshifted"
    if meta.get("convention", "shifted") not in ("shifted", "unshifted"):
        raise ParseError(1, "convention must be shifted or unshifted")
    tables: dict = {}
    seen: set = set()
    for name, args, lineno, lines in sections:
        if name != "ops":
            continue
        if len(args) not in (2, 3) or args[0] not in KINDS or (len(args) == 3 and args[2] != "target"):
            raise ParseError(lineno, f"op headers are 'ops <kind> <shape> [target]' with kind in {KINDS}")
        kind = args[0]
        on_target = len(args) == 3
        shape = _parse_shape(kind, args[1], lineno)
        if on_target and (kind != "mu" or ST is None):
            raise ParseError(lineno, "'target' ops need kind mu and a target_basis section")
        if kind == "f" and ST is None:
            raise ParseError(lineno, "ops f needs a target_basis section")
        tab = tables.setdefault((kind, shape, on_target), {})
        for ln, toks in lines:
            shp, names, terms = _op_line(toks, ln)
            if _parse_shape(kind, shp, ln) != shape:
                raise ParseError(ln, f"line shape {shp} differs from header shape {args[1]}")
            if kind in ("beta", "inner"):
                k, l = shape
                if len(names) != k + l + 1:
                    raise ParseError(ln, f"expected {k + l + 1} inputs")
                key = tuple(_idx(SM if t == k else S, x, ln) for t, x in enumerate(names))
            elif kind in ("delta1", "delta2"):
                if len(names) != 1:
                    raise ParseError(ln, "coalgebra lines take one input")
                key = (_idx(S, names[0], ln),)
            else:
                if len(names) != shape:
                    raise ParseError(ln, f"expected {shape} inputs")
                key = tuple(_idx(ST if on_target else S, x, ln) for x in names)
            if (kind, shape, on_target, key) in seen:
                raise ParseError(ln, f"duplicate key {tuple(names)} in ops {kind} {args[1]}")
            seen.add((kind, shape, on_target, key))
            if kind in ("delta1", "delta2"):
                words = {}
                for w, c in parse_terms(F, terms, ln).items():
                    letters = tuple(_idx(S, x, ln) for x in w.split("*"))
                    if len(letters) != shape:
                        raise ParseError(ln, f"coalgebra word {w!r} has the wrong length")
                    words[letters] = c
                tab[key] = words
            elif kind == "inner":
                tab[key] = _vec(F, SM, terms, ln, strip_star=True)
            elif kind == "f":
                tab[key] = _vec(F, ST, terms, ln)
            elif kind == "beta":
                tab[key] = _vec(F, SM, terms, ln)
            else:
                tab[key] = _vec(F, ST if on_target else S, terms, ln)
    return _assemble(F, S, SM, ST, spaces, tables, meta, evaluators, unshifted)


def _convert(F, tab, degs_of_key):
    out = {}
    for key, vec in tab.items():
        s = shift_sign(degs_of_key(key))
        out[key] = {j: F(s * c) for j, c in vec.items()}
    return out


def _assemble(F, S, SM, ST, spaces, tables, meta, evaluators, unshifted) -> StructureBundle:
    b = StructureBundle(F, meta=meta, evaluators=evaluators)
    mu = {k: t for (kind, k, tg), t in tables.items() if kind == "mu" and not tg}
    tmu = {k: t for (kind, k, tg), t in tables.items() if kind == "mu" and tg}
    beta = {kl: t for (kind, kl, tg), t in tables.items() if kind == "beta"}
    inner = {kl: t for (kind, kl, tg), t in tables.items() if kind == "inner"}
    fmaps = {k: t for (kind, k, tg), t in tables.items() if kind == "f"}
    delta = {int(kind[-1]): t for (kind, k, tg), t in tables.items() if kind.startswith("delta")}
    if unshifted:
        if inner or delta:
            raise StructureError("convention", "unshifted input is supported for mu, f and beta only")
        fmaps = {k: _convert(F, t, lambda key: [S.shdeg(i) for i in key]) for k, t in fmaps.items()}
        mu = {k: _convert(F, t, lambda key: [S.shdeg(i) for i in key]) for k, t in mu.items()}
        tmu = {k: _convert(F, t, lambda key: [ST.shdeg(i) for i in key]) for k, t in tmu.items()}
        beta = {kl: _convert(F, t, lambda key, k=kl[0]: [SM.shdeg(x) if i == k else S.shdeg(x)
                                                          for i, x in enumerate(key)])
                for kl, t in beta.items()}
    name = meta.get("name", "")
    trunc = {}
    if "truncation" in meta:
        try:
            N = int(meta["truncation"])
        except ValueError:
            raise StructureError("format", "truncation must be an integer") from None
        trunc = {"max_arity": max([N, *mu]), "complete": False}
    try:
        if delta:
            b.coalgebra = AInftyCoalgebra(S, {k: {c[0]: w for c, w in t.items()} for k, t in delta.items()},
                                          name=name, **trunc)
        else:
            b.algebra = AInftyAlgebra(S, mu, name=name, **trunc)
    except ValueError as e:
        raise StructureError("degree", str(e)) from e
    try:
        if "module_basis" in spaces or beta:
            if b.algebra is None:
                raise StructureError("module", "a module needs an algebra")
            mt = {"max_total": trunc["max_arity"] - 1, "complete": False} if trunc else {}
            b.module = AInftyModule(b.algebra, SM, beta, name=name + " module", **mt)
        if ST is not None:
            b.target = AInftyAlgebra(ST, tmu, name="target")
            b.morphism = AInftyMorphism(b.algebra, b.target, fmaps)
    except ValueError as e:
        raise StructureError("degree", str(e)) from e
    if inner:
        from .inner_products import AInftyInnerProduct
        M = b.module or module_over_itself(b.algebra)
        degs = set()
        for (k, l), t in inner.items():
            for key, vec in t.items():
                for j in vec:
                    degs.add(-SM.shdeg(j) - family_key_degree(S, SM, key, k))
        if len(degs) > 1:
            raise StructureError("degree", f"inner product entries have mixed degrees {sorted(degs)}")
        try:
            b.inner = AInftyInnerProduct(M, inner, degs.pop() if degs else 0)
        except ValueError as e:
            raise StructureError("degree", str(e)) from e
    return b


def load_structure(path: str) -> StructureBundle:
    with open(path, encoding="utf-8") as fh:
        return parse_structure(fh.read())


# ---------------------------------------------------------------- emitting

def fmt_coef(F: FieldSpec, c) -> str:
    return F.fmt(c)


def _terms_text(F, names, vec, suffix="") -> str:
    parts = sorted(f"{names[j]}{suffix}:{fmt_coef(F, c)}" for j, c in vec.items() if F(c))
    return " ".join(parts) if parts else "0"


def _basis_lines(S: GradedBasisSpace):
    return [f"  {n} {d}" for d, n in sorted(zip(S.degrees, S.names))]


def _op_lines(shape_tok, names_in, tab, out_text):
    rows = []
    for key, vec in tab.items():
        ins = " ".join(names_in(key))
        body = out_text(vec)
        if body != "0":
            rows.append(f"  {shape_tok} ( {ins} ) -> {body}")
    return sorted(rows)


def emit_structure(b: StructureBundle) -> str:
    F = b.field
    out = ["field " + ("rationals" if not F.is_finite else f"gf {F.p}")]
    base = b.algebra.space if b.algebra is not None else b.coalgebra.space
    out.append("basis")
    out += _basis_lines(base)
    M = b.module
    if M is not None and M.space is not base:
        out.append("module_basis")
        out += _basis_lines(M.space)
    if b.target is not None:
        out.append("target_basis")
        out += _basis_lines(b.target.space)
    S = base
    if b.algebra is not None:
        for k in sorted(b.algebra.mu):
            out.append(f"ops mu {k}")
            out += _op_lines(str(k), lambda key: [S.names[i] for i in key], b.algebra.mu[k],
                             lambda v: _terms_text(F, S.names, v))
    if b.coalgebra is not None:
        for k in sorted(b.coalgebra.delta):
            if k not in (1, 2):
                raise StructureError("format", "only co-operations of arity 1 and 2 can be written")
            out.append(f"ops delta{k} {k}")
            tab = {(c,): w for c, w in b.coalgebra.delta[k].items()}
            out += _op_lines(str(k), lambda key: [S.names[key[0]]], tab,
                             lambda w: " ".join(sorted(
                                 "*".join(S.names[x] for x in word) + ":" + fmt_coef(F, c)
                                 for word, c in w.items() if F(c))) or "0")
    if M is not None:
        SM = M.space
        for k, l in sorted(M.beta):
            out.append(f"ops beta {k},{l}")
            out += _op_lines(f"{k},{l}", lambda key, k=k: [SM.names[x] if i == k else S.names[x]
                                                           for i, x in enumerate(key)],
                             M.beta[(k, l)], lambda v: _terms_text(F, SM.names, v))
    if b.target is not None:
        T = b.target.space
        for k in sorted(b.target.mu):
            out.append(f"ops mu {k} target")
            out += _op_lines(str(k), lambda key: [T.names[i] for i in key], b.target.mu[k],
                             lambda v: _terms_text(F, T.names, v))
        for k in sorted(b.morphism.f):
            out.append(f"ops f {k}")
            out += _op_lines(str(k), lambda key: [S.names[i] for i in key], b.morphism.f[k],
                             lambda v: _terms_text(F, T.names, v))
    if b.inner is not None:
        SM = b.inner.module.space
        for k, l in sorted(b.inner.maps):
            out.append(f"ops inner {k},{l}")
            out += _op_lines(f"{k},{l}", lambda key, k=k: [SM.names[x] if i == k else S.names[x]
                                                           for i, x in enumerate(key)],
                             b.inner.maps[(k, l)], lambda v: _terms_text(F, SM.names, v, "*"))
    meta = dict(b.meta)
    meta.pop("convention", None)
    top = b.algebra if b.algebra is not None else b.coalgebra
    if not top.complete:
        meta["truncation"] = str(top.max_arity)
    meta_lines = [f"  {k} {v}" for k, v in sorted(meta.items())]
    meta_lines += [f"  eval {a} " + " ".join(sorted(f"{n}:{fmt_coef(F, c)}" for n, c in t.items()))
                   for a, t in sorted(b.evaluators.items())]
    if meta_lines:
        out.append("meta")
        out += meta_lines
    return "\n".join(out) + "\n"


def canonical(text: str) -> str:
    return emit_structure(parse_structure(text))


def digest(b: StructureBundle) -> str:
    return hashlib.sha256(emit_structure(b).encode()).hexdigest()[:16]


# ---------------------------------------------------------------- reports

@dataclass
class ResultReport:
    """Key/value lines; repeated keys (element, witness, entry) keep their order."""

    kind: str
    fields: dict = field(default_factory=dict)
    elements: list = field(default_factory=list)        # list of str (coordinate or scalar)
    witnesses: list = field(default_factory=list)       # (element index, header, entries)

    def text(self) -> str:
        out = [f"report {self.kind}"]
        for k, v in self.fields.items():
            out.append(f"{k} {v}")
        for i, e in enumerate(self.elements):
            out.append(f"element {i} {e}")
        for i, header, entries in self.witnesses:
            out.append(f"witness {i} {header}")
            for grid, a, b, terms in entries:
                out.append(f"entry {i} {grid} {a} {b} {terms}")
        return "\n".join(out) + "\n"


def parse_report(text: str) -> ResultReport:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("report "):
        raise ParseError(1, "a report starts with 'report <kind>'")
    r = ResultReport(lines[0].split(None, 1)[1])
    wit: dict = {}
    for ln in lines[1:]:
        key, _, rest = ln.partition(" ")
        if key == "element":
            _, _, val = rest.partition(" ")
            r.elements.append(val)
        elif key == "witness":
            i, _, header = rest.partition(" ")
            wit[int(i)] = (header, [])
            r.witnesses.append((int(i), header, wit[int(i)][1]))
        elif key == "entry":
            i, grid, a, b, *terms = rest.split()
            wit[int(i)][1].append((grid, int(a), int(b), " ".join(terms)))
        else:
            r.fields[key] = rest
    return r


def system_entries(sys, S_alg, S_mod, grid="x"):
    rows = []
    for (i, j), vec in sorted(sys.entries.items()):
        S = S_mod if sys.is_module_entry(i, j) else S_alg
        rows.append((grid, i, j, _terms_text(S.field, S.names, vec)))
    return rows


def system_header(sys) -> str:
    degs = ",".join(str(d) for d in sys.diag_degrees)
    return f"n={sys.n} mpos={sys.mpos if sys.mpos is not None else '-'} degrees={degs}"


def rebuild_system(header: str, entries, S_alg, S_mod, grid="x"):
    """Inverse of system_header/system_entries for one grid."""
    from .massey import TriangularSystem
    kv = dict(tok.split("=") for tok in header.split() if "=" in tok)
    mpos = None if kv["mpos"] == "-" else int(kv["mpos"])
    degs = tuple(int(d) for d in kv["degrees"].split(","))
    sysx = TriangularSystem(int(kv["n"]), {}, degs, mpos)
    for g, a, b, terms in entries:
        if g != grid:
            continue
        S = S_mod if sysx.is_module_entry(a, b) else S_alg
        sysx.entries[(a, b)] = {S.index(n): c for n, c in
                                parse_terms(S.field, terms.split(), 0).items()}
    return sysx


def replay_witness(b: StructureBundle, report: ResultReport, i: int) -> bool:
    """Rebuild witness ``i`` of a massey or massey-module report and recompute its element."""
    from .ainfty_core import module_over_itself
    from .massey import StairContext, is_defining_system, staircase_product
    if report.kind not in ("massey", "massey-module"):
        raise ValueError(f"cannot replay a {report.kind} report")
    A = b.algebra
    M = None
    if report.kind == "massey-module":
        M = b.module or module_over_itself(A)
    ctx = StairContext(A, M)
    (_, header, entries), = [w for w in report.witnesses if w[0] == i]
    sysx = rebuild_system(header, entries, A.space, M.space if M else A.space)
    if not is_defining_system(sysx, ctx).ok:
        return False
    split = ctx.split(sysx.mpos is not None)
    cls = split.f(staircase_product(sysx, ctx, 1, sysx.n))
    H = split.h_space
    names = report.fields["h_slice"].split()
    names = [] if names == ["-"] else names
    got = " ".join(H.field.fmt(cls.get(H.index(n), 0)) for n in names) or "-"
    return got == report.elements[i]
