import os

import pytest
from click.testing import CliRunner

from ainfmassey import models
from ainfmassey.ainfty_core import check_ainfty
from ainfmassey.cli import cli
from ainfmassey.exact_linear import FieldSpec
from ainfmassey.fileformat import (ParseError, StructureBundle, StructureError, canonical, digest,
                                   emit_structure, load_structure, parse_report, parse_structure,
                                   replay_witness)
from oracles import filiform_unshifted_text

DATA = os.path.join(os.path.dirname(__file__), "data")

TINY = """field gf 3
basis
  a 1
  b 2
ops mu 2
  2 ( a a ) -> b:1
"""


def _lens_bundle(p=3):
    A = models.lens_minimal_algebra(p)
    return StructureBundle(A.field, algebra=A, meta={"name": A.name})


def test_lens_round_trip_keeps_digest():
    b = _lens_bundle()
    text = emit_structure(b)
    b2 = parse_structure(text)
    assert b2.algebra.mu == b.algebra.mu
    assert emit_structure(b2) == text
    assert digest(b2) == digest(b)


def test_emit_is_canonical_under_reordering_and_comments():
    text = emit_structure(_lens_bundle(5))
    lines = text.splitlines()
    # move a mu line and add comments and blank lines
    body = [ln for ln in lines if ln.startswith("  5 (")]
    shuffled = [ln for ln in lines if ln not in body]
    at = shuffled.index("ops mu 5") + 1
    shuffled[at:at] = list(reversed(body)) + ["", "  # a comment"]
    assert canonical("\n".join(shuffled)) == text


def test_degree_violation_is_a_structure_error():
    bad = TINY.replace("b:1", "a:1")
    with pytest.raises(StructureError) as e:
        parse_structure(bad)
    assert e.value.check == "degree"


def test_duplicate_key_reports_its_line():
    text = TINY + "  2 ( a a ) -> b:2\n"
    with pytest.raises(ParseError) as e:
        parse_structure(text)
    assert e.value.lineno == 7


def test_unknown_name_reports_its_line():
    with pytest.raises(ParseError) as e:
        parse_structure(TINY.replace("( a a )", "( a c )"))
    assert e.value.lineno == 6


def test_missing_field_line():
    with pytest.raises(ParseError):
        parse_structure(TINY.replace("field gf 3\n", ""))


def test_rational_coefficients():
    b = parse_structure(TINY.replace("field gf 3", "field rationals").replace("b:1", "b:-3/4"))
    assert b.algebra.mu[2][(0, 0)] == {1: FieldSpec.rationals()("-3/4")}


def test_golden_filiform_file_matches_model():
    b = load_structure(os.path.join(DATA, "filiform_gf5.txt"))
    A = models.filiform(FieldSpec.gf(5)).algebra

    def named(alg):
        n = alg.space.names
        return {k: {tuple(n[i] for i in key): {n[j]: c for j, c in v.items()} for key, v in t.items()}
                for k, t in alg.mu.items()}
    assert sorted(b.algebra.space.names) == sorted(A.space.names)
    assert named(b.algebra) == named(A)
    assert check_ainfty(b.algebra).ok
    assert b.meta["commutative"] == "yes"


def test_golden_file_is_what_the_oracle_writes():
    with open(os.path.join(DATA, "filiform_gf5.txt")) as fh:
        assert canonical(fh.read()) == canonical(filiform_unshifted_text(5))


def test_unshifted_conversion_flips_signs_of_odd_products():
    F = FieldSpec.gf(5)
    b = parse_structure(filiform_unshifted_text(5))
    S = b.algebra.space
    e1, e2, e12 = S.index("e1"), S.index("e2"), S.index("e1e2")
    # plain e1 e2 = e1e2; the shifted product picks up (-1)^{|e1| - 1} = 1
    assert b.algebra.mu[2][(e1, e2)] == {e12: F(1)}
    one, e1e2 = S.index("1"), S.index("e1e2")
    # plain 1 . e1e2 = e1e2; shifted sign (-1)^{0 - 1}
    assert b.algebra.mu[2][(one, e1e2)] == {e1e2: F(-1)}


def test_unshifted_inner_is_refused():
    text = TINY + "ops inner 0,0\n  0,0 ( a ) -> b*:1\nmeta\n  convention unshifted\n"
    with pytest.raises(StructureError) as e:
        parse_structure(text)
    assert e.value.check == "convention"


def test_truncation_meta_marks_structure_incomplete():
    b = parse_structure(TINY + "meta\n  truncation 4\n")
    assert b.algebra.max_arity == 4 and not b.algebra.complete
    assert "truncation 4" in emit_structure(b)


def test_report_round_trip_and_witness_replay(tmp_path):
    path = tmp_path / "lens.txt"
    path.write_text(emit_structure(_lens_bundle(3)))
    res = CliRunner().invoke(cli, ["massey", str(path), "--classes", "x,x,x"])
    assert res.exit_code == 0, res.output
    rep = parse_report(res.output)
    assert rep.text() == res.output
    assert rep.elements == ["1"]
    b = load_structure(str(path))
    assert all(replay_witness(b, rep, i) for i, _, _ in rep.witnesses)


def test_tampered_witness_fails_replay(tmp_path):
    path = tmp_path / "lens.txt"
    path.write_text(emit_structure(_lens_bundle(3)))
    out = CliRunner().invoke(cli, ["massey", str(path), "--classes", "x,x,x"]).output
    rep = parse_report(out.replace("element 0 1", "element 0 2"))
    assert not replay_witness(load_structure(str(path)), rep, 0)
