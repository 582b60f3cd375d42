import math
from fractions import Fraction

import pytest
import hypothesis.strategies as st
from hypothesis import given

from fractal_zeta.sets import AString, DisjointUnion, GeneralizedCantor, Grill, Scaled, Sphere
from fractal_zeta.setspec import SpecError, default_delta, describe, evaluate_number, load_spec, parse_spec


@pytest.mark.parametrize(
    "text, value",
    [("1/3", Fraction(1, 3)), ("2**-3", Fraction(1, 8)), ("-(1+2)*3", Fraction(-9)), ("0.25", 0.25)],
)
def test_evaluate_exact(text, value):
    v = evaluate_number(text)
    assert v == value and type(v) is type(value)


def test_evaluate_functions():
    assert evaluate_number("log(2)/log(3)") == pytest.approx(math.log(2) / math.log(3))
    assert evaluate_number("sqrt(2)*pi") == pytest.approx(math.sqrt(2) * math.pi)
    assert evaluate_number("3**(1/2)") == pytest.approx(math.sqrt(3))


@pytest.mark.parametrize("text", ["__import__('os')", "x", "1/0", "1+", "abs(2)", "[1]", "log(2, 3)"])
def test_evaluate_rejects(text):
    with pytest.raises(ValueError):
        evaluate_number(text)


@given(st.integers(-1000, 1000), st.integers(1, 1000))
def test_evaluate_fraction_roundtrip(p, q):
    assert evaluate_number(f"{p}/{q}") == Fraction(p, q)


@pytest.mark.parametrize(
    "text, cls",
    [
        ("kind=cantor m=2 a=1/3", GeneralizedCantor),
        ("kind=astring a=1", AString),
        ("kind=sphere N=3", Sphere),
        ("kind=string first=1/2 ratio=1/2", None),
        ("kind=string lengths=1/2,1/4,1/8", None),
        ("kind=grill d=1 base.kind=cantor base.m=2 base.a=1/3", Grill),
        ("kind=scaled lam=2 base.kind=cantor base.m=3 base.a=1/5", Scaled),
        ("kind=quasi D=log(2)/log(3) moduli=2,3", DisjointUnion),
    ],
)
def test_parse_kinds(text, cls):
    spec = parse_spec(text)
    if cls is not None:
        assert isinstance(spec.obj, cls)
    assert spec.kind == text.split()[0].split("=")[1]


def test_multiline_and_comments():
    spec = parse_spec("# ternary\nkind=cantor\n  m=2   # two pieces\n  a=1/3\n")
    assert spec.params == {"m": 2, "a": pytest.approx(1 / 3)}


def test_quasi_construction_attached():
    spec = parse_spec("kind=quasi D=0.5 moduli=2,3,5")
    assert spec.construction.certified and spec.construction.rank == 3


@pytest.mark.parametrize(
    "text, line, col, msg",
    [
        ("kind=cantor m=2 a=2", 1, 6, "m*a < 1"),
        ("kind=cantor m=2 a=1/3 b=1", 1, 25, "unknown key"),
        ("kind=cantor\nm=2\nbogus", 3, 1, "key=value"),
        ("kind=cantor m=2.5 a=0.1", 1, 15, "integer"),
        ("kind=cantor m=2 a=1/0", 1, 19, "division"),
        ("kind=wat", 1, 6, "unknown kind"),
        ("kind=cantor m=2", 1, 6, "missing a"),
        ("kind=cantor m=2 m=3 a=0.1", 1, 19, "twice"),
        ("", 1, 1, "empty"),
        ("kind=quasi D=0.5 moduli=2,3.5", 1, 25, "integers"),
        ("kind=string first=1 ratio=2", 1, 27, "ratio"),
    ],
)
def test_errors_have_positions(text, line, col, msg):
    with pytest.raises(SpecError) as ei:
        parse_spec(text, source="t.set")
    e = ei.value
    assert (e.line, e.col) == (line, col)
    assert msg in str(e) and str(e).startswith(f"t.set:{line}:{col}:")


def test_union_files(tmp_path):
    (tmp_path / "a.set").write_text("kind=cantor m=2 a=1/3\n")
    (tmp_path / "b.set").write_text("kind=cantor m=3 a=1/5\n")
    u = tmp_path / "u.set"
    u.write_text("kind=union component=a.set@0 component=b.set@2\n")
    spec = load_spec(u)
    assert isinstance(spec.obj, DisjointUnion)
    assert [c["offset"] for c in spec.params["components"]] == [0.0, 2.0]


def test_union_errors(tmp_path):
    (tmp_path / "a.set").write_text("kind=cantor m=2 a=1/3\n")
    with pytest.raises(SpecError, match="overlap|separat|disjoint"):
        parse_spec("kind=union component=a.set@0 component=a.set@0.5", base_dir=tmp_path)
    with pytest.raises(SpecError, match="cannot read"):
        parse_spec("kind=union component=missing.set@0", base_dir=tmp_path)
    with pytest.raises(SpecError, match="<file>@<offset>"):
        parse_spec("kind=union component=a.set", base_dir=tmp_path)


@pytest.mark.parametrize(
    "text, delta",
    [
        ("kind=cantor m=2 a=1/3", 1 / 6),
        ("kind=astring a=1", 0.25),
        ("kind=sphere N=2", 0.5),
        ("kind=grill d=1 base.kind=cantor base.m=2 base.a=1/3", 1 / 6),
        ("kind=scaled lam=3 base.kind=cantor base.m=2 base.a=1/3", 0.5),
        ("kind=string first=1/2 ratio=1/2", 0.25),
    ],
)
def test_default_delta(text, delta):
    assert default_delta(parse_spec(text).obj) == pytest.approx(delta)


def test_default_delta_union_below_threshold():
    spec = parse_spec("kind=quasi D=log(2)/log(3) moduli=2,3")
    assert default_delta(spec.obj) < spec.obj.additivity_threshold


def test_describe():
    info = describe(parse_spec("kind=cantor m=2 a=1/3"))
    assert info["ambient_dim"] == 1 and info["hull"] == [[0.0, 1.0]]
    assert info["gap_table_head"][0] == [pytest.approx(1 / 3), 1]
    info = describe(parse_spec("kind=quasi D=0.5 moduli=2,3"))
    assert info["construction"]["certified"]
