import math

import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import given, settings

from fractal_zeta.sets import (
    SetError,
    Scaled,
    astring_zeta,
    distance,
    make_astring,
    make_cantor,
    make_fractal_string,
    make_grill,
    make_sphere,
    make_union,
    scale,
)

LOG32 = math.log(2) / math.log(3)


# --- constructors ---------------------------------------------------------


@pytest.mark.parametrize(
    "m, a, D",
    [
        (2, 1 / 3, LOG32),
        (3, 3 ** (-math.log2(3)), LOG32),
        (3, 1 / 5, math.log(3) / math.log(5)),
        (4, 0.1, math.log(4) / math.log(10)),
    ],
)
def test_cantor_dimension(m, a, D):
    C = make_cantor(m, a)
    assert C.dim == pytest.approx(D, rel=1e-14)
    assert C.hull == ((0.0, 1.0),)


@pytest.mark.parametrize("m, a", [(2, 0.5), (3, 1 / 3), (1, 0.2), (2, 0.0), (2, -0.1), (2.5, 0.1)])
def test_cantor_rejects(m, a):
    with pytest.raises(SetError):
        make_cantor(m, a)


@pytest.mark.parametrize("a, D", [(1.0, 0.5), (3.0, 0.25), (0.5, 2 / 3)])
def test_astring(a, D):
    A = make_astring(a)
    assert A.dim == pytest.approx(D)
    if a == 1.0:
        assert A.length(1) == pytest.approx(0.5)


def test_astring_rejects():
    with pytest.raises(SetError):
        make_astring(0.0)


def test_fractal_string_geometric():
    L = make_fractal_string(lambda j: 2.0**-j)
    pts = np.sort(L.points)[::-1]
    # a_k = 2^(-k+1)
    assert pts[0] == pytest.approx(1.0)
    assert pts[1:6] == pytest.approx([2.0**-k for k in range(1, 6)])
    assert L.ratio == pytest.approx(0.5)


def test_fractal_string_astring_lengths():
    lengths = [1 / j - 1 / (j + 1) for j in range(1, 2001)]
    L = make_fractal_string(lengths)
    pts = np.sort(L.points)[::-1]
    # a finite list drops the tail 1/2001
    assert pts[:5] == pytest.approx([1 / k - 1 / 2001 for k in range(1, 6)], abs=1e-12)


@pytest.mark.parametrize(
    "lengths",
    [lambda j: 1.0, lambda j: 1 / j],
)
def test_fractal_string_divergent(lengths):
    with pytest.raises(SetError):
        make_fractal_string(lengths)


def test_fractal_string_not_monotone():
    with pytest.raises(SetError):
        make_fractal_string([0.1, 0.2])


@pytest.mark.parametrize("N, D", [(1, 0.0), (2, 1.0), (3, 2.0)])
def test_sphere(N, D):
    assert make_sphere(N).dim == D


def test_sphere_rejects():
    with pytest.raises(SetError):
        make_sphere(0)


def test_grill_dims():
    C = make_cantor(2, 1 / 3)
    assert make_grill(C, 1).dim == pytest.approx(1 + LOG32)
    assert make_grill(C, 2).dim == pytest.approx(2 + LOG32)
    assert make_grill(make_sphere(1), 1).dim == 1.0
    # nesting collapses
    g = make_grill(make_grill(C, 1), 2)
    assert g.d == 3 and g.base == C
    with pytest.raises(SetError):
        make_grill(C, 0)


def test_union():
    C1, C2 = make_cantor(2, 1 / 3), make_cantor(3, 3 ** (-math.log2(3)))
    u = make_union([(C1, 0.0), (C2, 2.0)])
    assert u.separation == 1.0 and u.additivity_threshold == 0.5
    make_union([(C1, 0), (C1, 2), (C1, 4)])
    with pytest.raises(SetError):
        make_union([(C1, 0.0), (C1, 0.5)])


def test_scale_collapses():
    C = make_cantor(2, 1 / 3)
    s = scale(scale(C, 2.0), 3.0)
    assert isinstance(s, Scaled) and s.base == C and s.lam == 6.0
    with pytest.raises(SetError):
        scale(C, 0.0)


# --- distances ------------------------------------------------------------


def test_distance_examples():
    C = make_cantor(2, 1 / 3)
    assert distance(C, 0.5) == pytest.approx(1 / 6)
    assert distance(C, 0.0) == 0.0
    assert distance(make_sphere(2), np.array([0.0, 0.0])) == 1.0
    assert distance(make_astring(1.0), 0.0) == 0.0


def test_cantor_distance_members():
    C = make_cantor(2, 1 / 3)
    # endpoints of construction intervals are members
    pts = [0, 1, 1 / 3, 2 / 3, 1 / 9, 2 / 9, 7 / 9, 8 / 9, 1 / 27, 0.25, 0.75]
    assert np.allclose(C.distance(np.array(pts, dtype=float)), 0.0, atol=1e-15)


def test_cantor_distance_brute_force():
    m, a = 3, 1 / 5
    C = make_cantor(m, a)
    # endpoints of all level-8 intervals
    g = (1 - m * a) / (m - 1)
    lefts = np.array([0.0])
    length = 1.0
    for _ in range(8):
        lefts = (lefts[:, None] + length * (a + g) * np.arange(m)[None, :]).ravel()
        length *= a
    ends = np.concatenate([lefts, lefts + length])
    x = np.random.default_rng(1).uniform(-0.2, 1.2, 500)
    brute = np.min(np.abs(x[:, None] - ends[None, :]), axis=1)
    assert np.allclose(C.distance(x), brute, atol=2 * length)


def test_grill_distance():
    G = make_grill(make_cantor(2, 1 / 3), 1)
    assert G.distance(np.array([0.5, 0.5])) == pytest.approx(1 / 6)
    assert G.distance(np.array([0.0, 2.0])) == pytest.approx(1.0)


def test_union_distance():
    u = make_union([(make_cantor(2, 1 / 3), 0.0), (make_cantor(2, 1 / 3), 2.0)])
    assert u.distance(1.5) == pytest.approx(0.5)
    assert u.distance(2.5) == pytest.approx(1 / 6)


SETS = [
    make_cantor(2, 1 / 3),
    make_cantor(3, 0.2),
    make_astring(1.0),
    make_astring(2.5),
    make_fractal_string(lambda j: 2.0**-j),
]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SETS), st.floats(-2, 3), st.floats(-2, 3))
def test_distance_lipschitz(A, x, y):
    assert abs(A.distance(x) - A.distance(y)) <= abs(x - y) + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SETS[:4]), st.floats(0.01, 100), st.floats(-1, 2))
def test_distance_scaling(A, lam, x):
    assert scale(A, lam).distance(lam * x) == pytest.approx(lam * A.distance(x), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("lam", [2.0, 4.0, 0.5, 0.25])
def test_distance_scaling_exact_powers_of_two(lam):
    A = make_cantor(2, 1 / 3)
    x = np.linspace(-0.5, 1.5, 101)
    assert np.array_equal(scale(A, lam).distance(lam * x), lam * A.distance(x))


@given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.01, 10))
@settings(max_examples=30, deadline=None)
def test_sphere_lipschitz(x, y, z):
    S = make_sphere(3)
    p, q = np.array([x, y, z]), np.array([z, x, y]) * 0.5
    assert abs(S.distance(p) - S.distance(q)) <= np.linalg.norm(p - q) + 1e-12


# --- gap tables -----------------------------------------------------------


@pytest.mark.parametrize("m, a", [(2, 1 / 3), (3, 0.2), (5, 0.1)])
def test_cantor_gap_levels(m, a):
    lv = make_cantor(m, a).gaps.levels(6)
    for k, (g, c) in enumerate(lv):
        assert c == m**k * (m - 1)
        assert g == pytest.approx(a**k * (1 - m * a) / (m - 1))
    # total gap length is the whole hull
    total = sum(m**k * (m - 1) * a**k * (1 - m * a) / (m - 1) for k in range(400))
    assert total == pytest.approx(1.0)


@pytest.mark.parametrize("A", SETS, ids=lambda s: s.kind)
def test_gap_counts_consistent(A):
    g = A.gaps
    for x in [0.3, 0.05, 1e-3, 1e-5]:
        lv = g.levels_above(x)
        assert sum(c for _, c in lv) == g.count_above(x)
        assert all(gl > x for gl, _ in lv)
        # above plus at-or-below is the hull length
        assert sum(gl * c for gl, c in lv) + g.sum_at_or_below(x) == pytest.approx(A.hull[0][1], rel=1e-12)


def test_astring_zeta_series():
    for s in [2.0, 1.5 + 1j]:
        direct = sum((j ** -1.0 - (j + 1) ** -1.0) ** s for j in range(1, 200001))
        assert astring_zeta(1.0, s) == pytest.approx(direct, rel=1e-6)


def test_astring_zeta_hurwitz_form():
    # a = 1: l_j = 1/(j(j+1)), and sum l_j^2 = pi^2/3 - 3
    assert astring_zeta(1.0, 2.0) == pytest.approx(math.pi**2 / 3 - 3, rel=1e-13)
    assert astring_zeta(1.0, 0.0) == -1
