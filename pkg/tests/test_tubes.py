import math

import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import given, settings

import oracles
from fractal_zeta.quadrature import adaptive_gl
from fractal_zeta.sets import make_astring, make_cantor, make_grill, make_sphere, make_union, scale
from fractal_zeta.tubes import (
    TubeWarning,
    ball_volume,
    box_dimension_estimate,
    cantor_contents,
    cantor_profile,
    embedded_tube,
    log_profile,
    minkowski_contents_estimate,
    tube_exact_cantor,
    tube_gapsum,
    tube_inner_1d,
    tube_model,
    tube_sphere,
)

cantors = st.sampled_from([(2, 1 / 3), (3, 0.2), (2, 0.25), (4, 0.1)])


@pytest.mark.parametrize("N, w", [(1, 2.0), (2, math.pi), (3, 4 * math.pi / 3)])
def test_ball_volume(N, w):
    assert ball_volume(N) == pytest.approx(w, rel=1e-15)


def test_cantor_tube_examples():
    C = make_cantor(2, 1 / 3)
    assert tube_gapsum(C, 1 / 12) == pytest.approx(1.0)
    assert tube_gapsum(C, 0.5) == pytest.approx(2.0)
    # t = 1/18: every gap up to 1/9 filled (total 2/3), the middle gap not
    assert tube_gapsum(C, 1 / 18) == pytest.approx(4 / 18 + 2 / 3)


@settings(max_examples=80, deadline=None)
@given(cantors, st.floats(1e-9, 1.0))
def test_closed_form_matches_gapsum(ma, u):
    m, a = ma
    c = (1 - m * a) / (2 * (m - 1))
    t = u * c * 0.999999
    assert tube_exact_cantor(m, a, t) == pytest.approx(tube_gapsum(make_cantor(m, a), t), rel=1e-11)


def test_closed_form_domain():
    with pytest.raises(ValueError):
        tube_exact_cantor(2, 1 / 3, 0.2)


@pytest.mark.parametrize("m, a", [(2, 1 / 3), (3, 0.2)])
def test_profile_periodic(m, a):
    T = math.log(1 / a)
    tau = np.linspace(3, 9, 101)
    assert np.allclose(cantor_profile(m, a, tau), cantor_profile(m, a, tau + T), rtol=1e-12)


@pytest.mark.parametrize("m, a", [(2, 1 / 3), (3, 0.2), (2, 0.1)])
def test_profile_extrema_are_contents(m, a):
    tau = np.linspace(5, 5 + math.log(1 / a), 200001)
    G = cantor_profile(m, a, tau)
    lo, hi = cantor_contents(m, a)
    assert G.min() == pytest.approx(lo, rel=1e-10)
    # the maximum is a supremum at the jump of the sawtooth
    assert G.max() <= hi and G.max() == pytest.approx(hi, rel=1e-5)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([make_cantor(2, 1 / 3), make_astring(1.0), make_astring(2.0)]), st.floats(1e-8, 0.3), st.floats(1.0001, 3))
def test_tube_monotone(A, t, k):
    assert tube_gapsum(A, t) <= tube_gapsum(A, k * t) + 1e-15


def test_inner_tube():
    A = make_astring(1.0)
    t = np.geomspace(1e-8, 1e-2, 7)
    assert np.allclose(tube_inner_1d(A, t), tube_gapsum(A, t) - 2 * t)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_sphere_tube(N):
    t = np.array([1e-6, 0.1, 0.5, 0.9])
    direct = ball_volume(N) * ((1 + t) ** N - (1 - t) ** N)
    assert np.allclose(tube_sphere(N, t), direct, rtol=1e-9)


def test_sphere_tube_swallowed_warns():
    with pytest.warns(TubeWarning):
        assert tube_sphere(2, 2.0) == pytest.approx(9 * math.pi)


def test_model_validity():
    m = tube_model(make_cantor(2, 1 / 3), prefer="closed_form")
    assert m.source == "closed_form"
    with pytest.raises(ValueError):
        m(0.2)
    assert tube_model(make_sphere(2)).N == 2


def test_scaled_model():
    C = make_cantor(2, 1 / 3)
    t = np.geomspace(1e-6, 1e-2, 9)
    assert np.allclose(tube_model(scale(C, 3.0))(3 * t), 3 * tube_model(C)(t), rtol=1e-13)
    S = make_sphere(2)
    assert tube_model(scale(S, 2.0))(0.2) == pytest.approx(4 * tube_sphere(2, 0.1))


def test_union_model_adds():
    C = make_cantor(2, 1 / 3)
    u = make_union([(C, 0.0), (C, 3.0)])
    m = tube_model(u)
    t = np.geomspace(1e-6, 0.4, 9)
    assert np.allclose(m(t), 2 * tube_gapsum(C, t), rtol=1e-13)
    assert len(m.parts) == 2 and m.parts_below == u.additivity_threshold


# --- slicing ------------------------------------------------------------


@pytest.mark.parametrize("N", [1, 2])
def test_embedded_sphere(N):
    # S^{N-1} x {0} in R^{N+1}: the tube is a solid torus-like shape; for
    # N = 1 two points give two discs of area pi t^2
    base = tube_model(make_sphere(N))
    t = np.array([0.05, 0.2])
    got = embedded_tube(base, t)
    if N == 1:
        assert np.allclose(got, 2 * math.pi * t**2, rtol=1e-12)
    else:
        # circle of radius 1 in R^3: torus volume 2 pi^2 t^2
        assert np.allclose(got, 2 * math.pi**2 * t**2, rtol=1e-12)


def test_grill_of_interval_points():
    # {0,1} x [0,1] is two unit segments; tube = 2 (2t + pi t^2) for t < 1/2
    pts = make_sphere(1)  # {-1, 1}: distance 2 apart
    g = tube_model(make_grill(pts, 1))
    t = np.array([0.01, 0.3])
    assert np.allclose(g(t), 2 * (2 * t + math.pi * t**2), rtol=1e-12)


def test_grill_matches_monte_carlo():
    C = make_cantor(2, 1 / 3)
    g = tube_model(make_grill(C, 1))
    t = 0.04
    # gaps below 2t are swallowed and the open ones (1/3, 1/9) end at points
    # of C, so the level-4 rectangles have the same t-neighbourhood as C x [0,1]
    ivs = [(0.0, 1.0)]
    for _ in range(4):
        ivs = [iv for l, r in ivs for iv in ((l, l + (r - l) / 3), (r - (r - l) / 3, r))]
    assert all(r - l < 2 * t for l, r in ivs)  # no rectangle has a core farther than t from its edges
    segs = []
    for l, r in ivs:
        segs += [((l, 0.0), (r, 0.0)), ((l, 1.0), (r, 1.0)), ((l, 0.0), (l, 1.0)), ((r, 0.0), (r, 1.0))]
    area, err = oracles.monte_carlo_area(segs, t, ((-t, 1 + t), (-t, 1 + t)), 400_000, seed=3)
    assert g(t) == pytest.approx(area, abs=5 * err)


def test_adaptive_gl_polynomial():
    v, _, err = adaptive_gl(lambda x: x**5 - 3 * x, [0.0, 0.5, 2.0], 1e-14)
    assert v.real == pytest.approx(2**6 / 6 - 6, rel=1e-14)


# --- estimates ----------------------------------------------------------


@pytest.mark.parametrize(
    "A, D",
    [(make_cantor(2, 1 / 3), math.log(2) / math.log(3)), (make_cantor(3, 0.2), math.log(3) / math.log(5)),
     (make_astring(1.0), 0.5), (make_astring(3.0), 0.25)],
)
def test_box_dimension(A, D):
    assert box_dimension_estimate(tube_model(A), decades=4, t_max=1e-2).D == pytest.approx(D, abs=0.02)


def test_box_dimension_needs_decades():
    with pytest.raises(ValueError):
        box_dimension_estimate(tube_model(make_cantor(2, 1 / 3)), decades=1)


def test_contents_bracket_cantor():
    m, a = 2, 1 / 3
    lo, hi = cantor_contents(m, a)
    est = minkowski_contents_estimate(tube_model(make_cantor(m, a)), math.log(2) / math.log(3), 1e-8, 1e-6, 512)
    assert lo - est.residual_spread <= est.lower <= lo + est.residual_spread
    assert hi - est.residual_spread <= est.upper <= hi


def test_contents_argument_checks():
    tube = tube_model(make_cantor(2, 1 / 3))
    with pytest.raises(ValueError):
        minkowski_contents_estimate(tube, 1.5, 1e-6, 1e-4)
    with pytest.raises(ValueError):
        minkowski_contents_estimate(tube, 0.5, 1e-6, 1e-4, n_samples=4)
    with pytest.raises(ValueError):
        minkowski_contents_estimate(tube, 0.5, 1e-4, 1e-6)


def test_log_profile_matches_closed_profile():
    tube = tube_model(make_cantor(2, 1 / 3))
    D = math.log(2) / math.log(3)
    tau = np.linspace(4, 12, 57)
    assert np.allclose(log_profile(tube, D, tau), cantor_profile(2, 1 / 3, tau), rtol=1e-11)
