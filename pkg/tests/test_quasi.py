import math
import warnings
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import given, settings

from fractal_zeta.merom import contour_residue
from fractal_zeta.quasi import (
    QuasiWarning,
    build_quasiperiodic,
    exponent_matrix,
    factorize,
    grill_quasi,
    irrationality_evidence,
    log_ratio,
    period_recover,
    periodogram,
    rational_rank,
    union_dims,
    union_kernel,
    union_model,
)
from fractal_zeta.sets import Grill, make_cantor
from fractal_zeta.tubes import log_profile, tube_model
from fractal_zeta.zeta import ZetaEvalConfig, distance_zeta

D3 = math.log(2) / math.log(3)


@pytest.mark.parametrize(
    "m, f", [(2, [(2, 1)]), (12, [(2, 2), (3, 1)]), (97, [(97, 1)]), (360, [(2, 3), (3, 2), (5, 1)])]
)
def test_factorize(m, f):
    assert factorize(m) == f


@settings(max_examples=60)
@given(st.integers(2, 10**6))
def test_factorize_roundtrip(m):
    assert math.prod(p**e for p, e in factorize(m)) == m


@pytest.mark.parametrize(
    "rows, r",
    [([[1, 0], [0, 1], [1, 1]], 2), ([[1, 1], [2, 2]], 1), ([[0, 0]], 0), ([[0, 2, 1], [3, 0, 0], [0, 4, 2]], 2),],
)
def test_rational_rank(rows, r):
    assert rational_rank(rows) == r


def test_rank_empty():
    with pytest.raises(ValueError):
        rational_rank([])


@settings(max_examples=40)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=4))
def test_rank_matches_numpy(rows):
    # small integer matrices: floating rank is reliable here
    assert rational_rank(rows) == np.linalg.matrix_rank(np.array(rows, dtype=float))


def test_exponent_matrix():
    primes, rows = exponent_matrix([2, 12, 9])
    assert primes == [2, 3]
    assert rows == [[1, 0], [2, 1], [0, 2]]


@pytest.mark.parametrize(
    "moduli, certified", [((2, 3), True), ((2, 3, 5), True), ((2, 4), False), ((2, 3, 6), False), ((6, 10, 15), True)]
)
def test_certification(moduli, certified):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", QuasiWarning)
        _, qc = build_quasiperiodic(0.5, moduli)
    assert qc.certified == certified
    assert qc.rank == (len(moduli) if certified else qc.rank)


def test_rank_deficient_warns():
    with pytest.warns(QuasiWarning):
        build_quasiperiodic(D3, (2, 4))
    with pytest.warns(QuasiWarning):
        build_quasiperiodic(D3, (3, 3))


def test_construction_geometry():
    union, qc = build_quasiperiodic(D3, (2, 3))
    assert qc.periods == pytest.approx((math.log(2) / D3, math.log(3) / D3))
    assert qc.scales == pytest.approx((2 ** (-1 / D3), 3 ** (-1 / D3)))
    assert qc.periods[0] == pytest.approx(math.log(3))
    for (comp, off), m in zip(union.components, qc.moduli):
        assert comp.dim == pytest.approx(D3)
    assert union.dim == pytest.approx(D3)
    rec = qc.record()
    assert rec["certified"] and rec["moduli"] == [2, 3]


@pytest.mark.parametrize("D", [0.0, 1.0, -0.5])
def test_construction_rejects_D(D):
    with pytest.raises(ValueError):
        build_quasiperiodic(D, (2, 3))


def test_union_model_matches_numeric():
    union, qc = build_quasiperiodic(D3, (2, 3))
    delta = 0.3
    model = union_model(qc, delta)
    cfg = ZetaEvalConfig(delta)
    tube = tube_model(union)
    for s in [0.8, 0.7 + 3j]:
        assert distance_zeta(tube, s, cfg) == pytest.approx(model(s), rel=1e-9)


def test_union_dims_two_lattices():
    _, qc = build_quasiperiodic(D3, (2, 3))
    dims = union_dims(qc)
    assert len(dims.lattices) == 2
    assert dims.multiplicity(D3) == 1
    ps = sorted(l.p for l in dims.lattices)
    assert ps == pytest.approx(sorted(2 * math.pi / T for T in qc.periods))
    # the two lattices only share the real point D
    assert dims.multiplicity(complex(D3, ps[0])) == 1


def test_union_model_residue_sum():
    _, qc = build_quasiperiodic(D3, (2, 3))
    model = union_model(qc)
    assert model.residue(D3) == pytest.approx(contour_residue(model, D3, 0.1), rel=1e-9)


def test_union_model_delta_range():
    _, qc = build_quasiperiodic(D3, (2, 3))
    with pytest.raises(ValueError):
        union_model(qc, 0.6)


def test_union_kernel():
    _, qc = build_quasiperiodic(D3, (2, 3))
    k = union_kernel(qc)
    assert k.D == pytest.approx(D3) and len(k.dims.lattices) == 2


# --- continued fractions --------------------------------------------------


def test_log_ratio_precision():
    x = log_ratio(2, 3)
    assert isinstance(x, mpmath.mpf)
    assert float(x) == pytest.approx(math.log(2) / math.log(3), rel=1e-15)


@pytest.mark.parametrize("q, pq", [(Fraction(3, 7), (0, 2, 3)), (Fraction(355, 113), (3, 7, 16)), (Fraction(5), (5,))])
def test_rational_terminates(q, pq):
    cf = irrationality_evidence(q)
    assert cf.terminated and tuple(cf.partial_quotients) == pq


def test_log_ratio_nonterminating():
    cf = irrationality_evidence(log_ratio(2, 3), depth=20)
    assert not cf.terminated and cf.depth == 20
    assert list(cf.partial_quotients[:6]) == [0, 1, 1, 1, 2, 2]
    p, q = cf.convergents[-1]
    with mpmath.workdps(60):
        assert abs(mpmath.mpf(p) / q - log_ratio(2, 3)) < mpmath.mpf(1) / (q * q)


def test_rational_log_ratio_terminates():
    cf = irrationality_evidence(log_ratio(2, 4))
    assert cf.terminated and tuple(cf.partial_quotients) == (0, 2)


def test_float_runs_out_of_precision():
    cf = irrationality_evidence(math.log(2) / math.log(3), depth=30)
    assert cf.exhausted and not cf.terminated and cf.depth < 30


@settings(max_examples=50)
@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_fraction_convergent_exact(p, q):
    cf = irrationality_evidence(Fraction(p, q), depth=60)
    assert cf.terminated
    a, b = cf.convergents[-1]
    assert Fraction(a, b) == Fraction(p, q)


# --- spectral recovery --------------------------------------------------


def _profile(union, D, periods, n=2048):
    span = 5 * max(periods)
    tau = math.log(1e4) + np.arange(n) * (span / n)
    return log_profile(tube_model(union), D, tau), span / n


def test_periodogram_single_tone():
    dtau = 0.01
    tau = np.arange(4000) * dtau
    f, P = periodogram(np.cos(2 * math.pi * tau / 1.7), dtau)
    assert f[np.argmax(P)] == pytest.approx(1 / 1.7, abs=1 / (4000 * dtau))


def test_period_recover_quasi():
    union, qc = build_quasiperiodic(D3, (2, 3))
    G, dtau = _profile(union, D3, qc.periods)
    rec = period_recover(G, dtau, qc.periods)
    assert rec.all_recovered and rec.conclusive and not rec.spurious


def test_period_recover_single_cantor():
    C = make_cantor(2, 1 / 3)
    cands = (math.log(3), 1.3 * math.log(3))
    G, dtau = _profile(C, D3, cands)
    rec = period_recover(G, dtau, cands)
    assert rec.matched[cands[0]] and not rec.matched[cands[1]]


def test_period_recover_needs_span():
    union, qc = build_quasiperiodic(D3, (2, 3))
    G, dtau = _profile(union, D3, qc.periods, n=256)
    with pytest.raises(ValueError):
        period_recover(G[:64], dtau, qc.periods)


def test_period_recover_constant():
    rec = period_recover(np.full(1024, 3.0), 0.05, (1.0,))
    assert not rec.all_recovered and not rec.peaks


def test_grill_quasi():
    union, _ = build_quasiperiodic(D3, (2, 3))
    g = grill_quasi(union, 2)
    assert isinstance(g, Grill) and g.dim == pytest.approx(D3 + 2)
    with pytest.raises(ValueError):
        grill_quasi(union, 0)
