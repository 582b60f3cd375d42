"""Tube functions ``t -> |A_t|`` and Minkowski-content / box-dimension estimates."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .sets import (
    DisjointUnion,
    FractalSet,
    FractalString,
    GeneralizedCantor,
    Grill,
    Scaled,
    Sphere,
)

__all__ = [
    "TubeModel",
    "ContentEstimate",
    "DimensionEstimate",
    "TubeWarning",
    "QuadratureError",
    "ball_volume",
    "tube_model",
    "tube_exact_cantor",
    "cantor_profile",
    "tube_gapsum",
    "tube_inner_1d",
    "tube_sphere",
    "tube_grill",
    "embedded_tube",
    "minkowski_contents_estimate",
    "box_dimension_estimate",
    "log_profile",
    "cantor_contents",
]


class TubeWarning(UserWarning):
    pass


class QuadratureError(ArithmeticError):
    def __init__(self, msg: str, achieved: float):
        super().__init__(f"{msg} (achieved tolerance {achieved:.3g})")
        self.achieved = achieved


@dataclass(frozen=True)
class TubeModel:
    """A tube function with provenance.

    ``source`` is one of ``"closed_form"``, ``"gapsum"``, ``"sliced"``,
    ``"sampled"``.  ``fn`` accepts scalars or arrays of radii.
    ``period`` is the multiplicative period T (in log 1/t) when the
    normalised profile is exactly T-periodic.
    """

    source: str
    fn: Callable
    N: int
    D_hint: float
    validity: tuple[float, float] = (0.0, math.inf)
    kinks: Callable[[float, float], np.ndarray] | None = None
    period: float | None = None
    label: str = ""
    # a disjoint union: the component tubes, which add up below ``parts_below``
    parts: tuple = ()
    parts_below: float = 0.0

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self.validity
        if np.any(t_arr <= lo) or np.any(t_arr >= hi):
            raise ValueError(f"radius outside validity interval ({lo}, {hi})")
        return self.fn(t)

    def kink_points(self, lo: float, hi: float) -> np.ndarray:
        if self.kinks is None:
            return np.empty(0)
        return np.asarray(self.kinks(lo, hi), dtype=float)


@dataclass(frozen=True)
class ContentEstimate:
    r: float
    lower: float
    upper: float
    grid: np.ndarray = field(repr=False)
    residual_spread: float


@dataclass(frozen=True)
class DimensionEstimate:
    D: float
    slope: float
    residual: float


def ball_volume(N: int) -> float:
    """Lebesgue measure of the unit ball in R^N."""
    return math.pi ** (N / 2) / special.gamma(N / 2 + 1)


# --------------------------------------------------------------------------
# evaluators
# --------------------------------------------------------------------------


def cantor_profile(m: int, a: float, tau):
    """Periodic profile G(tau) of the generalized Cantor set C^(m,a).

    ``|C_t| = t^(1-D) G(log 1/t)`` for ``0 < t < c``.  The sawtooth is
    anchored at ``tau = log(1/c)``, where ``c = (1-ma)/(2(m-1))``.
    """
    c = (1 - m * a) / (2 * (m - 1))
    D = math.log(m) / math.log(1 / a)
    T = math.log(1 / a)
    x = (np.asarray(tau, dtype=float) - math.log(1 / c)) / T
    frac = x - np.floor(x)
    g = np.where(frac == 0, 0.0, 1 - frac)  # g(x) = 1 - x on (0, 1], 1-periodic
    return c ** (D - 1) * (m * a) ** g + 2 * c**D * m**g


def tube_exact_cantor(m: int, a: float, t):
    """Closed-form tube volume of C^(m,a), valid for 0 < t < (1-ma)/(2(m-1))."""
    c = (1 - m * a) / (2 * (m - 1))
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or np.any(t >= c):
        raise ValueError(f"closed form valid only on (0, {c}); use tube_gapsum")
    D = math.log(m) / math.log(1 / a)
    out = t ** (1 - D) * cantor_profile(m, a, np.log(1 / t))
    return out if out.ndim else float(out)


def tube_gapsum(s: FractalSet, t):
    """Exact ``|A_t|`` of a 1-D measure-zero set from its gap table.

    Gaps no longer than 2t are filled completely; longer ones contribute
    2t.  The two outer half-lines contribute t each.
    """
    gaps = s.gaps
    if gaps is None or s.ambient_dim != 1:
        raise TypeError(f"{s.kind} has no gap table")
    t = np.asarray(t, dtype=float)
    out = 2 * t * (1 + gaps.count_above(2 * t)) + gaps.sum_at_or_below(2 * t)
    return out if np.ndim(out) else float(out)


def tube_inner_1d(s: FractalSet, t):
    """Inner tube volume ``|(dO)_t ∩ O|`` of the open gap set O inside the hull."""
    t = np.asarray(t, dtype=float)
    out = np.asarray(tube_gapsum(s, t)) - 2 * t
    return out if out.ndim else float(out)


def tube_sphere(N: int, t):
    """Tube volume of the unit sphere in R^N; beyond t = 1 the inner ball is swallowed."""
    t = np.asarray(t, dtype=float)
    w = ball_volume(N)
    if np.any(t >= 1):
        warnings.warn("t >= 1: inner ball swallowed, using w_N (1+t)^N", TubeWarning, stacklevel=2)
    # (1+t)^N - (1-t)^N = 2 sum_{k odd} C(N,k) t^k, free of cancellation at small t
    inner = sum(2 * math.comb(N, k) * t**k for k in range(1, N + 1, 2))
    out = np.where(t < 1, w * inner, w * (1 + t) ** N)
    return out if out.ndim else float(out)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def embedded_tube(base: TubeModel, t, tol: float = 1e-12, max_refine: int = 10):
    """``|(B x {0})_t|`` in one more dimension, by transverse slicing.

    ``int_{-t}^{t} |B_{sqrt(t^2-u^2)}| du`` with ``u = t sin(theta)``, i.e.
    ``2t int_0^{pi/2} |B_{t cos theta}| cos theta dtheta``.  The theta range
    is cut at the images of the base kinks and every panel is refined
    until 16-point Gauss-Legendre agrees with its two halves, all radii at
    once.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    lo, hi, owner = [], [], []
    for i, ti in enumerate(t_arr):
        ks = base.kink_points(ti * 1e-9, ti)
        th = np.arccos(np.clip(ks[(ks > 0) & (ks < ti)] / ti, 0.0, 1.0))
        edges = np.unique(np.concatenate([[0.0, math.pi / 2], th]))
        edges = edges[np.concatenate([[True], np.diff(edges) > 1e-14])]
        lo.append(edges[:-1])
        hi.append(edges[1:])
        owner.append(np.full(edges.size - 1, i))
    a, b, own = np.concatenate(lo), np.concatenate(hi), np.concatenate(owner)
    scale = np.abs(np.asarray(base.fn(t_arr), dtype=float)) + 1e-300

    def rule(a, b, own):
        half, mid = 0.5 * (b - a), 0.5 * (b + a)
        th = mid[:, None] + half[:, None] * _GL_X[None, :]
        r = t_arr[own][:, None] * np.cos(th)
        f = np.asarray(base.fn(r.ravel()), dtype=float).reshape(r.shape) * np.cos(th)
        return half * (f @ _GL_W)

    val = np.zeros_like(t_arr)
    worst = 0.0
    for depth in range(max_refine + 1):
        if a.size == 0:
            break
        m = 0.5 * (a + b)
        coarse = rule(a, b, own)
        fine = rule(a, m, own) + rule(m, b, own)
        err = np.abs(fine - coarse) / scale[own]
        ok = err <= tol * (b - a) / (math.pi / 2)
        if depth == max_refine:
            worst = float(err.max(initial=0.0))
            ok[:] = True
        np.add.at(val, own[ok], fine[ok])
        keep = ~ok
        a, b, own = np.concatenate([a[keep], m[keep]]), np.concatenate([m[keep], b[keep]]), np.concatenate([own[keep], own[keep]])
    if worst > 1e3 * tol:
        raise QuadratureError("slicing quadrature did not converge", worst)
    out = 2 * t_arr * val
    return out if np.ndim(t) else float(out[0])


def tube_grill(base: TubeModel, d: int, t, L: float = 1.0):
    """Tube volume of ``B x [0,L]^d`` from the tube of B.

    One factor at a time: ``|(B x [0,L])_t| = L |B_t| + |(B x {0})_t|``.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    inner = base if d == 1 else _grill_model(base, d - 1, L)
    t = np.asarray(t, dtype=float)
    out = L * np.asarray(inner.fn(t)) + np.asarray(embedded_tube(inner, t))
    return out if out.ndim else float(out)


def _grill_model(base: TubeModel, d: int, L: float = 1.0) -> TubeModel:
    side = "" if L == 1 else f"{L:g}"
    return TubeModel(
        source="sliced",
        fn=lambda t, base=base, d=d: tube_grill(base, d, t, L),
        N=base.N + d,
        D_hint=base.D_hint + d,
        validity=base.validity,
        kinks=base.kinks,
        period=base.period,
        label=f"{base.label} x [0,{side or 1}]^{d}",
    )


# --------------------------------------------------------------------------
# model factory
# --------------------------------------------------------------------------


def tube_model(s: FractalSet, prefer: str = "gapsum") -> TubeModel:
    """Tube model of a supported set.

    ``prefer="closed_form"`` selects the log-periodic formula for
    generalized Cantor sets (valid only below the half first gap).
    """
    if isinstance(s, GeneralizedCantor) and prefer == "closed_form":
        c = (1 - s.m * s.a) / (2 * (s.m - 1))
        return TubeModel(
            "closed_form", lambda t, s=s: tube_exact_cantor(s.m, s.a, t), 1, s.dim,
            (0.0, c), s.gaps.kinks, s.period, f"C^({s.m},{s.a:g})",
        )
    if isinstance(s, Sphere):
        N = s.N
        return TubeModel(
            "closed_form", lambda t, N=N: tube_sphere(N, t), N, float(N - 1), (0.0, 1.0),
            None, None, f"S^{N - 1}",
        )
    if isinstance(s, Grill):
        return _grill_model(tube_model(s.base, prefer), s.d, s.L)
    if s.ambient_dim == 1 and s.gaps is not None:
        period = None
        if isinstance(s, GeneralizedCantor):
            period = s.period
        elif isinstance(s, Scaled) and isinstance(s.base, GeneralizedCantor):
            period = s.base.period
        parts, below = (), 0.0
        if isinstance(s, DisjointUnion):
            parts, below = tuple(tube_model(c, prefer) for c, _ in s.components), s.additivity_threshold
        return TubeModel(
            "gapsum", lambda t, s=s: tube_gapsum(s, t), 1, _dim_hint(s), (0.0, math.inf),
            s.gaps.kinks, period, s.kind, parts, below,
        )
    if isinstance(s, Scaled):
        base = tube_model(s.base, prefer)
        lam, N = s.lam, base.N
        return TubeModel(
            base.source,
            lambda t, base=base: lam**N * np.asarray(base.fn(np.asarray(t) / lam)),
            N, base.D_hint, (lam * base.validity[0], lam * base.validity[1]),
            None if base.kinks is None else (lambda lo, hi: lam * base.kink_points(lo / lam, hi / lam)),
            base.period, f"{lam:g}*{base.label}",
        )
    if isinstance(s, DisjointUnion):
        parts = [(tube_model(c, prefer), off) for c, off in s.components]
        hi = min(min(p.validity[1] for p, _ in parts), s.additivity_threshold)
        return TubeModel(
            "sampled",
            lambda t, parts=parts: sum(np.asarray(p.fn(t)) for p, _ in parts),
            s.ambient_dim, s.dim, (0.0, hi), None, None, "union",
            tuple(p for p, _ in parts), s.additivity_threshold,
        )
    raise TypeError(f"no tube model for {s.kind}")


def _dim_hint(s: FractalSet) -> float:
    D = s.dim
    if isinstance(s, FractalString) and math.isnan(D):
        return 1.0
    return D


# --------------------------------------------------------------------------
# estimates
# --------------------------------------------------------------------------


def _geometric_grid(t_min: float, t_max: float, per_decade: int) -> np.ndarray:
    n = max(2, int(round(math.log10(t_max / t_min) * per_decade)) + 1)
    return np.geomspace(t_min, t_max, n)


def minkowski_contents_estimate(
    tube: TubeModel, r: float, t_min: float, t_max: float, n_samples: int = 512
) -> ContentEstimate:
    """Lower/upper r-dimensional Minkowski contents from the finest decade.

    ``n_samples`` is the number of grid points per decade.  The min and max
    of ``|A_t| / t^(N-r)`` over ``[t_min, 10 t_min]`` stand in for the
    liminf and limsup; ``residual_spread`` is the largest jump between
    neighbouring samples there, a bound on how far the sampled extrema can
    sit from the true ones.
    """
    if r > tube.N:
        raise ValueError(f"r = {r} exceeds the ambient dimension {tube.N}")
    if n_samples < 16:
        raise ValueError("need at least 16 samples per decade")
    if not 0 < t_min < t_max:
        raise ValueError("need 0 < t_min < t_max")
    grid = _geometric_grid(t_min, t_max, n_samples)
    last = grid[grid <= t_min * 10 * (1 + 1e-12)]
    ratio = np.asarray(tube(last), dtype=float) / last ** (tube.N - r)
    spread = float(np.max(np.abs(np.diff(ratio)))) if ratio.size > 1 else 0.0
    return ContentEstimate(r, float(ratio.min()), float(ratio.max()), grid, spread)


def box_dimension_estimate(
    tube: TubeModel, decades: float = 4, samples_per_decade: int = 64, t_max: float | None = None
) -> DimensionEstimate:
    """Least-squares slope of ``log |A_t|`` against ``log t``; slope = N - D."""
    if decades < 2:
        raise ValueError("need at least 2 decades for a stable slope")
    if t_max is None:
        t_max = min(1e-2, 0.5 * tube.validity[1])
    t = _geometric_grid(t_max * 10.0**-decades, t_max, samples_per_decade)
    y = np.log(np.asarray(tube(t), dtype=float))
    x = np.log(t)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    slope = float(coef[0])
    resid = float(np.sqrt(res[0] / len(x))) if res.size else 0.0
    return DimensionEstimate(tube.N - slope, slope, resid)


def log_profile(tube: TubeModel, D: float, tau) -> np.ndarray:
    """Normalised profile ``G(tau) = |A_t| / t^(N-D)`` at ``t = exp(-tau)``."""
    tau = np.asarray(tau, dtype=float)
    t = np.exp(-tau)
    return np.asarray(tube(t), dtype=float) * np.exp((tube.N - D) * tau)


def cantor_contents(m: int, a: float) -> tuple[float, float]:
    """Exact lower and upper Minkowski contents of C^(m,a)."""
    D = math.log(m) / math.log(1 / a)
    c = (1 - m * a) / (2 * (m - 1))
    lower = (1 / D) * (2 * D / (1 - D)) ** (1 - D)
    upper = c ** (D - 1) * m * (1 - a) / (m - 1)
    return lower, upper
