"""Numerical fractal zeta functions as Dirichlet-type integrals.

The tube zeta function is integrated in ``tau = log(1/t)``; the distance
zeta function of any set follows from the tube identity
``zeta_A(s) = delta^(s-N) |A_delta| + (N - s) tube_zeta(s)``.  For 1-D sets
an independent evaluator sums exact per-gap contributions instead.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .quadrature import DivergenceError, laplace_integral
from .sets import AString, FractalSet, FractalString, astring_zeta
from .tubes import TubeModel, tube_model

__all__ = [
    "ZetaEvalConfig",
    "DivergenceError",
    "DirichletIntegral",
    "tube_integral",
    "tube_zeta",
    "distance_zeta",
    "distance_zeta_derivative",
    "distance_zeta_direct_1d",
    "geometric_zeta",
    "functional_equation_residual",
    "scaling_residual",
    "Elementary",
    "TensorProduct",
    "ReciprocalPolynomial",
    "BaseR",
    "dti_eval",
    "abscissa_probe",
    "AbscissaBracket",
]


@dataclass(frozen=True)
class ZetaEvalConfig:
    delta: float
    quad_tol: float = 1e-12
    tau_cut: float | None = None
    max_refine: int = 12

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not self.quad_tol > 0:
            raise ValueError("quad_tol must be positive")
        if self.tau_cut is not None and self.tau_cut < math.log(1 / self.delta):
            raise ValueError("tau_cut must lie beyond log(1/delta)")


# --------------------------------------------------------------------------
# tube-type Dirichlet integrals
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DirichletIntegral:
    """``s -> int_0^delta t^(s-n-1) F(t) dt`` for a sampled profile ``F``.

    Differences of integrals with the same ``n`` and ``delta`` are again
    of this form, which is what weak equivalence needs.
    """

    F: Callable
    n: float
    delta: float
    sigma0: float
    kinks: Callable | None = None
    period: float | None = None
    quad_tol: float = 1e-12
    max_refine: int = 12
    tau_cut: float | None = None

    def _weight(self, tau):
        t = np.exp(-tau)
        F = np.asarray(self.F(t), dtype=float)
        with np.errstate(divide="ignore"):
            logw = np.log(np.abs(F)) + (self.n - self.sigma0) * tau
        return np.sign(F) * np.exp(logw)

    def evaluate(self, s: complex, log_power: int = 0):
        tau0 = math.log(1 / self.delta)
        breaks = None
        if self.kinks is not None:
            k = np.asarray(self.kinks(1e-300, self.delta), dtype=float)
            breaks = np.log(1 / k[k > 0])
        span = 600.0 / max(self.n - self.sigma0, 0.5)
        tau_max = self.tau_cut or tau0 + min(400.0, span)
        return laplace_integral(
            self._weight, s, tau0, sigma0=self.sigma0, breaks=breaks, period=self.period,
            tol=self.quad_tol, tau_max=tau_max, max_refine=self.max_refine, log_power=log_power,
        )

    def __call__(self, s: complex) -> complex:
        return self.evaluate(s).value

    def shifted(self, k: float) -> "DirichletIntegral":
        """The integral evaluated at ``s - k``: same profile, exponent ``n + k``."""
        return DirichletIntegral(
            self.F, self.n + k, self.delta, self.sigma0 + k, self.kinks, self.period,
            self.quad_tol, self.max_refine, self.tau_cut,
        )

    def __sub__(self, other: "DirichletIntegral") -> "DirichletIntegral":
        if other.n != self.n or other.delta != self.delta:
            raise ValueError("integrals must share exponent base and delta")
        f, g = self.F, other.F
        return DirichletIntegral(
            lambda t: np.asarray(f(t)) - np.asarray(g(t)), self.n, self.delta,
            min(self.sigma0, other.sigma0), None, None, self.quad_tol, self.max_refine,
            self.tau_cut,
        )


def _as_tube(obj) -> TubeModel:
    return obj if isinstance(obj, TubeModel) else tube_model(obj)


def tube_integral(tube: TubeModel | FractalSet, cfg: ZetaEvalConfig) -> DirichletIntegral:
    tube = _as_tube(tube)
    if cfg.delta > tube.validity[1]:
        raise ValueError(f"delta={cfg.delta} outside tube validity {tube.validity}")
    return DirichletIntegral(
        tube.fn, tube.N, cfg.delta, tube.D_hint, tube.kinks, tube.period,
        cfg.quad_tol, cfg.max_refine, cfg.tau_cut,
    )


def tube_zeta(tube, s: complex, cfg: ZetaEvalConfig, full_output: bool = False, log_power: int = 0):
    """Tube zeta function ``int_0^delta t^(s-N-1) |A_t| dt``.

    With ``full_output`` returns ``(value, info)`` where ``info`` carries the
    error estimate and the extrapolated tail beyond the cutoff.
    """
    tube = _as_tube(tube)
    s = complex(s)
    if tube.parts and cfg.delta < tube.parts_below:
        # disjoint union: neighbourhoods do not meet, so the integrals add up
        vals = [tube_zeta(p, s, cfg, True, log_power) for p in tube.parts]
        value = sum(v for v, _ in vals)
        if full_output:
            return value, {
                "error": sum(i["error"] for _, i in vals), "tail": sum(i["tail"] for _, i in vals),
                "tau_end": max(i["tau_end"] for _, i in vals),
            }
        return value
    if s.real <= tube.D_hint:
        warnings.warn(f"Re s = {s.real} <= D_hint = {tube.D_hint}: integral may diverge", stacklevel=2)
    res = tube_integral(tube, cfg).evaluate(s, log_power)
    if full_output:
        return res.value, {"error": res.error, "tail": res.tail, "tau_end": res.tau_end}
    return res.value


def _tube_at_delta(tube: TubeModel, delta: float) -> float:
    return float(tube.fn(delta))


def distance_zeta(obj, s: complex, cfg: ZetaEvalConfig) -> complex:
    """Distance zeta function through the tube identity."""
    tube = _as_tube(obj)
    s = complex(s)
    N = tube.N
    head = complex(cfg.delta) ** (s - N) * _tube_at_delta(tube, cfg.delta)
    if s == N:
        return head
    return head + (N - s) * tube_zeta(tube, s, cfg)


def distance_zeta_derivative(obj, s: complex, cfg: ZetaEvalConfig) -> complex:
    """``d/ds zeta_A``: the log-weighted distance integral, via the tube identity."""
    tube = _as_tube(obj)
    s = complex(s)
    N = tube.N
    d = cfg.delta
    head = math.log(d) * complex(d) ** (s - N) * _tube_at_delta(tube, d)
    return head - tube_zeta(tube, s, cfg) + (N - s) * tube_zeta(tube, s, cfg, log_power=1)


def distance_zeta_direct_1d(s_set: FractalSet, s: complex, cfg: ZetaEvalConfig) -> complex:
    """Direct evaluation of ``int_{A_delta} d(x,A)^(s-1) dx`` for a 1-D set.

    Every gap of length g contributes ``2 min(g/2, delta)^s / s`` and the two
    outer half-lines ``delta^s / s`` each.
    """
    gaps = s_set.gaps
    if s_set.ambient_dim != 1 or gaps is None:
        raise TypeError("direct evaluation needs a 1-D set with a gap table")
    s = complex(s)
    d = cfg.delta
    try:
        total, _ = gaps.gap_power_sum(s, tol=cfg.quad_tol * 1e-2)
    except ArithmeticError as exc:
        raise DivergenceError(str(exc)) from exc
    big = gaps.levels_above(2 * d)
    big_sum = sum(c * complex(g) ** s for g, c in big)
    n_big = sum(c for _, c in big)
    return 2 ** (1 - s) / s * (total - big_sum) + 2 * complex(d) ** s / s * (1 + n_big)


def functional_equation_residual(s_set: FractalSet, s: complex, cfg: ZetaEvalConfig) -> float:
    """Mismatch between the direct 1-D integral and the tube identity."""
    direct = distance_zeta_direct_1d(s_set, s, cfg)
    via_tube = distance_zeta(tube_model(s_set), s, cfg)
    return abs(direct - via_tube)


def scaling_residual(s_set: FractalSet, lam: float, s: complex, cfg: ZetaEvalConfig) -> float:
    """``|zeta_{lam A}(s, lam delta) - lam^s zeta_A(s, delta)|``."""
    from .sets import scale

    s = complex(s)
    scaled_cfg = ZetaEvalConfig(lam * cfg.delta, cfg.quad_tol, None, cfg.max_refine)
    lhs = distance_zeta(tube_model(scale(s_set, lam)), s, scaled_cfg)
    rhs = complex(lam) ** s * distance_zeta(tube_model(s_set), s, cfg)
    return abs(lhs - rhs)


# --------------------------------------------------------------------------
# geometric zeta of fractal strings
# --------------------------------------------------------------------------


def geometric_zeta(
    lengths: FractalString | AString | Sequence[float] | Callable[[int], float],
    s: complex,
    tol: float = 1e-14,
    max_terms: int = 10**6,
    full_output: bool = False,
):
    """``sum_j l_j^s`` with a certified remainder.

    Geometrically decaying strings get a geometric tail bound; the a-string
    uses its Hurwitz-zeta tail expansion.  Returns the value, or
    ``(value, error_bound)`` with ``full_output``.
    """
    s = complex(s)
    if isinstance(lengths, AString):
        if s.real <= lengths.dim:
            raise DivergenceError(f"a-string series diverges for Re s <= {lengths.dim}", lengths.dim)
        out = (astring_zeta(lengths.a, s), 1e-13)
        return out if full_output else out[0]
    if isinstance(lengths, FractalString):
        if lengths.tail == 0:
            lengths = list(lengths.lengths)
        else:
            raise TypeError("pass the generating function of an infinite string")
    if not callable(lengths):
        out = (complex(sum(complex(l) ** s for l in lengths)), 0.0)
        return out if full_output else out[0]
    if s.real <= 0:
        raise DivergenceError("infinite string: terms do not tend to zero for Re s <= 0", 0.0)
    total = 0j
    prev = None
    ratios: list[float] = []
    for j in range(1, max_terms + 1):
        l = float(lengths(j))
        total += complex(l) ** s
        if prev is not None:
            ratios.append(l / prev)
        prev = l
        if len(ratios) >= 6:
            r = max(ratios[-6:])
            spread = r - min(ratios[-6:])
            if r < 1 and spread < 1e-9:
                rs = r**s.real
                bound = l**s.real * rs / (1 - rs)
                if bound < tol * max(1.0, abs(total)):
                    out = (total, bound)
                    return out if full_output else out[0]
                if spread < 1e-13:
                    # exactly geometric from here on: sum the tail in closed form
                    q = complex(r) ** s
                    tail = complex(l) ** s * q / (1 - q)
                    out = (total + tail, abs(tail) * 1e-12 / abs(1 - q))
                    return out if full_output else out[0]
            elif min(ratios[-6:]) >= 1:
                raise DivergenceError("lengths do not decay")
    raise DivergenceError("no certified tail within max_terms")


# --------------------------------------------------------------------------
# Appendix-style Dirichlet-type integrals
# --------------------------------------------------------------------------

ENTIRE = {
    "one": lambda s: 1.0 + 0j,
    "exp": cmath.exp,
}


class DtiDescriptor:
    tameness_bound: float = 1.0

    @property
    def abscissa_bound(self) -> float:
        raise NotImplementedError

    def evaluate(self, s: complex, cfg: ZetaEvalConfig | None = None) -> complex:
        raise NotImplementedError

    def exact(self, s: complex) -> complex:
        raise NotImplementedError


@dataclass(frozen=True)
class Elementary(DtiDescriptor):
    """``E = [1, inf)``, ``phi(x) = 1/x``, ``mu = x^a dx/x``; equals ``1/(s-a)``."""

    a: complex

    @property
    def abscissa_bound(self) -> float:
        return complex(self.a).real

    def evaluate(self, s, cfg=None):
        a = complex(self.a)
        s = complex(s)
        tol = cfg.quad_tol if cfg else 1e-12
        # x = e^tau: int_0^X exp((a - s) tau) dtau, then the exact remainder
        res = laplace_integral(
            lambda tau: np.exp(1j * a.imag * tau), s, 0.0, sigma0=a.real, period=1.0,
            tol=tol, tau_max=40.0, extrapolate=False,
        )
        X = res.tau_end
        return res.head + cmath.exp((a - s) * X) / (s - a)

    def exact(self, s):
        return 1 / (complex(s) - complex(self.a))


@dataclass(frozen=True)
class TensorProduct(DtiDescriptor):
    left: DtiDescriptor
    right: DtiDescriptor

    @property
    def tameness_bound(self) -> float:  # type: ignore[override]
        return self.left.tameness_bound * self.right.tameness_bound

    @property
    def abscissa_bound(self) -> float:
        return max(self.left.abscissa_bound, self.right.abscissa_bound)

    def evaluate(self, s, cfg=None):
        return self.left.evaluate(s, cfg) * self.right.evaluate(s, cfg)

    def exact(self, s):
        return self.left.exact(s) * self.right.exact(s)


@dataclass(frozen=True)
class ReciprocalPolynomial(DtiDescriptor):
    """``1 / (leading * prod (s - a_m))`` as a tensor product of elementary DTIs."""

    roots: tuple[complex, ...]
    leading: complex = 1.0

    @property
    def abscissa_bound(self) -> float:
        return max(complex(r).real for r in self.roots) if self.roots else -math.inf

    def as_tensor(self) -> DtiDescriptor | None:
        out: DtiDescriptor | None = None
        for r in self.roots:
            e = Elementary(r)
            out = e if out is None else TensorProduct(out, e)
        return out

    def evaluate(self, s, cfg=None):
        t = self.as_tensor()
        return (1.0 if t is None else t.evaluate(s, cfg)) / complex(self.leading)

    def exact(self, s):
        s = complex(s)
        return 1 / (complex(self.leading) * np.prod([s - complex(r) for r in self.roots]))


@dataclass(frozen=True)
class BaseR(DtiDescriptor):
    """``rho(s) * inner(r^-s)``: an extended DTI of the second type."""

    inner: DtiDescriptor
    r: float
    rho: str = "one"

    @property
    def abscissa_bound(self) -> float:
        # Re r^-s = r^-Re s cos(...) exceeds the inner bound for all Im s
        # only when r^-Re s > |bound|; report the real-axis threshold
        b = self.inner.abscissa_bound
        return math.log(max(b, 1e-300)) / math.log(1 / self.r) if b > 0 else -math.inf

    def evaluate(self, s, cfg=None):
        s = complex(s)
        return ENTIRE[self.rho](s) * self.inner.evaluate(complex(self.r) ** (-s), cfg)

    def exact(self, s):
        s = complex(s)
        return ENTIRE[self.rho](s) * self.inner.exact(complex(self.r) ** (-s))


def dti_eval(d: DtiDescriptor, s: complex, cfg: ZetaEvalConfig | None = None) -> complex:
    return d.evaluate(s, cfg)


# --------------------------------------------------------------------------
# abscissa probing
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AbscissaBracket:
    lo: float
    hi: float
    evaluations: int = field(default=0, compare=False)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def abscissa_probe(
    evaluator: Callable[[float], complex],
    s_grid,
    threshold: float = 1e12,
    bisections: int = 20,
    width: float | None = None,
) -> AbscissaBracket:
    """Bracket the abscissa of convergence by scanning down a real grid.

    A point counts as divergent if evaluation raises or returns a value
    above ``threshold`` in modulus.  The bracket between the last finite
    and the first divergent grid point is refined by bisection, stopping
    early once narrower than ``width``.  Without any blow-up the result is
    ``(-inf, min grid)``.
    """
    grid = sorted((float(x) for x in s_grid), reverse=True)
    n_eval = 0

    def ok(x: float) -> bool:
        nonlocal n_eval
        n_eval += 1
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                v = evaluator(x)
        except (ArithmeticError, OverflowError, ValueError):
            return False
        return bool(np.isfinite(abs(v)) and abs(v) <= threshold)

    last_ok = None
    for x in grid:
        if ok(x):
            last_ok = x
            continue
        if last_ok is None:
            raise ValueError("evaluator diverges at the top of the grid")
        lo, hi = x, last_ok
        for _ in range(bisections):
            if width is not None and hi - lo <= width:
                break
            mid = 0.5 * (lo + hi)
            if ok(mid):
                hi = mid
            else:
                lo = mid
        return AbscissaBracket(lo, hi, n_eval)
    return AbscissaBracket(-math.inf, grid[-1], n_eval)
