"""Adaptive Gauss-Legendre panels and Laplace-type integrals on a half-line.

Everything that integrates ``t^(s-n-1) F(t)`` over ``(0, delta)`` goes
through :func:`laplace_integral`, after the change of variables
``t = exp(-tau)``.  The integrand is processed window by window; the ratio
of consecutive window integrals both detects divergence (ratio >= 1) and
extrapolates the remaining tail (exact when the profile is periodic with
the window length).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["DivergenceError", "adaptive_gl", "laplace_integral", "LaplaceResult"]

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(16)


class DivergenceError(ArithmeticError):
    """The integral does not converge at the requested point."""

    def __init__(self, msg: str, abscissa_estimate: float | None = None):
        if abscissa_estimate is not None:
            msg = f"{msg} (estimated abscissa {abscissa_estimate:.4g})"
        super().__init__(msg)
        self.abscissa_estimate = abscissa_estimate


def _gl(f, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = f(x.ravel()).reshape(x.shape)
    return half * (fx @ _WEIGHTS), half * (np.abs(fx) @ _WEIGHTS)


def adaptive_gl(f: Callable, edges, tol: float, max_refine: int = 12):
    """Integrate a vectorised ``f`` over consecutive panels given by ``edges``.

    A panel is accepted when the 16-point rule and the sum over its two
    halves agree within its share of ``tol``; otherwise it is split.
    Returns ``(value, abs_value, error_estimate)``.
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    total_width = float(edges[-1] - edges[0])
    value = 0j
    absval = 0.0
    err = 0.0
    for depth in range(max_refine + 1):
        if a.size == 0:
            break
        coarse, _ = _gl(f, a, b)
        m = 0.5 * (a + b)
        left, labs = _gl(f, a, m)
        right, rabs = _gl(f, m, b)
        fine = left + right
        diff = np.abs(fine - coarse)
        share = tol * (b - a) / total_width
        ok = (diff <= share) | (depth == max_refine)
        value += np.sum(fine[ok])
        absval += float(np.sum(labs[ok] + rabs[ok]))
        err += float(np.sum(diff[ok]))
        a, b = np.concatenate([a[~ok], m[~ok]]), np.concatenate([m[~ok], b[~ok]])
    return value, absval, err


@dataclass(frozen=True)
class LaplaceResult:
    value: complex
    error: float
    head: complex
    tail: complex
    tau_end: float
    ratio: float


def laplace_integral(
    w: Callable,
    s: complex,
    tau0: float,
    *,
    sigma0: float = 0.0,
    breaks=None,
    period: float | None = None,
    tol: float = 1e-12,
    tau_max: float = 400.0,
    max_refine: int = 12,
    log_power: int = 0,
    extrapolate: bool = True,
) -> LaplaceResult:
    """``int_{tau0}^inf w(tau) exp(-(s - sigma0) tau) (-tau)^k dtau``.

    ``w`` should be of moderate size (a normalised profile).  ``breaks`` are
    points where ``w`` is not smooth; panels are aligned to them.  Windows
    have length ``period`` (rounded up to at least 1) so that log-periodic
    profiles extrapolate exactly.
    """
    s = complex(s)
    z = s - sigma0
    L = period if period else 2.0
    if L < 1.0:
        L *= math.ceil(1.0 / L)
    h = min(0.5, 2.0 / max(abs(z.imag), 1e-9))
    breaks = np.sort(np.asarray([] if breaks is None else breaks, dtype=float))

    def integrand(tau):
        val = w(tau) * np.exp(-z * tau)
        if log_power:
            val = val * (-tau) ** log_power
        return val

    total = 0j
    err = 0.0
    windows: list[complex] = []
    abs_windows: list[float] = []
    tau = tau0
    q = 0j
    q_abs = 0.0
    growing = 0
    settled = 0
    while tau < tau_max:
        hi = tau + L
        n = max(1, math.ceil(L / h))
        edges = np.linspace(tau, hi, n + 1)
        inner = breaks[(breaks > tau) & (breaks < hi)]
        if inner.size:
            edges = np.unique(np.concatenate([edges, inner]))
            edges = edges[np.concatenate([[True], np.diff(edges) > 1e-13])]
        wv, wa, we = adaptive_gl(integrand, edges, tol * max(1.0, abs(total)) / 4, max_refine)
        total += wv
        err += we
        windows.append(wv)
        abs_windows.append(wa)
        tau = hi
        if len(windows) >= 2 and abs_windows[-2] > 0:
            q_abs = abs_windows[-1] / abs_windows[-2]
            q = windows[-1] / windows[-2] if windows[-2] != 0 else 0j
            growing = growing + 1 if q_abs > 1.0 else 0
            if growing >= 4 and tau - tau0 > 8 * L:
                raise DivergenceError(
                    f"integral diverges at s={s}", s.real + math.log(q_abs) / L
                )
            if q_abs < 1.0:
                bound = abs_windows[-1] * q_abs / (1 - q_abs)
                if bound <= tol * max(1.0, abs(total)):
                    return LaplaceResult(total + 0j, err + bound, total, 0j, tau, q_abs)
                if extrapolate and len(windows) >= 3 and windows[-3] != 0 and abs(q) < 1:
                    # settled ratio: the remaining windows form a geometric series
                    q_prev = windows[-2] / windows[-3]
                    tail = windows[-1] * q / (1 - q)
                    tail_err = abs(tail) * abs(q - q_prev) / abs(1 - q)
                    if tail_err <= tol * max(1.0, abs(total)):
                        settled += 1
                        if settled >= 2:
                            return LaplaceResult(total + tail, err + tail_err, total, tail, tau, q_abs)
                    else:
                        settled = 0
        if len(windows) == 1 and wa == 0.0:
            return LaplaceResult(0j, 0.0, 0j, 0j, tau, 0.0)
    if q_abs >= 1.0 or len(windows) < 2:
        est = s.real + math.log(q_abs) / L if q_abs > 0 else None
        raise DivergenceError(f"integral diverges at s={s}", est)
    tail = windows[-1] * q / (1 - q) if extrapolate else 0j
    # uncertainty of the extrapolation: change in the window ratio
    q_prev = windows[-2] / windows[-3] if len(windows) >= 3 and windows[-3] != 0 else q
    tail_err = abs(tail) * abs(q - q_prev) / max(abs(1 - q), 1e-300)
    return LaplaceResult(total + tail, err + tail_err, total, tail, tau, q_abs)
