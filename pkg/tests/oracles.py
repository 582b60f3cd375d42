"""Independent reference evaluators used only by the test-suite."""
from __future__ import annotations

import math

import numpy as np
import mpmath


def _cquad(f, a, b):
    # tanh-sinh copes with the algebraic endpoint behaviour
    with mpmath.workdps(30):
        return complex(mpmath.quad(f, [a, b]))


def _asin_coeffs(n_terms: int):
    # arcsin(u) - u = sum_{n>=1} c_n u^(2n+1)
    return [math.comb(2 * n, n) / (4**n * (2 * n + 1)) for n in range(1, n_terms + 1)]


def _asin_remainder(s: complex) -> complex:
    """``int_0^1 u^(-s-1) (arcsin u - u) du`` for ``Re s < 3``, via ``u = sin(phi)``."""
    return _cquad(lambda p: mpmath.sin(p) ** (-s - 1) * (p - mpmath.sin(p)) * mpmath.cos(p), 0, mpmath.pi / 2)


def slab_integral(w: float, s: complex, delta: float) -> complex:
    """``int_0^w int_R (x^2+y^2)^((s-2)/2) [x^2+y^2 < delta^2] dy dx`` for ``0 < w <= delta``.

    In polar coordinates the strip ``0 < x < w`` sees the full angle up to
    radius ``w`` and the angle ``arcsin(w/rho)`` beyond.
    """
    s = complex(s)
    w = float(min(w, delta))
    head = math.pi * complex(w) ** s / s
    if w >= delta:
        return head
    eps = w / delta
    if eps > 0.25:
        # u = sin(phi) removes the square-root singularity at u = 1
        body = _cquad(lambda p: mpmath.sin(p) ** (-s - 1) * p * mpmath.cos(p), mpmath.asin(eps), mpmath.pi / 2)
        return head + 2 * complex(w) ** s * body
    # split arcsin(u) = u + (arcsin(u) - u); the second piece is O(u^3) at 0
    lin = (1 - eps ** (1 - s)) / (1 - s)
    k_full = _asin_remainder(s)
    k_head = sum(c * eps ** (2 * n + 1 - s) / (2 * n + 1 - s) for n, c in enumerate(_asin_coeffs(30), 1))
    return head + 2 * complex(w) ** s * (lin + k_full - k_head)


def cantor_zeta_codim1(m: int, a: float, s: complex, delta: float, levels: int = 200) -> complex:
    """Distance zeta of ``C^(m,a) x {0}`` in the plane by direct integration.

    Each half-gap of half-length ``w`` (and each outer end, ``w = delta``)
    is a strip on which ``d = sqrt(x^2 + y^2)``; the strip integrals come
    from :func:`slab_integral`, with gaps far below ``delta`` summed through
    the small-``w`` expansion ``w I0 + w^s K``.
    """
    s = complex(s)
    g0 = (1 - m * a) / (m - 1)
    total = 2 * slab_integral(delta, s, delta)
    i0 = 2 * delta ** (s - 1) / (s - 1)
    k_full = _asin_remainder(s)
    const = math.pi / s + 2 / (1 - s) + 2 * k_full
    for k in range(levels):
        g = g0 * a**k
        count = (m - 1) * m**k
        w = g / 2
        if w / delta > 1e-6:
            total += 2 * count * slab_integral(w, s, delta)
        else:
            # remaining levels in closed form; the O(w^3) correction is below 1e-16 relative
            r1, rs = m * a, m * complex(a) ** s
            total += 2 * count * (w * i0 / (1 - r1) + complex(w) ** s * const / (1 - rs))
            break
    return total


def monte_carlo_area(points, radius: float, box, n: int, seed: int = 0):
    """Area of the union of discs of ``radius`` about ``points`` (segments allowed)."""
    rng = np.random.default_rng(seed)
    (x0, x1), (y0, y1) = box
    xy = rng.uniform((x0, y0), (x1, y1), size=(n, 2))
    hit = np.zeros(n, dtype=bool)
    for seg in points:
        (ax, ay), (bx, by) = seg
        d = np.array([bx - ax, by - ay])
        L2 = float(d @ d)
        rel = xy - np.array([ax, ay])
        u = np.clip(rel @ d / L2, 0, 1) if L2 > 0 else np.zeros(n)
        near = rel - u[:, None] * d
        hit |= np.einsum("ij,ij->i", near, near) < radius**2
    area = (x1 - x0) * (y1 - y0)
    p = hit.mean()
    return area * p, area * math.sqrt(p * (1 - p) / n)
