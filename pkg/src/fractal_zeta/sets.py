"""Fractal families, their gap structure and exact distance functions.

Every set is an immutable dataclass.  One-dimensional sets expose a
:class:`GapTable` describing the bounded complementary intervals of their
closure inside the hull; tube volumes and distance zeta functions of 1-D
sets are computed from that table only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "SetError",
    "FractalSet",
    "GeneralizedCantor",
    "AString",
    "FractalString",
    "Sphere",
    "Grill",
    "DisjointUnion",
    "Scaled",
    "GapTable",
    "make_cantor",
    "make_astring",
    "make_fractal_string",
    "make_sphere",
    "make_grill",
    "make_union",
    "scale",
    "distance",
]

TAIL_TOL = 1e-14


class SetError(ValueError):
    """Invalid parameters for a fractal set construction."""


# --------------------------------------------------------------------------
# gap tables
# --------------------------------------------------------------------------


class GapTable:
    """Bounded gaps of a compact measure-zero subset of the real line.

    Gaps are grouped in levels of equal length, strictly decreasing.
    Subclasses implement ``count_above``, ``sum_at_or_below`` and
    ``levels_above``; everything else derives from those.
    """

    base_length: float

    def count_above(self, x):
        """Number of gaps strictly longer than ``x`` (vectorised)."""
        raise NotImplementedError

    def sum_at_or_below(self, x):
        """Total length of the gaps of length at most ``x`` (vectorised)."""
        raise NotImplementedError

    def levels_above(self, x: float) -> list[tuple[float, int]]:
        """Explicit ``(gap_length, count)`` levels with gap_length > x."""
        raise NotImplementedError

    def levels(self, n: int) -> list[tuple[float, int]]:
        """The first ``n`` levels (fewer for finite tables)."""
        raise NotImplementedError

    def gap_power_sum(self, s: complex, tol: float = 1e-15) -> tuple[complex, float]:
        """``sum count * g**s`` over all gaps, with an error bound."""
        raise NotImplementedError

    def kinks(self, lo: float, hi: float, limit: int = 4096) -> np.ndarray:
        """Half-gap radii in ``(lo, hi)``: the points where ``|A_t|`` bends."""
        g = [gl / 2 for gl, _ in self.levels_above(2 * lo)]
        r = np.array([x for x in g if lo < x < hi], dtype=float)
        return np.sort(r)[-limit:]


@dataclass(frozen=True)
class CantorGaps(GapTable):
    m: int
    a: float
    base_length: float = 1.0

    @property
    def first_gap(self) -> float:
        return (1 - self.m * self.a) / (self.m - 1)

    def _n_levels_above(self, x):
        # level k has gap g0 * a**k; count levels with g0 a^k > x
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            k = np.ceil(np.log(np.maximum(x, 1e-320) / self.first_gap) / math.log(self.a))
        k = np.where(x >= self.first_gap, 0.0, k)
        # guard the ceil against rounding at exact level lengths
        gk = self.first_gap * self.a ** np.maximum(k - 1, 0)
        k = np.where((k > 0) & (gk <= x), k - 1, k)
        return np.maximum(k, 0.0)

    def count_above(self, x):
        k = self._n_levels_above(x)
        return self.m**k - 1.0

    def sum_at_or_below(self, x):
        k = self._n_levels_above(x)
        ma = self.m * self.a
        # sum_{j>=k} m^j (m-1) g0 a^j
        return (self.m - 1) * self.first_gap * ma**k / (1 - ma)

    def levels_above(self, x: float) -> list[tuple[float, int]]:
        k = int(self._n_levels_above(x))
        return [(self.first_gap * self.a**j, self.m**j * (self.m - 1)) for j in range(k)]

    def levels(self, n: int) -> list[tuple[float, int]]:
        return [(self.first_gap * self.a**j, self.m**j * (self.m - 1)) for j in range(n)]

    def gap_power_sum(self, s: complex, tol: float = 1e-15) -> tuple[complex, float]:
        ratio = self.m * self.a**s
        q = abs(ratio)
        if q >= 1:
            raise ArithmeticError(f"gap series diverges at s={s}")
        term = (self.m - 1) * complex(self.first_gap) ** s
        total = 0j
        k = 0
        while True:
            total += term
            term *= ratio
            k += 1
            bound = abs(term) / (1 - q)
            if bound < tol * max(1.0, abs(total)) or k > 200000:
                return total, bound


@dataclass(frozen=True)
class AStringGaps(GapTable):
    a: float
    base_length: float = 1.0

    def length(self, j):
        j = np.asarray(j, dtype=float)
        # j^-a (1 - (1 + 1/j)^-a) without cancellation for large j
        return j ** (-self.a) * -np.expm1(-self.a * np.log1p(1 / j))

    def _n_above(self, x):
        # largest J with l_J > x; l_j decreasing, l_j ~ a j^{-a-1}
        x = np.atleast_1d(np.asarray(x, dtype=float))
        guess = np.floor((np.maximum(x, 1e-300) / self.a) ** (-1 / (self.a + 1)))
        guess = np.clip(guess, 0, 1e250)
        out = guess.copy()
        for _ in range(64):
            too_many = (out >= 1) & (self.length(np.maximum(out, 1)) <= x)
            too_few = self.length(out + 1) > x
            if not (too_many.any() or too_few.any()):
                break
            out = np.where(too_many, out - 1, out)
            out = np.where(too_few & ~too_many, out + 1, out)
        return out

    def count_above(self, x):
        n = self._n_above(x)
        return n if np.ndim(x) else float(n[0])

    def sum_at_or_below(self, x):
        n = self._n_above(x)
        v = (n + 1) ** (-self.a)
        return v if np.ndim(x) else float(v[0])

    def levels_above(self, x: float) -> list[tuple[float, int]]:
        n = int(self._n_above(x)[0])
        if n > 10**7:
            raise OverflowError("too many explicit gap levels requested")
        j = np.arange(1, n + 1)
        return [(float(g), 1) for g in self.length(j)]

    def levels(self, n: int) -> list[tuple[float, int]]:
        return [(float(g), 1) for g in self.length(np.arange(1, n + 1))]

    def kinks(self, lo: float, hi: float, limit: int = 4096) -> np.ndarray:
        n = int(self._n_above(2 * lo)[0])
        j0 = max(1, n - limit + 1)
        r = self.length(np.arange(j0, n + 1)) / 2
        return np.sort(r[(r > lo) & (r < hi)])

    def gap_power_sum(self, s: complex, tol: float = 1e-15) -> tuple[complex, float]:
        return astring_zeta(self.a, s), tol


@dataclass(frozen=True)
class ExplicitGaps(GapTable):
    """Finitely many explicit levels plus an unresolved cluster of total length ``tail``.

    With ``ratio`` set, the cluster continues the smallest explicit gap
    geometrically, so its power sums are known in closed form.
    """

    lv: tuple[tuple[float, int], ...]
    tail: float = 0.0
    base_length: float = field(default=0.0)
    ratio: float | None = None

    def _geometric_tail(self) -> bool:
        return self.tail > 0 and self.ratio is not None and bool(self.lv)

    def _n_tail_above(self, x: np.ndarray) -> np.ndarray:
        # k >= 1 with g_last r^k > x
        g, r = self.lv[-1][0], self.ratio
        with np.errstate(divide="ignore"):
            k = np.ceil(np.log(np.maximum(x, 1e-320) / g) / math.log(r)) - 1
        k = np.maximum(k, 0)
        # guard the rounding of the logarithm at exact boundaries
        k = np.where(g * r**k > x, k, np.maximum(k - 1, 0))
        k = np.where(g * r ** (k + 1) > x, k + 1, k)
        return k

    def count_above(self, x):
        x = np.asarray(x, dtype=float)
        g = np.array([l for l, _ in self.lv])
        c = np.array([n for _, n in self.lv], dtype=float)
        if g.size == 0:
            return np.zeros_like(x) if x.ndim else 0.0
        out = (c[None, :] * (g[None, :] > x.reshape(-1, 1))).sum(axis=1)
        if self._geometric_tail():
            out = out + self._n_tail_above(x.reshape(-1))
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def sum_at_or_below(self, x):
        x = np.asarray(x, dtype=float)
        g = np.array([l for l, _ in self.lv])
        c = np.array([n for _, n in self.lv], dtype=float)
        if g.size == 0:
            out = np.full(x.reshape(-1).shape, self.tail)
        elif self._geometric_tail():
            n = self._n_tail_above(x.reshape(-1))
            gl, r = self.lv[-1][0], self.ratio
            out = (c * g * (g[None, :] <= x.reshape(-1, 1))).sum(axis=1) + gl * r ** (n + 1) / (1 - r)
        else:
            out = (c * g * (g[None, :] <= x.reshape(-1, 1))).sum(axis=1) + self.tail
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def levels_above(self, x: float) -> list[tuple[float, int]]:
        out = [(g, c) for g, c in self.lv if g > x]
        if self._geometric_tail():
            g, r = self.lv[-1][0], self.ratio
            out += [(g * r**k, 1) for k in range(1, int(self._n_tail_above(np.array([x]))[0]) + 1)]
        return out

    def levels(self, n: int) -> list[tuple[float, int]]:
        out = list(self.lv[:n])
        if self._geometric_tail() and len(out) < n:
            g, r = self.lv[-1][0], self.ratio
            out += [(g * r**k, 1) for k in range(1, n - len(out) + 1)]
        return out

    def gap_power_sum(self, s: complex, tol: float = 1e-15) -> tuple[complex, float]:
        s = complex(s)
        total = sum(c * complex(g) ** s for g, c in self.lv)
        if self.tail > 0 and self.ratio is not None and self.lv:
            if s.real <= 0:
                raise ArithmeticError("geometric tail diverges for Re s <= 0")
            q = complex(self.ratio) ** s
            total += complex(self.lv[-1][0]) ** s * q / (1 - q)
            return complex(total), 1e-15 * abs(total)
        # the unresolved cluster is bounded by its total length times the
        # largest possible ratio; report it as the error
        err = self.tail ** min(s.real, 1.0) if self.tail > 0 else 0.0
        return complex(total), float(err)


@dataclass(frozen=True)
class ScaledGaps(GapTable):
    base: GapTable
    lam: float

    @property
    def base_length(self) -> float:  # type: ignore[override]
        return self.lam * self.base.base_length

    def count_above(self, x):
        return self.base.count_above(np.asarray(x) / self.lam)

    def sum_at_or_below(self, x):
        return self.lam * self.base.sum_at_or_below(np.asarray(x) / self.lam)

    def levels_above(self, x: float) -> list[tuple[float, int]]:
        return [(self.lam * g, c) for g, c in self.base.levels_above(x / self.lam)]

    def levels(self, n: int) -> list[tuple[float, int]]:
        return [(self.lam * g, c) for g, c in self.base.levels(n)]

    def kinks(self, lo: float, hi: float, limit: int = 4096) -> np.ndarray:
        return self.lam * self.base.kinks(lo / self.lam, hi / self.lam, limit)

    def gap_power_sum(self, s: complex, tol: float = 1e-15) -> tuple[complex, float]:
        v, e = self.base.gap_power_sum(s, tol)
        f = complex(self.lam) ** s
        return f * v, abs(f) * e


@dataclass(frozen=True)
class UnionGaps(GapTable):
    """Gaps of the components plus the separations between consecutive hulls."""

    parts: tuple[GapTable, ...]
    separations: tuple[float, ...]
    base_length: float = 0.0

    def _sep(self):
        return ExplicitGaps(tuple(sorted(((g, 1) for g in self.separations), reverse=True)))

    def count_above(self, x):
        return sum(p.count_above(x) for p in self.parts) + self._sep().count_above(x)

    def sum_at_or_below(self, x):
        return sum(p.sum_at_or_below(x) for p in self.parts) + self._sep().sum_at_or_below(x)

    def levels_above(self, x: float) -> list[tuple[float, int]]:
        merged: dict[float, int] = {}
        for p in (*self.parts, self._sep()):
            for g, c in p.levels_above(x):
                merged[g] = merged.get(g, 0) + c
        return sorted(merged.items(), reverse=True)

    def levels(self, n: int) -> list[tuple[float, int]]:
        merged: dict[float, int] = {}
        for p in (*self.parts, self._sep()):
            for g, c in p.levels(n):
                merged[g] = merged.get(g, 0) + c
        return sorted(merged.items(), reverse=True)[:n]

    def kinks(self, lo: float, hi: float, limit: int = 4096) -> np.ndarray:
        ks = [p.kinks(lo, hi, limit) for p in (*self.parts, self._sep())]
        return np.unique(np.concatenate(ks))[-limit:]

    def gap_power_sum(self, s: complex, tol: float = 1e-15) -> tuple[complex, float]:
        total, err = 0j, 0.0
        for p in (*self.parts, self._sep()):
            v, e = p.gap_power_sum(s, tol)
            total += v
            err += e
        return total, err


def astring_zeta(a: float, s: complex, J: int = 200, K: int = 24) -> complex:
    """Geometric zeta ``sum_j (j^-a - (j+1)^-a)^s`` of the a-string.

    Explicit sum over ``j < J`` plus the expansion of the tail in Hurwitz
    zeta values, which also continues the function meromorphically.
    """
    import mpmath

    s = complex(s)
    if s == 0:
        # c_1(s) zeta(w + 1, J) -> -1/2 is a 0 * pole limit the expansion cannot see
        return -1.0 + 0j
    j = np.arange(1, J, dtype=float)
    head = np.sum((j ** (-a) - (j + 1) ** (-a)).astype(complex) ** s)
    coeffs = _astring_coeffs(a, s, K)
    w = (a + 1) * s
    tail = 0j
    for k, ck in enumerate(coeffs):
        if ck == 0:
            continue
        tail += ck * complex(mpmath.zeta(w + k, J))
    return complex(head + complex(a) ** s * tail)


def _astring_coeffs(a: float, s: complex, K: int) -> np.ndarray:
    # (h(u)/(a u))^s with h(u) = 1 - (1+u)^-a, as a power series in u
    h = np.zeros(K + 1, dtype=complex)
    binom = 1.0
    for k in range(1, K + 2):
        binom *= (-a - (k - 1)) / k  # coefficient of u^k in (1+u)^-a
        if k - 1 <= K:
            h[k - 1] = -binom / a
    return _series_pow(h, s, K)


def _series_pow(p: np.ndarray, s: complex, K: int) -> np.ndarray:
    """Coefficients of ``p(u)**s`` up to u^K, assuming p[0] == 1."""
    out = np.zeros(K + 1, dtype=complex)
    out[0] = 1.0
    # J.C.P. Miller recurrence for powers of a power series
    for n in range(1, K + 1):
        acc = 0j
        for k in range(1, n + 1):
            if k < len(p):
                acc += (k * s - (n - k)) * p[k] * out[n - k]
        out[n] = acc / (n * p[0])
    return out


# --------------------------------------------------------------------------
# sets
# --------------------------------------------------------------------------


class FractalSet:
    """Base class of the compact sets handled by the package."""

    ambient_dim: int = 1

    @property
    def hull(self) -> tuple[tuple[float, float], ...]:
        raise NotImplementedError

    @property
    def dim(self) -> float:
        """Box dimension."""
        raise NotImplementedError

    @property
    def gaps(self) -> GapTable | None:
        return None

    def distance(self, x) -> np.ndarray:
        raise NotImplementedError

    @property
    def kind(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class GeneralizedCantor(FractalSet):
    m: int
    a: float

    @property
    def hull(self):
        return ((0.0, 1.0),)

    @property
    def dim(self) -> float:
        return math.log(self.m) / math.log(1 / self.a)

    @property
    def period(self) -> float:
        return math.log(1 / self.a)

    @property
    def gaps(self) -> CantorGaps:
        return CantorGaps(self.m, self.a)

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1)
        out = np.full(flat.shape, np.nan)
        lo = np.zeros_like(flat)
        length = np.ones_like(flat)
        out[flat <= 0] = -flat[flat <= 0]
        out[flat >= 1] = flat[flat >= 1] - 1
        active = np.isnan(out)
        g = (1 - self.m * self.a) / (self.m - 1)
        step = self.a + g
        depth = int(math.ceil(math.log(np.finfo(float).eps) / math.log(self.a))) + 2
        for _ in range(depth):
            if not active.any():
                break
            rel = (flat[active] - lo[active]) / length[active]
            i = np.clip(np.floor(rel / step), 0, self.m - 1)
            pos = rel - i * step
            inside = pos <= self.a
            idx = np.flatnonzero(active)
            hit = idx[~inside]
            out[hit] = np.minimum(pos[~inside] - self.a, step - pos[~inside]) * length[hit]
            go = idx[inside]
            lo[go] += i[inside] * step * length[go]
            length[go] *= self.a
            active[hit] = False
        rest = np.flatnonzero(active)
        out[rest] = np.minimum(flat[rest] - lo[rest], lo[rest] + length[rest] - flat[rest])
        out = np.maximum(out, 0.0)
        return out.reshape(x.shape) if x.ndim else float(out[0])


@dataclass(frozen=True)
class AString(FractalSet):
    a: float

    @property
    def hull(self):
        return ((0.0, 1.0),)

    @property
    def dim(self) -> float:
        return 1 / (1 + self.a)

    @property
    def gaps(self) -> AStringGaps:
        return AStringGaps(self.a)

    def length(self, j):
        return self.gaps.length(j)

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1)
        out = np.empty_like(flat)
        left = flat <= 0
        right = flat >= 1
        mid = ~(left | right)
        out[left] = -flat[left]
        out[right] = flat[right] - 1
        xm = flat[mid]
        with np.errstate(divide="ignore"):
            j = np.floor(xm ** (-1 / self.a))
        j = np.clip(j, 1, 1e300)
        # (j+1)^-a <= x <= j^-a, fixing rounding at the boundaries
        j = np.where(j ** (-self.a) < xm, j - 1, j)
        j = np.where((j + 1) ** (-self.a) > xm, j + 1, j)
        j = np.maximum(j, 1)
        out[mid] = np.minimum(xm - (j + 1) ** (-self.a), j ** (-self.a) - xm)
        out = np.maximum(out, 0.0)
        return out.reshape(x.shape) if x.ndim else float(out[0])


@dataclass(frozen=True)
class FractalString(FractalSet):
    """The set ``{a_k}`` with ``a_k = sum_{j >= k} l_j``, plus its limit point 0.

    ``lengths`` holds the explicit prefix; ``tail`` is the exact remaining
    sum ``a_{J+1}`` (zero for a finite string).  ``ratio`` is set when the
    lengths were recognised as eventually geometric with that ratio.
    """

    lengths: tuple[float, ...]
    tail: float = 0.0
    abscissa: float | None = None
    ratio: float | None = None

    @property
    def points(self) -> np.ndarray:
        l = np.asarray(self.lengths, dtype=float)
        pts = self.tail + np.concatenate([np.cumsum(l[::-1])[::-1], [0.0]])
        if self.tail > 0:
            pts = np.concatenate([pts, [0.0]])
        return pts

    @property
    def total_length(self) -> float:
        return float(sum(self.lengths) + self.tail)

    @property
    def hull(self):
        return ((0.0, self.total_length),)

    @property
    def dim(self) -> float:
        if self.abscissa is not None:
            return self.abscissa
        return 0.0 if self.tail == 0 else float("nan")

    @property
    def gaps(self) -> ExplicitGaps:
        merged: dict[float, int] = {}
        for l in self.lengths:
            merged[l] = merged.get(l, 0) + 1
        return ExplicitGaps(tuple(sorted(merged.items(), reverse=True)), self.tail, self.total_length, self.ratio)

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        pts = np.sort(self.points)
        flat = x.reshape(-1)
        i = np.searchsorted(pts, flat)
        lo = pts[np.clip(i - 1, 0, len(pts) - 1)]
        hi = pts[np.clip(i, 0, len(pts) - 1)]
        out = np.minimum(np.abs(flat - lo), np.abs(hi - flat))
        # the unresolved cluster [0, tail] counts as part of the set
        out = np.where((flat >= 0) & (flat <= self.tail), 0.0, out)
        return out.reshape(x.shape) if x.ndim else float(out[0])


@dataclass(frozen=True)
class Sphere(FractalSet):
    N: int

    @property
    def ambient_dim(self) -> int:  # type: ignore[override]
        return self.N

    @property
    def hull(self):
        return tuple((-1.0, 1.0) for _ in range(self.N))

    @property
    def dim(self) -> float:
        return float(self.N - 1)

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        if self.N == 1:
            return np.abs(np.abs(x) - 1.0)
        return np.abs(np.linalg.norm(x, axis=-1) - 1.0)


@dataclass(frozen=True)
class Grill(FractalSet):
    """``base x [0, L]^d``."""

    base: FractalSet
    d: int
    L: float = 1.0

    @property
    def ambient_dim(self) -> int:  # type: ignore[override]
        return self.base.ambient_dim + self.d

    @property
    def hull(self):
        return self.base.hull + tuple((0.0, self.L) for _ in range(self.d))

    @property
    def dim(self) -> float:
        return self.base.dim + self.d

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        n = self.base.ambient_dim
        xb = x[..., 0] if n == 1 else x[..., :n]
        db = np.asarray(self.base.distance(xb))
        y = x[..., n:]
        dy = np.maximum(np.maximum(-y, y - self.L), 0.0)
        return np.sqrt(db**2 + np.sum(dy**2, axis=-1))


@dataclass(frozen=True)
class DisjointUnion(FractalSet):
    components: tuple[tuple[FractalSet, float], ...]

    @property
    def ambient_dim(self) -> int:  # type: ignore[override]
        return self.components[0][0].ambient_dim

    def _intervals(self) -> list[tuple[float, float]]:
        return sorted((s.hull[0][0] + off, s.hull[0][1] + off) for s, off in self.components)

    @property
    def hull(self):
        iv = self._intervals()
        first = (iv[0][0], max(b for _, b in iv))
        return (first,) + self.components[0][0].hull[1:]

    @property
    def separation(self) -> float:
        iv = self._intervals()
        if len(iv) < 2:
            return math.inf
        return min(iv[i + 1][0] - iv[i][1] for i in range(len(iv) - 1))

    @property
    def additivity_threshold(self) -> float:
        """Tube volumes add up exactly for radii below this value."""
        return self.separation / 2

    @property
    def dim(self) -> float:
        return max(s.dim for s, _ in self.components)

    @property
    def gaps(self) -> UnionGaps | None:
        if self.ambient_dim != 1 or any(s.gaps is None for s, _ in self.components):
            return None
        iv = self._intervals()
        seps = tuple(iv[i + 1][0] - iv[i][1] for i in range(len(iv) - 1))
        return UnionGaps(
            tuple(s.gaps for s, _ in self.components), seps, iv[-1][1] - iv[0][0]
        )

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        out = None
        for s, off in self.components:
            if self.ambient_dim == 1:
                xs = x - off
            else:
                xs = x.copy()
                xs[..., 0] -= off
            d = np.asarray(s.distance(xs))
            out = d if out is None else np.minimum(out, d)
        return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class Scaled(FractalSet):
    base: FractalSet
    lam: float

    @property
    def ambient_dim(self) -> int:  # type: ignore[override]
        return self.base.ambient_dim

    @property
    def hull(self):
        return tuple((self.lam * lo, self.lam * hi) for lo, hi in self.base.hull)

    @property
    def dim(self) -> float:
        return self.base.dim

    @property
    def gaps(self) -> GapTable | None:
        g = self.base.gaps
        return None if g is None else ScaledGaps(g, self.lam)

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        d = self.lam * np.asarray(self.base.distance(x / self.lam))
        return d if d.ndim else float(d)


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------


def make_cantor(m: int, a: float) -> GeneralizedCantor:
    if int(m) != m or m < 2:
        raise SetError(f"m must be an integer >= 2, got {m}")
    if not a > 0:
        raise SetError(f"a must be positive, got {a}")
    if m * a >= 1:
        raise SetError(f"need m*a < 1, got m*a = {m * a}")
    return GeneralizedCantor(int(m), float(a))


def make_astring(a: float) -> AString:
    if not a > 0:
        raise SetError(f"a must be positive, got {a}")
    return AString(float(a))


def make_fractal_string(
    lengths: Sequence[float] | Callable[[int], float],
    tail: Callable[[int], float] | None = None,
    tail_tol: float = TAIL_TOL,
    max_terms: int = 10**6,
    abscissa: float | None = None,
) -> FractalString:
    """Build ``A_L`` from a nonincreasing summable sequence of lengths.

    ``lengths`` is either a finite sequence or a function of the 1-based
    index.  An infinite sequence needs ``tail(J) = sum_{j > J} l_j`` or
    must decay geometrically, so the truncated remainder is known.
    """
    if not callable(lengths):
        l = [float(v) for v in lengths]
        if not l:
            raise SetError("empty string")
        _check_monotone(l)
        return FractalString(tuple(l), 0.0, abscissa)

    out: list[float] = []
    ratios: list[float] = []
    for j in range(1, max_terms + 1):
        v = float(lengths(j))
        if out:
            ratios.append(v / out[-1])
        out.append(v)
        _check_monotone(out[-2:])
        if tail is not None:
            rem = float(tail(j))
            if rem < tail_tol:
                return FractalString(tuple(out), rem, abscissa)
            continue
        if j >= 8:
            r = max(ratios[-6:])
            if min(ratios[-6:]) >= 1 - 1e-12:
                raise SetError("lengths are not summable (no decay)")
            if r < 1 and all(abs(q - ratios[-1]) < 1e-9 for q in ratios[-6:]):
                rem = v * r / (1 - r)
                if rem < tail_tol:
                    # geometric decay: sum l_j^s converges exactly for Re s > 0
                    D = 0.0 if abscissa is None else abscissa
                    return FractalString(tuple(out), rem, D, ratios[-1])
        if j == 64 and tail is None and not _geometric(ratios):
            # partial-sum growth test: the second half must contribute little
            half = sum(out[32:]) / max(sum(out[:32]), 1e-300)
            if half > 0.5:
                raise SetError("lengths are not summable (partial sums keep growing)")
            raise SetError("cannot certify the tail: supply tail(J)")
    raise SetError("tail did not fall below tail_tol within max_terms")


def _geometric(ratios: list[float]) -> bool:
    r = ratios[-6:]
    return max(r) < 1 and max(r) - min(r) < 1e-9


def _check_monotone(l: Sequence[float]) -> None:
    for v in l:
        if not v > 0:
            raise SetError("lengths must be positive")
    for u, v in zip(l, l[1:]):
        if v > u:
            raise SetError("lengths must be nonincreasing")


def make_sphere(N: int) -> Sphere:
    if int(N) != N or N < 1:
        raise SetError(f"N must be an integer >= 1, got {N}")
    return Sphere(int(N))


def make_grill(base: FractalSet, d: int, L: float = 1.0) -> Grill:
    if int(d) != d or d < 1:
        raise SetError(f"d must be an integer >= 1, got {d}")
    if not L > 0:
        raise SetError(f"side length must be positive, got {L}")
    if isinstance(base, Grill) and base.L == L:
        return Grill(base.base, base.d + int(d), float(L))
    return Grill(base, int(d), float(L))


def make_union(components: Sequence[tuple[FractalSet, float]]) -> DisjointUnion:
    comps = tuple((s, float(off)) for s, off in components)
    if not comps:
        raise SetError("empty union")
    dims = {s.ambient_dim for s, _ in comps}
    if len(dims) != 1:
        raise SetError("components live in different ambient spaces")
    u = DisjointUnion(comps)
    iv = u._intervals()
    for (a0, a1), (b0, b1) in zip(iv, iv[1:]):
        if b0 <= a1:
            raise SetError(f"hulls overlap: [{a0}, {a1}] and [{b0}, {b1}]")
    return u


def scale(s: FractalSet, lam: float) -> FractalSet:
    if not lam > 0:
        raise SetError(f"scale factor must be positive, got {lam}")
    if isinstance(s, Scaled):
        return Scaled(s.base, s.lam * lam)
    return Scaled(s, float(lam))


def distance(s: FractalSet, x):
    return s.distance(x)
