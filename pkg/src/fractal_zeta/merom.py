"""Closed-form meromorphic continuations, complex dimensions and residues.

A :class:`MeromorphicZeta` couples an evaluable kernel with its pole data.
Poles are stored as vertical lattices ``omega0 + i p Z`` plus isolated
points; multiplicities add up when a point belongs to several pieces.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .sets import AString, FractalString, _astring_coeffs, astring_zeta
from .tubes import ContentEstimate, ball_volume

__all__ = [
    "Lattice",
    "Pole",
    "ComplexDimensions",
    "MeromorphicZeta",
    "CantorForm",
    "CantorTubeForm",
    "SphereTubeForm",
    "StringDictionary",
    "RationalForm",
    "LatticeForm",
    "GrillShift",
    "GeometricString",
    "AStringZeta",
    "FiniteString",
    "string_zeta_model",
    "cantor_model",
    "cantor_tube_model",
    "sphere_model",
    "string_dictionary",
    "lattice_model",
    "rational_model",
    "grill_shift",
    "tube_form",
    "distance_form",
    "contour_residue",
    "ResidueFit",
    "residue_fit",
    "CheckResult",
    "ResidueContentReport",
    "residue_content_report",
    "equivalent",
    "WeakEquivalence",
    "weakly_equivalent",
]


# --------------------------------------------------------------------------
# pole bookkeeping
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Lattice:
    """``{omega0 + i p k : k in Z}`` with a common multiplicity.

    The base point is stored canonically with ``0 <= Im omega0 < p``.
    """

    omega0: complex
    p: float
    mult: int = 1

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError("lattice period must be positive")
        if self.mult < 1:
            raise ValueError("multiplicity must be >= 1")
        w = complex(self.omega0)
        im = math.fmod(w.imag, self.p)
        if im < 0:
            im += self.p
        if self.p - im < 1e-12 * self.p:
            im = 0.0
        object.__setattr__(self, "omega0", complex(w.real, im))

    def contains(self, w: complex, tol: float = 1e-9) -> bool:
        w = complex(w)
        if abs(w.real - self.omega0.real) > tol:
            return False
        k = round((w.imag - self.omega0.imag) / self.p)
        return abs(w.imag - self.omega0.imag - k * self.p) <= tol

    def points(self, height: float) -> list[complex]:
        k_lo = math.ceil((-height - self.omega0.imag) / self.p - 1e-12)
        k_hi = math.floor((height - self.omega0.imag) / self.p + 1e-12)
        return [self.omega0 + 1j * self.p * k for k in range(k_lo, k_hi + 1)]

    def shifted(self, d: float) -> "Lattice":
        return Lattice(self.omega0 + d, self.p, self.mult)

    def same(self, other: "Lattice", tol: float = 1e-9) -> bool:
        if abs(self.p - other.p) > tol or self.mult != other.mult:
            return False
        if abs(self.omega0.real - other.omega0.real) > tol:
            return False
        di = abs(self.omega0.imag - other.omega0.imag)
        return min(di, self.p - di) <= tol


@dataclass(frozen=True)
class Pole:
    omega: complex
    mult: int = 1

    def __post_init__(self):
        object.__setattr__(self, "omega", complex(self.omega))
        if self.mult < 1:
            raise ValueError("multiplicity must be >= 1")


@dataclass(frozen=True)
class ComplexDimensions:
    """Finite union of vertical pole lattices and isolated poles.

    ``complete`` is False when an infinite sequence of isolated poles was
    truncated for storage.  ``overlap`` says how the multiplicities of
    pieces meeting at a point combine: ``"add"`` for poles of a product,
    ``"max"`` for poles of a sum of functions.
    """

    lattices: tuple[Lattice, ...] = ()
    isolated: tuple[Pole, ...] = ()
    complete: bool = True
    overlap: str = "add"

    @property
    def D(self) -> float:
        re = [l.omega0.real for l in self.lattices] + [p.omega.real for p in self.isolated]
        return max(re) if re else -math.inf

    def principal(self, tol: float = 1e-9) -> "ComplexDimensions":
        D = self.D
        return ComplexDimensions(
            tuple(l for l in self.lattices if l.omega0.real >= D - tol),
            tuple(p for p in self.isolated if p.omega.real >= D - tol),
            overlap=self.overlap,
        )

    def shift(self, d: float) -> "ComplexDimensions":
        return ComplexDimensions(
            tuple(l.shifted(d) for l in self.lattices),
            tuple(Pole(p.omega + d, p.mult) for p in self.isolated),
            self.complete, self.overlap,
        )

    def union(self, other: "ComplexDimensions") -> "ComplexDimensions":
        return ComplexDimensions(
            self.lattices + other.lattices, self.isolated + other.isolated,
            self.complete and other.complete, self.overlap,
        )

    def multiplicity(self, w: complex, tol: float = 1e-9) -> int:
        w = complex(w)
        ms = [l.mult for l in self.lattices if l.contains(w, tol)]
        ms += [p.mult for p in self.isolated if abs(p.omega - w) <= tol]
        if self.overlap == "max":
            return max(ms, default=0)
        return sum(ms)

    def __contains__(self, w) -> bool:
        return self.multiplicity(w) > 0

    def poles(self, height: float = 0.0, tol: float = 1e-9) -> list[tuple[complex, int]]:
        """All poles with ``|Im| <= height``, merged, sorted by real part then imaginary."""
        pts: list[complex] = []
        for l in self.lattices:
            pts.extend(l.points(height))
        pts.extend(p.omega for p in self.isolated if abs(p.omega.imag) <= height)
        out: list[tuple[complex, int]] = []
        for w in sorted(pts, key=lambda z: (-z.real, z.imag)):
            if any(abs(w - u) <= tol for u, _ in out):
                continue
            out.append((w, self.multiplicity(w, tol)))
        return out


# --------------------------------------------------------------------------
# complex helpers
# --------------------------------------------------------------------------


def _cexpm1(z: complex) -> complex:
    z = complex(z)
    x, y = z.real, z.imag
    return complex(math.expm1(x) * math.cos(y) - 2 * math.sin(y / 2) ** 2, math.exp(x) * math.sin(y))


def _exp_ratio(L: float, z: complex) -> complex:
    """``(exp(L z) - 1) / z`` with its limit ``L`` at ``z = 0``."""
    z = complex(z)
    if abs(L * z) < 1e-6:
        lz = L * z
        return L * (1 + lz / 2 + lz * lz / 6 + lz**3 / 24)
    return _cexpm1(L * z) / z


def _pow(x: float, s: complex) -> complex:
    return cmath.exp(s * math.log(x))


def contour_residue(f: Callable[[complex], complex], w: complex, radius: float, n: int = 64) -> complex:
    """``(1/2 pi i) oint f`` on a circle, by the trapezoidal rule (spectrally accurate)."""
    th = 2 * math.pi * (np.arange(n) + 0.5) / n
    z = radius * np.exp(1j * th)
    vals = np.array([f(complex(w) + zz) for zz in z])
    return complex(np.mean(vals * z))


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CantorForm:
    """Distance zeta of C^(m,a) for delta >= c = (1-ma)/(2(m-1))."""

    m: int
    a: float
    delta: float

    @property
    def c(self) -> float:
        return (1 - self.m * self.a) / (2 * (self.m - 1))

    @property
    def T(self) -> float:
        return math.log(1 / self.a)

    @property
    def D(self) -> float:
        return math.log(self.m) / self.T

    def eval(self, s: complex) -> complex:
        m, a, c = self.m, self.a, self.c
        return _pow(c, s - 1) * (1 - m * a) / (s * (1 - m * _pow(a, s))) + 2 * _pow(self.delta, s) / s

    def residue(self, w: complex) -> complex:
        m, a, c = self.m, self.a, self.c
        if abs(w) < 1e-12:
            # -2 from the kernel term, +2 from the outer half-lines
            return (1 - m * a) / (c * (1 - m)) + 2
        return _pow(c, w - 1) * (1 - m * a) / (w * self.T)


@dataclass(frozen=True)
class CantorTubeForm:
    """Tube zeta of C^(m,a) for delta >= c, integrated from the periodic profile.

    Below c the tube is ``t^(1-D) G(log 1/t)``; one period of G integrates
    in closed form and the periods sum geometrically, giving the factor
    ``1/(1 - m a^s)``.  Above c the tube is ``1 + 2t``.
    """

    m: int
    a: float
    delta: float

    c = CantorForm.c
    T = CantorForm.T
    D = CantorForm.D

    def eval(self, s: complex) -> complex:
        m, a, c, D, d = self.m, self.a, self.c, self.D, self.delta
        la, lc = math.log(a), math.log(c)
        # m (a - a^s)/(s-1) and m (1 - a^s)/s, written through expm1
        j1 = -m * a * _exp_ratio(la, s - 1)
        j2 = -m * _exp_ratio(la, s)
        head = _pow(c, s - D) / (1 - m * _pow(a, s)) * (c ** (D - 1) * j1 + 2 * c**D * j2)
        # int_c^delta t^(s-2) (1 + 2t) dt
        rest = _pow(c, s - 1) * _exp_ratio(math.log(d) - lc, s - 1) + 2 * _pow(c, s) * _exp_ratio(math.log(d) - lc, s)
        return head + rest

    def residue(self, w: complex) -> complex:
        m, a, c = self.m, self.a, self.c
        return _pow(c, w - 1) * (1 - m * a) / (self.T * w * (1 - w))


@dataclass(frozen=True)
class SphereTubeForm:
    """Tube zeta of the unit sphere in R^N, a finite sum of simple poles."""

    N: int
    delta: float

    def terms(self) -> list[tuple[int, float]]:
        """``(pole, residue)`` pairs: poles N-k for odd k."""
        w = ball_volume(self.N)
        return [(self.N - k, 2 * w * math.comb(self.N, k)) for k in range(1, self.N + 1, 2)]

    def eval(self, s: complex) -> complex:
        return sum(r * _pow(self.delta, s - d) / (s - d) for d, r in self.terms())

    def residue(self, w: complex) -> complex:
        for d, r in self.terms():
            if abs(w - d) < 1e-12:
                return complex(r)
        return 0j


# string models -------------------------------------------------------------


@dataclass(frozen=True)
class GeometricString:
    """``sum_j l_j^s`` for an explicit head followed by ``b r^(j-1)``."""

    head: tuple[float, ...]
    b: float
    r: float

    @property
    def first_length(self) -> float:
        return max((*self.head, self.b))

    def eval(self, s: complex) -> complex:
        return sum(_pow(l, s) for l in self.head) + _pow(self.b, s) / (1 - _pow(self.r, s))

    def residue(self, w: complex) -> complex:
        return _pow(self.b, w) / math.log(1 / self.r)

    def dims(self) -> ComplexDimensions:
        return ComplexDimensions((Lattice(0j, 2 * math.pi / math.log(1 / self.r)),))

    def value_at_zero(self) -> complex | None:
        return None


@dataclass(frozen=True)
class AStringZeta:
    """Geometric zeta of the a-string, continued through its Hurwitz expansion.

    Poles sit at ``(1-k) rho`` for ``k = 0, 2, 3, ...`` with ``rho = 1/(1+a)``
    (the candidate at 0 is cancelled because ``c_1(0) = 0``).
    """

    a: float
    n_poles: int = 12

    @property
    def rho(self) -> float:
        return 1 / (1 + self.a)

    @property
    def first_length(self) -> float:
        return 1 - 2.0 ** (-self.a)

    def eval(self, s: complex) -> complex:
        return astring_zeta(self.a, s)

    def _pole_index(self, w: complex) -> int | None:
        k = 1 - w.real / self.rho
        kr = round(k)
        if abs(w.imag) < 1e-12 and abs(k - kr) < 1e-9 and kr >= 0 and kr != 1:
            return kr
        return None

    def residue(self, w: complex) -> complex:
        w = complex(w)
        k = self._pole_index(w)
        if k is None:
            return 0j
        ck = _astring_coeffs(self.a, w, k + 1)[k]
        return complex(self.rho * _pow(self.a, w) * ck)

    def dims(self) -> ComplexDimensions:
        poles = []
        for k in [0] + list(range(2, self.n_poles + 1)):
            w = (1 - k) * self.rho
            if abs(self.residue(w)) > 1e-14:
                poles.append(Pole(w))
        return ComplexDimensions((), tuple(poles), complete=False)

    def value_at_zero(self) -> complex:
        return astring_zeta(self.a, 0)


@dataclass(frozen=True)
class FiniteString:
    lengths: tuple[float, ...]

    @property
    def first_length(self) -> float:
        return max(self.lengths)

    def eval(self, s: complex) -> complex:
        return sum(_pow(l, s) for l in self.lengths)

    def residue(self, w: complex) -> complex:
        return 0j

    def dims(self) -> ComplexDimensions:
        return ComplexDimensions()

    def value_at_zero(self) -> complex:
        return complex(len(self.lengths))


def string_zeta_model(obj) -> GeometricString | AStringZeta | FiniteString:
    """Geometric-zeta model of an a-string, a finite string or a geometric string."""
    if isinstance(obj, AString):
        return AStringZeta(obj.a)
    if isinstance(obj, FractalString):
        if obj.tail == 0:
            return FiniteString(obj.lengths)
        if obj.ratio is None:
            raise TypeError("no closed form for this string's tail")
        l, r = list(obj.lengths), obj.ratio
        # find where exact geometric decay starts
        j = len(l) - 1
        while j > 0 and abs(l[j] / l[j - 1] - r) < 1e-9 * r:
            j -= 1
        return GeometricString(tuple(l[:j]), l[j], r)
    if isinstance(obj, (list, tuple)):
        return FiniteString(tuple(float(v) for v in obj))
    raise TypeError(f"no geometric-zeta model for {type(obj).__name__}")


@dataclass(frozen=True)
class StringDictionary:
    """``zeta_A(s) = 2^(1-s) zeta_L(s) / s + 2 delta^s / s`` for delta >= l_1/2."""

    string: GeometricString | AStringZeta | FiniteString
    delta: float

    def eval(self, s: complex) -> complex:
        return _pow(2.0, 1 - s) * self.string.eval(s) / s + 2 * _pow(self.delta, s) / s

    def zero_residue(self) -> complex | None:
        z0 = self.string.value_at_zero()
        return None if z0 is None else 2 * z0 + 2

    def residue(self, w: complex) -> complex:
        w = complex(w)
        if abs(w) < 1e-12:
            r0 = self.zero_residue()
            if r0 is not None:
                return r0
            return contour_residue(self.eval, 0j, 0.25 * self._gap_to_zero())
        return _pow(2.0, 1 - w) * self.string.residue(w) / w

    def _gap_to_zero(self) -> float:
        others = [abs(w) for w, _ in self.string.dims().poles(10.0) if abs(w) > 1e-12]
        return min(others, default=1.0)


@dataclass(frozen=True)
class RationalForm:
    """``sum_j sum_k c_jk / (s - w_j)^k`` plus an optional entire part.

    ``poles`` holds ``(w, (c_1, ..., c_mult))``; ``c_1`` is the residue.
    """

    poles: tuple[tuple[complex, tuple[complex, ...]], ...]
    entire: Callable[[complex], complex] | None = None

    def eval(self, s: complex) -> complex:
        out = 0j if self.entire is None else complex(self.entire(s))
        for w, cs in self.poles:
            for k, ck in enumerate(cs, 1):
                out += ck / (s - w) ** k
        return out

    def residue(self, w: complex) -> complex:
        for u, cs in self.poles:
            if abs(u - w) < 1e-12:
                return complex(cs[0])
        return 0j


@dataclass(frozen=True)
class LatticeForm:
    """``sum_i coef_i / (1 - m_i a_i^s)``: one pole lattice per term."""

    terms: tuple[tuple[complex, float, float], ...]

    def eval(self, s: complex) -> complex:
        return sum(c / (1 - m * _pow(a, s)) for c, m, a in self.terms)

    def residue(self, w: complex) -> complex:
        out = 0j
        for c, m, a in self.terms:
            T = math.log(1 / a)
            if Lattice(complex(math.log(m) / T), 2 * math.pi / T).contains(w):
                out += c / T
        return out


@dataclass(frozen=True)
class GrillShift:
    """Representative of a grill zeta: the base zeta at ``s - d``.

    The actual grill zeta differs from it by a function holomorphic on
    ``Re s > D + d - 1``, which carries the lower-order lattices.
    """

    base: "MeromorphicZeta"
    d: int

    def eval(self, s: complex) -> complex:
        return self.base(s - self.d)

    def residue(self, w: complex) -> complex:
        return self.base.residue(w - self.d)


@dataclass(frozen=True)
class _Converted:
    inner: "MeromorphicZeta"
    N: int
    volume: float
    delta: float
    to: str

    def eval(self, s: complex) -> complex:
        head = _pow(self.delta, s - self.N) * self.volume
        if self.to == "distance":
            return head + (self.N - s) * self.inner(s)
        return (self.inner(s) - head) / (self.N - s)

    def residue(self, w: complex) -> complex:
        r = self.inner.residue(w)
        return r * (self.N - w) if self.to == "distance" else r / (self.N - w)


# --------------------------------------------------------------------------
# the model
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MeromorphicZeta:
    """A zeta function known in closed form together with its poles.

    ``kind`` is ``"distance"``, ``"tube"``, ``"geometric"`` or ``"generic"``.
    ``exact_above``: the model equals the named zeta up to a function
    holomorphic on ``Re s > exact_above`` (``-inf`` when exact).
    ``removable`` lists points where a pole might be expected but the
    residue vanishes.
    """

    kernel: object
    kind: str
    N: int | None
    dims: ComplexDimensions
    removable: tuple[complex, ...] = ()
    exact_above: float = -math.inf
    label: str = ""

    def __call__(self, s: complex) -> complex:
        return complex(self.kernel.eval(complex(s)))

    @property
    def D(self) -> float:
        return self.dims.D

    def principal(self, tol: float = 1e-9) -> ComplexDimensions:
        return self.dims.principal(tol)

    def residue(self, w: complex) -> complex:
        w = complex(w)
        if w not in self.dims:
            return 0j
        res = getattr(self.kernel, "residue", None)
        if res is not None and self.dims.multiplicity(w) == 1:
            return complex(res(w))
        return contour_residue(self, w, self._isolation_radius(w))

    def _isolation_radius(self, w: complex) -> float:
        near = [abs(u - w) for u, _ in self.dims.poles(abs(w.imag) + 20.0) if abs(u - w) > 1e-12]
        return 0.25 * min(near, default=1.0)


def _cantor_check(m: int, a: float, delta: float) -> None:
    if m < 2 or not 0 < a or m * a >= 1:
        raise ValueError("need m >= 2 and 0 < m a < 1")
    c = (1 - m * a) / (2 * (m - 1))
    if delta < c * (1 - 1e-12):
        raise ValueError(f"closed form needs delta >= {c}")


def _cantor_dims(m: int, a: float, zero_residue: complex, tol: float = 1e-12):
    T = math.log(1 / a)
    lat = Lattice(complex(math.log(m) / T), 2 * math.pi / T)
    if abs(zero_residue) > tol:
        return ComplexDimensions((lat,), (Pole(0j),)), ()
    return ComplexDimensions((lat,)), (0j,)


def cantor_model(m: int, a: float, delta: float) -> MeromorphicZeta:
    """Distance zeta of C^(m,a) with its pole lattice ``D + (2 pi / T) i Z``.

    The point 0 is kept as a pole only if the residue there is nonzero;
    for every admissible (m, a, delta) it cancels and 0 is recorded as
    removable.
    """
    _cantor_check(m, a, delta)
    k = CantorForm(m, a, delta)
    dims, removable = _cantor_dims(m, a, k.residue(0j))
    return MeromorphicZeta(k, "distance", 1, dims, removable, label=f"C^({m},{a:g})")


def cantor_tube_model(m: int, a: float, delta: float) -> MeromorphicZeta:
    _cantor_check(m, a, delta)
    k = CantorTubeForm(m, a, delta)
    T = math.log(1 / a)
    dims = ComplexDimensions((Lattice(complex(math.log(m) / T), 2 * math.pi / T),))
    return MeromorphicZeta(k, "tube", 1, dims, (0j, 1 + 0j), label=f"C^({m},{a:g})")


def sphere_model(N: int, delta: float) -> MeromorphicZeta:
    """Tube zeta of the unit sphere in R^N (exact finite pole list)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not 0 < delta < 1:
        raise ValueError("need 0 < delta < 1")
    k = SphereTubeForm(N, delta)
    dims = ComplexDimensions((), tuple(Pole(complex(d)) for d, _ in k.terms()))
    return MeromorphicZeta(k, "tube", N, dims, label=f"S^{N - 1}")


def string_dictionary(string, delta: float) -> MeromorphicZeta:
    """Distance zeta of ``A_L`` from the geometric zeta of the string."""
    model = string if hasattr(string, "value_at_zero") else string_zeta_model(string)
    if delta < model.first_length / 2 * (1 - 1e-12):
        raise ValueError(f"dictionary needs delta >= l_1/2 = {model.first_length / 2}")
    k = StringDictionary(model, delta)
    dims = model.dims()
    removable: tuple[complex, ...] = ()
    r0 = k.zero_residue()
    if r0 is None:
        # zeta_L has a pole at 0 already; the 1/s factor raises its order
        dims = dims.union(ComplexDimensions((), (Pole(0j),)))
    elif abs(r0) > 1e-12:
        dims = dims.union(ComplexDimensions((), (Pole(0j),)))
    else:
        removable = (0j,)
    return MeromorphicZeta(k, "distance", 1, dims, removable, label="A_L")


def lattice_model(terms: Iterable[tuple[complex, int, float]]) -> MeromorphicZeta:
    """``sum c_i / (1 - m_i a_i^s)``, e.g. the Cantor kernel ``1/(1 - m a^s)``."""
    terms = tuple((complex(c), int(m), float(a)) for c, m, a in terms)
    lats = []
    for c, m, a in terms:
        T = math.log(1 / a)
        lat = Lattice(complex(math.log(m) / T), 2 * math.pi / T)
        if not any(l.same(lat) for l in lats):
            lats.append(lat)
    return MeromorphicZeta(LatticeForm(terms), "generic", None, ComplexDimensions(tuple(lats), overlap="max"))


def rational_model(poles: Sequence[tuple[complex, Sequence[complex]]], entire=None) -> MeromorphicZeta:
    """``sum_j sum_k c_jk/(s - w_j)^k``; a pole's multiplicity is its highest nonzero order."""
    clean = []
    isolated = []
    for w, cs in poles:
        cs = tuple(complex(c) for c in cs)
        order = max((k for k, c in enumerate(cs, 1) if c != 0), default=0)
        if order:
            clean.append((complex(w), cs))
            isolated.append(Pole(complex(w), order))
    dims = ComplexDimensions((), tuple(isolated))
    return MeromorphicZeta(RationalForm(tuple(clean), entire), "generic", None, dims)


def grill_shift(model: MeromorphicZeta, d: int) -> MeromorphicZeta:
    """Model of the zeta of ``A x [0,1]^d`` from that of A.

    Principal poles move right by d, and the model is exact up to a function
    holomorphic on ``Re s > D + d - 1``.  A point removable for the base
    stays removable after the shift when it lands in that band.  For
    generalized Cantor bases the lower lattices ``D + k`` and the integers
    below ``d`` are listed as well; those lie outside the certified band and
    carry no residues.
    """
    if d < 0:
        raise ValueError("d must be >= 0")
    if d == 0:
        return model
    base, d_total = model, d
    if isinstance(model.kernel, GrillShift):
        base, d_total = model.kernel.base, model.kernel.d + d
    N = None if base.N is None else base.N + d_total
    band = base.D + d_total - 1
    removable = tuple(w + d_total for w in base.removable if (w + d_total).real > band)
    if isinstance(base.kernel, (CantorForm, CantorTubeForm)):
        kb = base.kernel
        lat = base.dims.lattices[0]
        lats = tuple(Lattice(lat.omega0 + k, lat.p) for k in range(d_total + 1))
        ints = tuple(Pole(complex(k)) for k in range(d_total + 1) if all(abs(k - w) > 1e-12 for w in removable))
        dims = ComplexDimensions(lats[::-1], ints, complete=False)
        label = f"C^({kb.m},{kb.a:g}) x [0,1]^{d_total}"
    else:
        dims = base.principal().shift(d_total)
        label = f"{base.label} x [0,1]^{d_total}"
    return MeromorphicZeta(GrillShift(base, d_total), base.kind, N, dims, removable, band, label)


def tube_form(model: MeromorphicZeta, volume_at_delta: float, delta: float) -> MeromorphicZeta:
    """Tube zeta from a distance-zeta model: ``(zeta - delta^(s-N) |A_delta|)/(N - s)``."""
    if model.kind != "distance" or model.N is None:
        raise ValueError("need a distance-zeta model with ambient dimension")
    N = model.N
    keep = tuple(l for l in model.dims.lattices)
    iso = tuple(p for p in model.dims.isolated if abs(p.omega - N) > 1e-12)
    k = _Converted(model, N, volume_at_delta, delta, "tube")
    return MeromorphicZeta(k, "tube", N, ComplexDimensions(keep, iso, model.dims.complete),
                           model.removable + (complex(N),), label=model.label)


def distance_form(model: MeromorphicZeta, volume_at_delta: float, delta: float) -> MeromorphicZeta:
    """Distance zeta from a tube-zeta model: ``delta^(s-N)|A_delta| + (N - s) tube``."""
    if model.kind != "tube" or model.N is None:
        raise ValueError("need a tube-zeta model with ambient dimension")
    N = model.N
    iso = tuple(p for p in model.dims.isolated if abs(p.omega - N) > 1e-12)
    k = _Converted(model, N, volume_at_delta, delta, "distance")
    return MeromorphicZeta(k, "distance", N, ComplexDimensions(model.dims.lattices, iso, model.dims.complete),
                           model.removable, label=model.label)


# --------------------------------------------------------------------------
# residues from numerical evaluators
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidueFit:
    value: complex
    error: float
    method: str
    order: int
    converged: bool


def residue_fit(
    evaluator: Callable[[complex], complex],
    D_guess: complex,
    radius: float = 0.2,
    method: str = "richardson",
    levels: int = 7,
    tol: float = 1e-8,
) -> ResidueFit:
    """Residue of a simple pole at ``D_guess``.

    ``"richardson"`` extrapolates ``eps * f(D + eps)`` to ``eps = 0`` along
    ``eps = radius / 2^j`` (only needs values to the right of the pole);
    ``"contour"`` applies the trapezoidal rule on ``|s - D| = radius``.
    """
    D = complex(D_guess)
    if method == "contour":
        v1 = contour_residue(evaluator, D, radius, 64)
        v2 = contour_residue(evaluator, D, radius, 128)
        err = float(abs(v1 - v2))
        return ResidueFit(v2, err, "contour", 128, bool(err <= tol * max(1.0, abs(v2))))
    if method != "richardson":
        raise ValueError(f"unknown method {method!r}")
    eps = radius / 2.0 ** np.arange(levels)
    g = [complex(e * evaluator(D + e)) for e in eps]
    # Neville table for the polynomial through (eps_j, g_j), evaluated at 0
    table = [g]
    for k in range(1, levels):
        prev = table[-1]
        row = [
            (eps[j + k] * prev[j] - eps[j] * prev[j + 1]) / (eps[j + k] - eps[j])
            for j in range(levels - k)
        ]
        table.append(row)
    diag = [row[-1] for row in table]
    diffs = [abs(diag[k] - diag[k - 1]) for k in range(1, len(diag))]
    best = int(np.argmin(diffs)) + 1
    err = float(diffs[best - 1])
    value = complex(diag[best])
    return ResidueFit(value, err, "richardson", best, bool(err <= tol * max(1.0, abs(value))))


# --------------------------------------------------------------------------
# residue versus Minkowski content
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass", "fail" or "skip"
    measured: float
    expected: float
    margin: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"


@dataclass(frozen=True)
class ResidueContentReport:
    D: float
    N: int
    residue_distance: complex
    residue_tube: complex
    lower: float
    upper: float
    spread: float
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def residue_content_report(
    model: MeromorphicZeta,
    contents: ContentEstimate,
    partner: MeromorphicZeta | None = None,
    content_rtol: float = 5e-3,
) -> ResidueContentReport:
    """Compare the residue at D with the Minkowski content estimates.

    Checks the squeeze ``(N-D) M_* <= res zeta <= (N-D) M^*``, the relation
    ``res tube = res distance / (N - D)`` (against ``partner``, an
    independent model of the other kind, when given), strictness of the
    squeeze when the contents differ, and ``res tube = M`` when they agree.
    A strict inequality counts only if its margin exceeds 3 times the
    spread of the content estimate (scaled by N - D).
    """
    if model.N is None:
        raise ValueError("model needs an ambient dimension")
    N, D = model.N, model.D
    lat_or_pole = complex(D)
    checks: list[CheckResult] = []
    res_self = model.residue(lat_or_pole)
    if D >= N:
        res_d, res_t = (res_self, complex("nan")) if model.kind == "distance" else (complex("nan"), res_self)
        checks.append(CheckResult("relation", "skip", math.nan, math.nan, math.nan, "D = N: no distance-tube relation"))
        return ResidueContentReport(D, N, res_d, res_t, contents.lower, contents.upper, contents.residual_spread, tuple(checks))
    if model.kind == "distance":
        res_d, res_t = res_self, res_self / (N - D)
    else:
        res_t, res_d = res_self, res_self * (N - D)
    if partner is not None:
        other = partner.residue(lat_or_pole)
        mine, theirs = (res_t, other) if partner.kind == "tube" else (res_d, other)
        if partner.kind == "tube":
            res_t = other
        else:
            res_d = other
        diff = abs(mine - theirs)
        checks.append(CheckResult(
            "relation", "pass" if diff <= 1e-12 * max(1.0, abs(theirs)) else "fail",
            abs(mine), abs(theirs), -diff, "res tube = res distance / (N - D) between the two closed forms",
        ))
    lo, hi, sp = contents.lower * (N - D), contents.upper * (N - D), contents.residual_spread * (N - D)
    r = res_d.real
    checks.append(CheckResult(
        "squeeze", "pass" if lo - sp <= r <= hi + sp else "fail", r, 0.5 * (lo + hi),
        min(r - lo, hi - r), "(N-D) M_* <= res <= (N-D) M^*",
    ))
    measurable = contents.upper - contents.lower <= max(3 * contents.residual_spread, content_rtol * contents.upper)
    if measurable:
        M = 0.5 * (contents.lower + contents.upper)
        rel = abs(res_t.real - M) / M
        checks.append(CheckResult(
            "equality", "pass" if rel <= content_rtol else "fail", res_t.real, M, content_rtol - rel,
            "Minkowski measurable: res tube = M",
        ))
    else:
        margin = min(r - lo, hi - r)
        checks.append(CheckResult(
            "strict", "pass" if margin > 3 * sp else "fail", margin, 3 * sp, margin - 3 * sp,
            "strict squeeze, margin against 3x content spread",
        ))
    return ResidueContentReport(D, N, res_d, res_t, contents.lower, contents.upper, contents.residual_spread, tuple(checks))


# --------------------------------------------------------------------------
# equivalence relations
# --------------------------------------------------------------------------


def _match_lattices(a: Sequence[Lattice], b: Sequence[Lattice], tol: float) -> bool:
    left = list(b)
    for l in a:
        for i, r in enumerate(left):
            if l.same(r, tol):
                del left[i]
                break
        else:
            return False
    return not left


def _match_poles(a: Sequence[Pole], b: Sequence[Pole], tol: float) -> bool:
    left = list(b)
    for p in sorted(a, key=lambda p: (p.omega.real, p.omega.imag)):
        best, best_d = None, math.inf
        for i, q in enumerate(left):
            d = abs(p.omega - q.omega)
            if q.mult == p.mult and d < best_d:
                best, best_d = i, d
        if best is None or best_d > tol:
            return False
        del left[best]
    return not left


def equivalent(a: MeromorphicZeta, b: MeromorphicZeta, tol: float = 1e-9) -> bool:
    """Same abscissa and the same principal poles, multiplicities included."""
    if a.dims is None or b.dims is None:
        raise ValueError("both models need pole data")
    if abs(a.D - b.D) > tol:
        return False
    pa, pb = a.principal(tol), b.principal(tol)
    return _match_lattices(pa.lattices, pb.lattices, tol) and _match_poles(pa.isolated, pb.isolated, tol)


@dataclass(frozen=True)
class WeakEquivalence:
    result: bool | None  # None: brackets overlap, indeterminate
    h_bracket: object
    g_bracket: object


def weakly_equivalent(f, g, probe_grid, width: float | None = 0.01, h=None) -> WeakEquivalence:
    """Compare the abscissa of ``h = f - g`` with that of g.

    ``f`` and ``g`` are Dirichlet-type integrals over the same base (their
    difference is again one) or plain callables, in which case ``h`` may
    be supplied separately.
    """
    from .zeta import abscissa_probe

    if h is None:
        try:
            h = f - g
        except TypeError:
            h = lambda s: f(s) - g(s)  # noqa: E731
    gb = abscissa_probe(g, probe_grid, width=width)
    try:
        hb = abscissa_probe(h, probe_grid, width=width)
    except ValueError:
        # h already diverges at the top of the grid
        return WeakEquivalence(False, None, gb)
    if hb.hi < gb.lo:
        return WeakEquivalence(True, hb, gb)
    if hb.lo > gb.hi:
        return WeakEquivalence(False, hb, gb)
    return WeakEquivalence(None, hb, gb)
