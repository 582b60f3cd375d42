"""Quasiperiodic unions of generalized Cantor sets.

Moduli ``m_i`` with a common dimension D give scales ``a_i = m_i^(-1/D)``
and log-periods ``T_i = log(m_i) / D``.  Ratios ``T_i/T_j`` are irrational
exactly when the exponent vectors of the ``m_i`` over their primes are
linearly independent over Q, which is checked here in exact integer
arithmetic.  Transcendence of the ratios is a known theorem and is not
re-proved; :func:`irrationality_evidence` only reports continued fractions.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
from scipy import signal

from .merom import ComplexDimensions, Lattice, MeromorphicZeta, Pole, lattice_model
from .sets import DisjointUnion, FractalSet, make_cantor, make_grill, make_union

__all__ = [
    "QuasiWarning",
    "factorize",
    "rational_rank",
    "exponent_matrix",
    "QuasiConstruction",
    "build_quasiperiodic",
    "union_model",
    "union_dims",
    "union_kernel",
    "log_ratio",
    "ContinuedFraction",
    "irrationality_evidence",
    "PeriodRecovery",
    "periodogram",
    "period_recover",
    "grill_quasi",
]

SPACING = 2.0  # unit hulls at 0, 2, 4, ...


class QuasiWarning(UserWarning):
    pass


def factorize(m: int) -> list[tuple[int, int]]:
    """Prime factorisation by trial division."""
    if int(m) != m or m < 2:
        raise ValueError(f"need an integer >= 2, got {m}")
    m = int(m)
    out = []
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out


def rational_rank(matrix: Sequence[Sequence[int]]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination on Python integers."""
    rows = [[int(v) for v in r] for r in matrix]
    if not rows or not rows[0]:
        raise ValueError("empty matrix")
    if any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    n_rows, n_cols = len(rows), len(rows[0])
    rank, prev = 0, 1
    for col in range(n_cols):
        piv = next((i for i in range(rank, n_rows) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        for i in range(rank + 1, n_rows):
            for j in range(col + 1, n_cols):
                # exact division is guaranteed by Sylvester's identity
                rows[i][j] = (p * rows[i][j] - rows[i][col] * rows[rank][j]) // prev
            rows[i][col] = 0
        prev = p
        rank += 1
        if rank == n_rows:
            break
    return rank


def exponent_matrix(moduli: Sequence[int]) -> tuple[list[int], list[list[int]]]:
    """Shared primes and the exponent vector of each modulus over them."""
    facs = [dict(factorize(m)) for m in moduli]
    primes = sorted(set().union(*facs))
    return primes, [[f.get(p, 0) for p in primes] for f in facs]


@dataclass(frozen=True)
class QuasiConstruction:
    D: float
    moduli: tuple[int, ...]
    scales: tuple[float, ...]
    primes: tuple[int, ...]
    exponent_matrix: tuple[tuple[int, ...], ...]
    periods: tuple[float, ...]
    rank: int
    certified: bool
    offsets: tuple[float, ...] = field(default=())

    @property
    def n(self) -> int:
        return len(self.moduli)

    def record(self) -> dict:
        return {
            "D": self.D,
            "moduli": list(self.moduli),
            "a": list(self.scales),
            "T": list(self.periods),
            "primes": list(self.primes),
            "exponent_matrix": [list(r) for r in self.exponent_matrix],
            "rank": self.rank,
            "certified": self.certified,
        }


def build_quasiperiodic(D: float, moduli: Sequence[int]) -> tuple[DisjointUnion, QuasiConstruction]:
    """Union of ``C^(m_i, m_i^(-1/D))`` placed on ``[2(i-1), 2(i-1)+1]``.

    ``certified`` holds iff the exponent vectors have full rank; otherwise
    the union is still built and a :class:`QuasiWarning` is issued.
    """
    if not 0 < D < 1:
        raise ValueError(f"D must lie in (0, 1), got {D}")
    moduli = tuple(int(m) for m in moduli)
    if not moduli:
        raise ValueError("need at least one modulus")
    if len(set(moduli)) < len(moduli):
        warnings.warn("repeated moduli: exponent vectors cannot be independent", QuasiWarning, stacklevel=2)
    primes, mat = exponent_matrix(moduli)
    rank = rational_rank(mat)
    scales = tuple(m ** (-1 / D) for m in moduli)
    periods = tuple(math.log(m) / D for m in moduli)
    offsets = tuple(SPACING * i for i in range(len(moduli)))
    union = make_union([(make_cantor(m, a), off) for m, a, off in zip(moduli, scales, offsets)])
    certified = rank == len(moduli)
    if not certified:
        warnings.warn(
            f"exponent vectors have rank {rank} < {len(moduli)}: periods are rationally dependent",
            QuasiWarning, stacklevel=2,
        )
    qc = QuasiConstruction(
        D, moduli, scales, tuple(primes), tuple(tuple(r) for r in mat), periods, rank, certified, offsets
    )
    return union, qc


@dataclass(frozen=True)
class _SumForm:
    parts: tuple[MeromorphicZeta, ...]

    def eval(self, s: complex) -> complex:
        return sum(p(s) for p in self.parts)

    def residue(self, w: complex) -> complex:
        return sum(p.residue(w) for p in self.parts)


def union_model(qc: QuasiConstruction, delta: float | None = None) -> MeromorphicZeta:
    """Distance zeta of the union as the sum of the component closed forms.

    Needs ``max c_i <= delta < 1/2`` (closed forms apply, neighbourhoods
    stay disjoint).  0 is a pole only if the summed residue there is nonzero.
    """
    cs = [(1 - m * a) / (2 * (m - 1)) for m, a in zip(qc.moduli, qc.scales)]
    if delta is None:
        delta = max(cs)
    if not max(cs) <= delta < SPACING / 2 - 0.5:
        raise ValueError(f"need {max(cs)} <= delta < 0.5")
    from .merom import cantor_model

    parts = tuple(cantor_model(m, a, delta) for m, a in zip(qc.moduli, qc.scales))
    lats: list[Lattice] = []
    for p in parts:
        for l in p.dims.lattices:
            if not any(l.same(k) for k in lats):
                lats.append(l)
    r0 = sum(p.kernel.residue(0j) for p in parts)
    iso = (Pole(0j),) if abs(r0) > 1e-12 else ()
    dims = ComplexDimensions(tuple(lats), iso, overlap="max")
    return MeromorphicZeta(_SumForm(parts), "distance", 1, dims, () if iso else (0j,), label="quasi-union")


def union_dims(qc: QuasiConstruction, delta: float | None = None) -> ComplexDimensions:
    return union_model(qc, delta).dims


def union_kernel(qc: QuasiConstruction) -> MeromorphicZeta:
    """``sum_i 1/(1 - m_i a_i^s)``: same principal poles as the union's zeta."""
    return lattice_model([(1.0, m, a) for m, a in zip(qc.moduli, qc.scales)])


# --------------------------------------------------------------------------
# continued fractions
# --------------------------------------------------------------------------


def log_ratio(p: int, q: int, dps: int = 60) -> mpmath.mpf:
    """``log p / log q`` to ``dps`` digits."""
    with mpmath.workdps(dps):
        return +(mpmath.log(p) / mpmath.log(q))


@dataclass(frozen=True)
class ContinuedFraction:
    partial_quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    residuals: tuple[float, ...]  # |x - p/q| q^2
    terminated: bool  # the value is consistent with a finite expansion
    exhausted: bool  # input precision ran out before the requested depth

    @property
    def depth(self) -> int:
        return len(self.partial_quotients) - 1

    @property
    def max_partial_quotient(self) -> int:
        return max(self.partial_quotients[1:], default=0)


def _to_interval(x, rel_err: float | None) -> tuple[Fraction, Fraction]:
    if isinstance(x, Fraction):
        return x, x
    if isinstance(x, int):
        return Fraction(x), Fraction(x)
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        v = Fraction(int(man)) * Fraction(2) ** int(exp)
        bits = max(int(man).bit_length(), mpmath.mp.prec)
        err = Fraction(2) ** (-(bits - 8)) if rel_err is None else Fraction(rel_err)
    else:
        v = Fraction(float(x))
        err = Fraction(2) ** -48 if rel_err is None else Fraction(rel_err)
    return v - abs(v) * err, v + abs(v) * err


def irrationality_evidence(x, depth: int = 20, rel_err: float | None = None) -> ContinuedFraction:
    """Continued fraction of ``x`` known to relative accuracy ``rel_err``.

    The expansion is run on an exact rational interval around ``x``.  It
    terminates when a narrow interval contains an integer (the data are
    consistent with a rational) and is exhausted when a wide one does
    (the input precision is used up).  A long expansion with no termination is evidence,
    not proof, of irrationality.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    lo, hi = _to_interval(x, rel_err)
    if lo <= 0:
        raise ValueError("x must be positive")
    pq: list[int] = []
    convs: list[tuple[int, int]] = []
    p0, q0, p1, q1 = 0, 1, 1, 0
    terminated = exhausted = False
    xv = (lo + hi) / 2
    for _ in range(depth + 1):
        a_lo, a_hi = math.floor(lo), math.floor(hi)
        if a_lo != a_hi:
            # the interval straddles the integer a_hi; a narrow interval means
            # the value is (numerically) that integer, a wide one that the
            # input precision is used up
            if hi - lo < 1e-3:
                a = a_hi
                pq.append(a)
                p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
                convs.append((p1, q1))
                terminated = True
            else:
                exhausted = True
            break
        a = a_lo
        pq.append(a)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        convs.append((p1, q1))
        f_lo, f_hi = lo - a, hi - a
        if f_lo <= 0:
            terminated = True
            break
        lo, hi = 1 / f_hi, 1 / f_lo
    residuals = tuple(float(abs(xv - Fraction(p, q)) * q * q) for p, q in convs)
    return ContinuedFraction(tuple(pq), tuple(convs), residuals, terminated, exhausted)


# --------------------------------------------------------------------------
# spectral recovery of the periods
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodRecovery:
    matched: dict
    peaks: tuple[float, ...]  # frequencies in cycles per unit tau
    peak_db: tuple[float, ...]  # power relative to the strongest peak
    resolution: float  # one frequency bin = 1/span
    peak_to_floor_db: float
    conclusive: bool
    spurious: tuple[float, ...]

    @property
    def all_recovered(self) -> bool:
        return self.conclusive and all(self.matched.values())


def periodogram(G: np.ndarray, dtau: float, window: str = "hann", pad: int = 32):
    """One-sided power spectrum of ``G - mean(G)`` (zero-padded by ``pad``)."""
    x = np.asarray(G, dtype=float)
    x = x - x.mean()
    w = signal.get_window(window, x.size)
    n = pad * x.size
    P = np.abs(np.fft.rfft(x * w, n)) ** 2
    return np.fft.rfftfreq(n, dtau), P


def period_recover(
    G: np.ndarray,
    dtau: float,
    candidates: Sequence[float],
    bins: float = 2.0,
    window: str = "hann",
    dynamic_db: float = 30.0,
    harmonics: int = 8,
) -> PeriodRecovery:
    """Match candidate periods to peaks of the periodogram of G.

    Peaks count if they rise 10 dB above the median floor and lie within
    ``dynamic_db`` of the strongest one.  Each candidate needs its own
    peak within ``bins`` frequency bins of ``1/T``.  Peaks away from every
    harmonic ``k/T_i`` are listed as spurious.
    """
    G = np.asarray(G, dtype=float)
    span = G.size * dtau
    if candidates and span < 5 * max(candidates) * (1 - 1e-9):
        raise ValueError(f"tau span {span:.4g} shorter than 5 max T = {5 * max(candidates):.4g}")
    res = 1 / span
    flat = np.std(G) <= 1e-12 * max(1.0, abs(np.mean(G)))
    if flat:
        return PeriodRecovery({T: False for T in candidates}, (), (), res, 0.0, True, ())
    f, P = periodogram(G, dtau, window)
    band = f >= 0.5 * res
    floor = float(np.median(P[band]))
    idx, _ = signal.find_peaks(P)
    idx = idx[f[idx] >= 0.5 * res]
    top = float(P[idx].max()) if idx.size else 0.0
    ptf = 10 * math.log10(top / floor) if floor > 0 and top > 0 else 0.0
    keep = idx[(P[idx] >= 10 * floor) & (P[idx] >= top * 10 ** (-dynamic_db / 10))]
    peaks = f[keep]
    db = 10 * np.log10(P[keep] / top) if keep.size else np.empty(0)
    # one peak per candidate, nearest first
    pairs = sorted(
        ((abs(pf - 1 / T), i, T) for T in candidates for i, pf in enumerate(peaks)), key=lambda z: z[0]
    )
    matched: dict = {T: False for T in candidates}
    used: set[int] = set()
    for dist, i, T in pairs:
        if matched[T] or i in used or dist > bins * res:
            continue
        matched[T] = True
        used.add(i)
    spurious = tuple(
        float(pf) for pf in peaks
        if not any(abs(pf - k / T) <= bins * res for T in candidates for k in range(1, harmonics + 1))
    )
    return PeriodRecovery(
        matched, tuple(float(p) for p in peaks), tuple(float(v) for v in db), res, ptf, ptf >= 10.0, spurious
    )


def grill_quasi(union: FractalSet, d: int, L: float = 1.0) -> FractalSet:
    """``A x [0,L]^d``; its normalised profile is ``L^d G`` to leading order."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return make_grill(union, d, L)
