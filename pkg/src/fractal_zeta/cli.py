"""Command-line entry point ``fractal-zeta``.

Exit codes: 0 success, 1 a check failed, 2 usage or parse error,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .merom import (
    CheckResult,
    MeromorphicZeta,
    cantor_model,
    cantor_tube_model,
    distance_form,
    grill_shift,
    residue_content_report,
    residue_fit,
    sphere_model,
    string_dictionary,
    tube_form,
)
from .quadrature import DivergenceError
from .quasi import (
    build_quasiperiodic,
    irrationality_evidence,
    log_ratio,
    period_recover,
    periodogram,
    rational_rank,
    union_model,
)
from .sets import AString, FractalSet, FractalString, GeneralizedCantor, Grill, Scaled, SetError, Sphere
from .setspec import SetSpec, SpecError, default_delta, describe, evaluate_number, load_spec, parse_spec
from .tubes import (
    QuadratureError,
    TubeModel,
    ball_volume,
    log_profile,
    minkowski_contents_estimate,
    tube_inner_1d,
    tube_model,
)
from .zeta import (
    Elementary,
    ReciprocalPolynomial,
    TensorProduct,
    ZetaEvalConfig,
    abscissa_probe,
    distance_zeta,
    distance_zeta_direct_1d,
    dti_eval,
    scaling_residual,
    tube_zeta,
)

SCHEMA = "fractal-zeta/1"
SUITES = ("functional-eq", "scaling", "residue-content", "closed-form", "quasi", "dti")
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# documents and rendering
# --------------------------------------------------------------------------


@dataclass
class Table:
    title: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)


@dataclass
class Document:
    command: str
    meta: dict = field(default_factory=dict)
    tables: list[Table] = field(default_factory=list)
    status: int = EXIT_OK

    def table(self, title: str, columns: Sequence[str]) -> Table:
        t = Table(title, list(columns))
        self.tables.append(t)
        return t


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        if v.imag == 0:
            return _fmt(v.real)
        return f"{v.real:.12g}{v.imag:+.12g}j"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt(x)}" for k, x in v.items()) + "}"
    if v is None:
        return "-"
    return str(v)


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return {"re": _jsonable(v.real), "im": _jsonable(v.imag)}
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render(doc: Document, fmt: str) -> str:
    if fmt == "json":
        payload = {
            "schema": SCHEMA,
            "version": __version__,
            "command": doc.command,
            "meta": _jsonable(doc.meta),
            "tables": [
                {"title": t.title, "columns": t.columns, "rows": _jsonable(t.rows)} for t in doc.tables
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        if len(doc.tables) == 1:
            t = doc.tables[0]
            w.writerow(t.columns)
            w.writerows([[_fmt(x) for x in r] for r in t.rows])
        else:
            w.writerow(["table", "key", "value"])
            for k, v in doc.meta.items():
                w.writerow(["meta", k, _fmt(v)])
            for t in doc.tables:
                for r in t.rows:
                    w.writerow([t.title] + [_fmt(x) for x in r])
        return buf.getvalue()
    lines = [f"# {doc.command}"]
    width = max((len(k) for k in doc.meta), default=0)
    lines += [f"{k.ljust(width)} : {_fmt(v)}" for k, v in doc.meta.items()]
    for t in doc.tables:
        cells = [t.columns] + [[_fmt(x) for x in r] for r in t.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(t.columns))]
        lines += ["", f"## {t.title}"]
        for j, r in enumerate(cells):
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
            if j == 0:
                lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("FRACTAL_ZETA_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn: Callable, items: Sequence) -> list:
    """Order-preserving map, threaded up to ``FRACTAL_ZETA_THREADS`` workers."""
    n = min(_threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def parse_complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"not a complex number: {text!r}") from None


def _pair(text: str, cast=float) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {text!r}")
    try:
        return cast(parts[0]), cast(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad pair {text!r}") from None


def closed_model(obj: FractalSet, delta: float, spec: SetSpec | None = None) -> MeromorphicZeta | None:
    """Closed-form distance zeta model, when the family has one."""
    if spec is not None and spec.construction is not None:
        return union_model(spec.construction, delta)
    if isinstance(obj, GeneralizedCantor):
        return cantor_model(obj.m, obj.a, delta)
    if isinstance(obj, AString):
        return string_dictionary(obj, delta)
    if isinstance(obj, FractalString) and (obj.tail == 0 or obj.ratio is not None):
        return string_dictionary(obj, delta)
    if isinstance(obj, Sphere):
        return distance_form(sphere_model(obj.N, delta), float(tube_model(obj).fn(delta)), delta)
    if isinstance(obj, Grill) and obj.L == 1:
        base = closed_model(obj.base, delta)
        return None if base is None else grill_shift(base, obj.d)
    return None


def closed_tube_model(obj: FractalSet, delta: float, spec: SetSpec | None = None) -> MeromorphicZeta | None:
    if isinstance(obj, GeneralizedCantor):
        return cantor_tube_model(obj.m, obj.a, delta)
    if isinstance(obj, Sphere):
        return sphere_model(obj.N, delta)
    if isinstance(obj, Grill):
        return None
    m = closed_model(obj, delta, spec)
    return None if m is None else tube_form(m, float(tube_model(obj).fn(delta)), delta)


def sphere_direct(N: int, s: complex, delta: float) -> complex:
    """``int_{A_delta} d(x,A)^(s-N) dx`` for the unit sphere, in radial coordinates."""
    s = complex(s)
    area = N * ball_volume(N)
    out = 0j
    for k in range(N):
        if k % 2 == 0:
            e = s - N + k + 1
            out += 2 * math.comb(N - 1, k) * complex(delta) ** e / e
    return area * out


def _periods(obj: FractalSet, spec: SetSpec | None) -> tuple[float, ...]:
    if spec is not None and spec.construction is not None:
        return tuple(spec.construction.periods)
    if isinstance(obj, GeneralizedCantor):
        return (obj.period,)
    if isinstance(obj, (Scaled, Grill)):
        return _periods(obj.base, None)
    return ()


def _test_points(D: float) -> list[complex]:
    pts = [0.8, 0.9, 0.7 + 2j]
    if all(p.real > D + 0.02 for p in map(complex, pts)):
        return [complex(p) for p in pts]
    return [complex(D + 0.17), complex(D + 0.27), complex(D + 0.07, 2)]


# --------------------------------------------------------------------------
# check suites
# --------------------------------------------------------------------------


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(b))


def _tolcheck(name: str, measured: float, tol: float, note: str = "") -> CheckResult:
    return CheckResult(name, "pass" if measured < tol else "fail", measured, tol, tol - measured, note)


def suite_functional_eq(spec: SetSpec, delta: float, tol: float) -> list[CheckResult]:
    obj = spec.obj
    cfg = ZetaEvalConfig(delta)
    out = []
    if isinstance(obj, Sphere):
        for s in _test_points(obj.dim):
            r = _rel(sphere_direct(obj.N, s, delta), distance_zeta(obj, s, cfg))
            out.append(_tolcheck(f"functional-eq s={_fmt(s)}", r, tol, "radial integral vs tube identity"))
        return out
    if obj.ambient_dim != 1 or obj.gaps is None:
        return [CheckResult("functional-eq", "skip", math.nan, tol, math.nan, "needs a 1-D set or a sphere")]
    for s in _test_points(obj.dim):
        r = _rel(distance_zeta_direct_1d(obj, s, cfg), distance_zeta(obj, s, cfg))
        out.append(_tolcheck(f"functional-eq s={_fmt(s)}", r, tol, "gap integral vs tube identity"))
    return out


def suite_scaling(spec: SetSpec, delta: float, tol: float) -> list[CheckResult]:
    obj = spec.obj
    s = 0.8 if obj.dim < 0.75 else obj.dim + 0.3
    cfg = ZetaEvalConfig(delta)
    out = []
    for lam in (2.0, 3.0, 0.5):
        ref = abs(distance_zeta(obj, s, cfg))
        r = scaling_residual(obj, lam, s, cfg) / max(1.0, abs(lam**s) * ref)
        out.append(_tolcheck(f"scaling lambda={lam:g} s={s:g}", r, tol, "zeta(lam A) = lam^s zeta(A)"))
    return out


def _content_window(obj: FractalSet, tube: TubeModel) -> tuple[float, float]:
    hi = min(1e-5, 0.5 * tube.validity[1])
    if isinstance(obj, AString):
        hi = 1e-10
    return hi / 100, hi


def suite_residue_content(spec: SetSpec, delta: float, tol: float) -> list[CheckResult]:
    obj = spec.obj
    model = closed_model(obj, delta, spec)
    if model is None or isinstance(obj, Grill):
        return [CheckResult("residue-content", "skip", math.nan, math.nan, math.nan, "no closed form")]
    partner = None
    if isinstance(obj, GeneralizedCantor):
        partner = cantor_tube_model(obj.m, obj.a, delta)
    if isinstance(obj, Sphere):
        model = sphere_model(obj.N, delta)
    tube = tube_model(obj)
    lo, hi = _content_window(obj, tube)
    est = minkowski_contents_estimate(tube, model.D, lo, hi, 512)
    rep = residue_content_report(model, est, partner)
    out = list(rep.checks)
    # numeric residue against the closed form
    cfg = ZetaEvalConfig(delta)
    f = (lambda s: distance_zeta(tube, s, cfg)) if model.kind == "distance" else (lambda s: tube_zeta(tube, s, cfg))
    fit = residue_fit(f, model.D, radius=0.05 if model.D < obj.ambient_dim else 0.2, levels=6)
    exact = model.residue(model.D)
    out.append(_tolcheck("numeric residue", _rel(fit.value, exact), 1e-3, "Richardson fit vs closed-form residue"))
    return out


def suite_closed_form(spec: SetSpec, delta: float, tol: float) -> list[CheckResult]:
    obj = spec.obj
    model = closed_model(obj, delta, spec)
    if model is None or model.exact_above > -math.inf:
        return [CheckResult("closed-form", "skip", math.nan, tol, math.nan, "no exact closed form")]
    cfg = ZetaEvalConfig(delta)
    D = obj.dim
    pts = [complex(D + 0.1), complex(D + 0.3, 1.0), complex(D + 0.2, -3.0)]
    vals = pmap(lambda s: distance_zeta(obj, s, cfg), pts)
    return [
        _tolcheck(f"closed-form s={_fmt(s)}", _rel(v, model(s)), tol, "numeric integral vs continuation")
        for s, v in zip(pts, vals)
    ]


def suite_quasi(spec: SetSpec, delta: float, tol: float, samples: int = 2048) -> list[CheckResult]:
    qc = spec.construction
    if qc is None:
        return [CheckResult("quasi", "skip", math.nan, math.nan, math.nan, "not a quasiperiodic construction")]
    out = [CheckResult(
        "certificate", "pass" if qc.certified else "fail", qc.rank, qc.n, qc.rank - qc.n,
        "rank over Q of the exponent matrix",
    )]
    for i in range(qc.n):
        for j in range(i + 1, qc.n):
            rk = rational_rank([qc.exponent_matrix[i], qc.exponent_matrix[j]])
            cf = irrationality_evidence(log_ratio(qc.moduli[i], qc.moduli[j]), 20)
            ok = rk == 2 and not cf.terminated
            out.append(CheckResult(
                f"ratio T{i + 1}/T{j + 1}", "pass" if ok else "fail", cf.depth, 20, rk - 2,
                f"pair rank {rk}; continued fraction {'terminates' if cf.terminated else 'does not terminate'}",
            ))
    G, dtau = _profile_samples(spec.obj, qc.D, qc.periods, samples)
    rec = period_recover(G, dtau, qc.periods)
    for T, ok in rec.matched.items():
        out.append(CheckResult(f"period {T:.6g}", "pass" if ok else "fail", float(ok), 1.0, 0.0, "spectral peak within 2 bins"))
    out.append(CheckResult(
        "spurious peaks", "pass" if not rec.spurious else "fail", len(rec.spurious), 0, -len(rec.spurious),
        "peaks away from every harmonic",
    ))
    return out


def suite_dti(spec: SetSpec | None, delta: float, tol: float) -> list[CheckResult]:
    out = [_tolcheck("elementary a=0.5 s=2", abs(dti_eval(Elementary(0.5), 2.0) - 2 / 3), tol)]
    tp = TensorProduct(Elementary(0.5), Elementary(0.2 + 1j))
    for s in (2.0, 1.5 + 1j):
        prod = dti_eval(Elementary(0.5), s) * dti_eval(Elementary(0.2 + 1j), s)
        out.append(_tolcheck(f"tensor product s={_fmt(s)}", abs(dti_eval(tp, s) - prod), tol))
    rp = ReciprocalPolynomial((0.0, 1.0))
    pts = [1.5 + 0.5 * k + 1j * (k - 4) for k in range(10)]
    err = max(abs(dti_eval(rp, s) - 1 / (s * (s - 1))) for s in pts)
    out.append(_tolcheck("reciprocal polynomial, 10 points", err, tol))
    br = abscissa_probe(lambda x: dti_eval(rp, x), np.linspace(3.0, 0.0, 31), width=0.01)
    miss = max(br.lo - 1.0, 1.0 - br.hi, 0.0) if br.hi - br.lo < 0.05 else br.hi - br.lo
    out.append(_tolcheck("abscissa bracket", miss, 0.05, f"[{br.lo:.4f}, {br.hi:.4f}] vs 1"))
    return out


def run_suite(name: str, spec: SetSpec | None, delta: float | None, tol: float) -> list[CheckResult]:
    if name not in SUITES:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if name == "dti":
        return suite_dti(spec, delta or 0.0, tol)
    if spec is None:
        raise UsageError(f"suite {name} needs --spec or --spec-file")
    fn = {
        "functional-eq": suite_functional_eq,
        "scaling": suite_scaling,
        "residue-content": suite_residue_content,
        "closed-form": suite_closed_form,
        "quasi": suite_quasi,
    }[name]
    return fn(spec, delta, tol)


def _profile_samples(obj: FractalSet, D: float, periods: Sequence[float], n: int):
    tube = tube_model(obj)
    # start well inside the asymptotic regime so lower-order terms have decayed
    tau0 = math.log(1 / min(1e-4, 0.5 * tube.validity[1]))
    span = 5 * max(periods) if periods else 20.0
    dtau = span / n
    tau = tau0 + dtau * np.arange(n)
    return log_profile(tube, D, tau), dtau


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _get_spec(args) -> SetSpec | None:
    if getattr(args, "spec_file", None):
        return load_spec(args.spec_file)
    if getattr(args, "spec", None):
        return parse_spec(args.spec, "<spec>")
    return None


def _need_spec(args) -> SetSpec:
    spec = _get_spec(args)
    if spec is None:
        raise UsageError("give a set with --spec or --spec-file")
    return spec


def _delta(args, spec: SetSpec) -> float:
    return args.delta if args.delta is not None else default_delta(spec.obj)


def cmd_set(args) -> Document:
    spec = _need_spec(args)
    doc = Document("set")
    info = describe(spec)
    head = info.pop("gap_table_head", None)
    doc.meta.update(info)
    doc.meta["default_delta"] = default_delta(spec.obj)
    if head is not None:
        t = doc.table("gap table head", ["level", "gap_length", "count"])
        t.rows = [[k, g, c] for k, (g, c) in enumerate(head)]
    return doc


def cmd_tube(args) -> Document:
    spec = _need_spec(args)
    tube = tube_model(spec.obj)
    if args.t:
        ts = np.array([float(evaluate_number(x)) for x in args.t])
    else:
        lo, hi = args.t_range
        ts = np.geomspace(lo, hi, args.count)
    D = spec.obj.dim
    doc = Document("tube", {"kind": spec.kind, "source": tube.source, "N": tube.N, "D_hint": D,
                            "validity": list(tube.validity)})
    vals = np.asarray(tube(ts), dtype=float)
    t = doc.table("tube function", ["t", "volume", "volume/t^(N-D)"])
    t.rows = [[float(a), float(b), float(b / a ** (tube.N - D))] for a, b in zip(ts, vals)]
    if args.contents:
        lo = float(ts.min())
        est = minkowski_contents_estimate(tube, D, lo, max(float(ts.max()), 10 * lo), 512)
        doc.meta.update({"content_lower": est.lower, "content_upper": est.upper, "content_spread": est.residual_spread})
    return doc


def _s_points(args) -> list[complex]:
    if args.s:
        return [parse_complex(x) for x in args.s]
    if args.re_range is None:
        raise UsageError("give --s or --re-range/--im-range/--counts")
    (r0, r1), (i0, i1) = args.re_range, args.im_range or (0.0, 0.0)
    nr, ni = args.counts
    if nr < 1 or ni < 1:
        raise UsageError("grid counts must be >= 1")
    return [complex(x, y) for x in np.linspace(r0, r1, nr) for y in np.linspace(i0, i1, ni)]


def cmd_zeta(args) -> Document:
    spec = _need_spec(args)
    obj = spec.obj
    delta = _delta(args, spec)
    cfg = ZetaEvalConfig(delta, args.quad_tol)
    pts = _s_points(args)
    tube = tube_model(obj)
    if args.kind == "tube":
        model = closed_tube_model(obj, delta, spec)
        fn = lambda s: tube_zeta(tube, s, cfg)  # noqa: E731
    else:
        model = closed_model(obj, delta, spec)
        fn = lambda s: distance_zeta(tube, s, cfg)  # noqa: E731
    exact = model is not None and model.exact_above == -math.inf
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        vals = pmap(fn, pts)
    doc = Document("zeta", {"kind": spec.kind, "zeta": args.kind, "delta": delta, "closed_form": exact})
    t = doc.table(f"{args.kind} zeta", ["s", "numeric", "closed_form", "rel_diff"])
    for s, v in zip(pts, vals):
        c = model(s) if exact else None
        t.rows.append([s, v, c, None if c is None else _rel(v, c)])
    return doc


def _dims_doc(doc: Document, model: MeromorphicZeta, height: float) -> None:
    dims = model.dims
    doc.meta["D"] = model.D
    doc.meta["lattices"] = [{"omega0": l.omega0, "period": l.p, "mult": l.mult} for l in dims.lattices]
    doc.meta["removable"] = list(model.removable)
    if model.exact_above > -math.inf:
        doc.meta["poles_exact_above_Re"] = model.exact_above
    t = doc.table("poles", ["re", "im", "mult", "residue"])
    for w, mult in dims.poles(height):
        res = model.residue(w) if w.real > model.exact_above + 1e-9 else None
        t.rows.append([w.real, w.imag, mult, res])


def cmd_dims(args) -> Document:
    spec = _need_spec(args)
    delta = _delta(args, spec)
    model = closed_model(spec.obj, delta, spec)
    if model is None:
        raise UsageError(f"no closed-form continuation for kind={spec.kind}")
    doc = Document("dims", {"kind": spec.kind, "delta": delta})
    _dims_doc(doc, model, args.height)
    return doc


def cmd_check(args) -> Document:
    spec = _get_spec(args)
    delta = None if spec is None else _delta(args, spec)
    doc = Document("check", {"suite": args.suite})
    if spec is not None:
        doc.meta["kind"] = spec.kind
        doc.meta["delta"] = delta
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        results = run_suite(args.suite, spec, delta, args.tol)
    t = doc.table("checks", ["check", "status", "measured", "expected", "margin", "note"])
    t.rows = [[c.name, c.status, c.measured, c.expected, c.margin, c.note] for c in results]
    ok = all(c.passed for c in results)
    doc.meta["result"] = "pass" if ok else "fail"
    doc.status = EXIT_OK if ok else EXIT_FAIL
    return doc


def cmd_quasi(args) -> Document:
    moduli = [int(x) for x in args.moduli.split(",")]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        union, qc = build_quasiperiodic(args.D, moduli)
    if args.action == "build":
        doc = Document("quasi build", qc.record())
        t = doc.table("period ratios", ["i", "j", "pair_rank", "cf_depth", "cf_terminated", "max_partial_quotient"])
        for i in range(qc.n):
            for j in range(i + 1, qc.n):
                cf = irrationality_evidence(log_ratio(moduli[i], moduli[j]), args.depth)
                rk = rational_rank([qc.exponent_matrix[i], qc.exponent_matrix[j]])
                t.rows.append([i + 1, j + 1, rk, cf.depth, cf.terminated, cf.max_partial_quotient])
        return doc
    G, dtau = _profile_samples(union, qc.D, qc.periods, args.samples)
    f, P = periodogram(G, dtau)
    rec = period_recover(G, dtau, qc.periods)
    doc = Document("quasi spectrum", {
        "D": qc.D, "moduli": moduli, "T": list(qc.periods), "resolution": rec.resolution,
        "matched": [rec.matched[T] for T in qc.periods], "peaks": list(rec.peaks),
    })
    t = doc.table("spectrum", ["frequency", "power"])
    keep = f <= args.max_frequency
    t.rows = [[float(a), float(b)] for a, b in zip(f[keep], P[keep])]
    return doc


def _astring_constants(obj: AString) -> tuple[Table, dict]:
    D, a = obj.dim, obj.a
    full_tube = tube_model(obj)
    inner = TubeModel("gapsum", lambda t: tube_inner_1d(obj, t), 1, D)
    lo, hi = 1e-12, 1e-10
    full = minkowski_contents_estimate(full_tube, D, lo, hi, 512)
    inn = minkowski_contents_estimate(inner, D, lo, hi, 512)
    refs = {
        "2^(1-D) a^D/(1-D)": 2 ** (1 - D) * a**D / (1 - D),
        "2^(1-D) a^D/(D(1-D))": 2 ** (1 - D) * a**D / (D * (1 - D)),
    }
    t = Table("a-string Minkowski constants", ["neighbourhood", "lower", "upper", "matches", "rel_err"])
    verdict = {}
    for name, est in (("full", full), ("inner", inn)):
        v = 0.5 * (est.lower + est.upper)
        best = min(refs, key=lambda k: abs(v - refs[k]) / refs[k])
        rel = abs(v - refs[best]) / refs[best]
        match = best if rel < 0.01 else "none"
        verdict[name] = match
        t.rows.append([name, est.lower, est.upper, match, rel])
    return t, {"references": refs, "matched": verdict}


def cmd_report(args) -> Document:
    spec = _need_spec(args)
    obj = spec.obj
    delta = _delta(args, spec)
    doc = Document("report")
    info = describe(spec)
    info.pop("gap_table_head", None)
    doc.meta.update(info)
    doc.meta["delta"] = delta
    doc.meta["seed"] = args.seed
    model = closed_model(obj, delta, spec)
    if model is not None:
        sub = Document("dims")
        _dims_doc(sub, model, args.height)
        doc.meta.update({f"dims_{k}": v for k, v in sub.meta.items()})
        doc.tables += sub.tables
        per = [l.p for l in model.principal().lattices]
        if per:
            doc.meta["oscillatory_periods"] = per
    tube = tube_model(obj)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if obj.ambient_dim == 1 or isinstance(obj, Sphere):
            lo, hi = _content_window(obj, tube)
            est = minkowski_contents_estimate(tube, obj.dim, lo, hi, 512)
            doc.meta.update({"content_lower": est.lower, "content_upper": est.upper, "content_spread": est.residual_spread})
        if isinstance(obj, AString):
            t, info = _astring_constants(obj)
            doc.tables.append(t)
            doc.meta["astring_constants"] = info
        periods = _periods(obj, spec)
        n = 512 if tube.source == "sliced" else 2048
        G, dtau = _profile_samples(obj, obj.dim, periods, n)
        if np.std(G) <= 1e-12 * abs(np.mean(G)):
            doc.meta["profile"] = "constant"
        elif not periods:
            doc.meta["profile"] = "no candidate periods"
        else:
            rec = period_recover(G, dtau, periods)
            t = doc.table("profile spectrum peaks", ["frequency", "period", "dB"])
            t.rows = [[f, 1 / f, db] for f, db in list(zip(rec.peaks, rec.peak_db))[:8]]
            doc.meta["periods_recovered"] = [rec.matched[T] for T in periods]
        summary = doc.table("checks", ["suite", "check", "status", "measured", "margin"])
        ok = True
        suites = ["functional-eq", "scaling", "residue-content", "closed-form"]
        if spec.construction is not None:
            suites.append("quasi")
        if isinstance(obj, Grill):
            suites = ["closed-form"]
        for name in suites:
            for c in run_suite(name, spec, delta, args.tol):
                summary.rows.append([name, c.name, c.status, c.measured, c.margin])
                ok &= c.passed
    doc.meta["result"] = "pass" if ok else "fail"
    doc.status = EXIT_OK if ok else EXIT_FAIL
    return doc


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _number(text: str) -> float:
    try:
        return float(evaluate_number(text))
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _add_common(p: argparse.ArgumentParser, spec: bool = True) -> None:
    if spec:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--spec", help="inline set description, e.g. 'kind=cantor m=2 a=1/3'")
        g.add_argument("--spec-file", help="file holding a set description")
        p.add_argument("--delta", type=_number, default=None, help="neighbourhood radius (default: family-specific)")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--output", default=None, help="write here instead of stdout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-8)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fractal-zeta", description="Distance and tube zeta functions of fractal sets.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("set", help="normalised description of a set")
    _add_common(s)

    s = sub.add_parser("tube", help="tube function samples")
    _add_common(s)
    s.add_argument("--t", action="append", help="radius, e.g. 1e-3 or 1/12 (repeatable)")
    s.add_argument("--t-range", type=_pair, default=(1e-6, 1e-2))
    s.add_argument("--count", type=int, default=9)
    s.add_argument("--contents", action="store_true", help="also estimate Minkowski contents")

    s = sub.add_parser("zeta", help="evaluate a zeta function")
    _add_common(s)
    s.add_argument("--s", action="append", help="complex point such as 0.8 or 0.7+2j (repeatable)")
    s.add_argument("--re-range", type=_pair)
    s.add_argument("--im-range", type=_pair)
    s.add_argument("--counts", type=lambda x: _pair(x, int), default=(1, 1))
    s.add_argument("--kind", choices=("distance", "tube"), default="distance")
    s.add_argument("--quad-tol", type=float, default=1e-12)

    s = sub.add_parser("dims", help="complex dimensions and residues")
    _add_common(s)
    s.add_argument("--height", type=float, default=20.0)

    s = sub.add_parser("check", help="run a check suite")
    _add_common(s)
    s.add_argument("--suite", required=True, choices=SUITES)

    s = sub.add_parser("quasi", help="quasiperiodic constructions")
    s.add_argument("action", choices=("build", "spectrum"))
    s.add_argument("--D", type=_number, required=True, help="dimension, e.g. 0.5 or log(2)/log(3)")
    s.add_argument("--moduli", required=True, help="comma-separated integers")
    s.add_argument("--depth", type=int, default=20)
    s.add_argument("--samples", type=int, default=2048)
    s.add_argument("--max-frequency", type=float, default=3.0)
    _add_common(s, spec=False)

    s = sub.add_parser("report", help="full deterministic report")
    _add_common(s)
    s.add_argument("--height", type=float, default=20.0)
    return p


COMMANDS = {
    "set": cmd_set,
    "tube": cmd_tube,
    "zeta": cmd_zeta,
    "dims": cmd_dims,
    "check": cmd_check,
    "quasi": cmd_quasi,
    "report": cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = COMMANDS[args.command](args)
    except (SpecError, UsageError, SetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DivergenceError, QuadratureError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(doc, args.format)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)
    return doc.status


if __name__ == "__main__":
    sys.exit(main())
