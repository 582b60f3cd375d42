"""Line-oriented set descriptions.

A description is a list of ``key=value`` tokens, possibly spread over
several lines, with ``#`` comments::

    kind=cantor m=2 a=1/3
    kind=grill d=1 base.kind=cantor base.m=2 base.a=1/3
    kind=union component=left.set@0 component=right.set@2
    kind=quasi D=log(2)/log(3) moduli=2,3

Numeric values are arithmetic expressions over numbers, ``pi``, ``e`` and
``log``/``exp``/``sqrt``; nothing else is evaluated.
"""
from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .sets import (
    AString,
    DisjointUnion,
    FractalSet,
    FractalString,
    GeneralizedCantor,
    Grill,
    Scaled,
    SetError,
    Sphere,
    make_astring,
    make_cantor,
    make_fractal_string,
    make_grill,
    make_sphere,
    make_union,
    scale,
)

__all__ = ["SpecError", "SetSpec", "parse_spec", "load_spec", "evaluate_number", "describe", "default_delta"]


class SpecError(ValueError):
    def __init__(self, msg: str, line: int = 1, col: int = 1, source: str = "<spec>"):
        super().__init__(f"{source}:{line}:{col}: {msg}")
        self.line, self.col, self.source = line, col, source


@dataclass(frozen=True)
class _Token:
    key: str
    value: str
    line: int
    col: int  # column of the value


@dataclass(frozen=True)
class SetSpec:
    kind: str
    obj: FractalSet
    params: dict
    construction: object = None  # QuasiConstruction for kind=quasi
    text: str = field(default="", repr=False)


_FUNCS = {"log": math.log, "exp": math.exp, "sqrt": math.sqrt, "log2": math.log2, "log10": math.log10}
_CONSTS = {"pi": math.pi, "e": math.e}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}


def evaluate_number(text: str):
    """Evaluate a restricted arithmetic expression; exact while only rationals appear."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and type(node.value) in (int, float):
            return Fraction(node.value) if isinstance(node.value, int) else node.value
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            l, r = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Pow) and isinstance(l, Fraction) and isinstance(r, Fraction):
                if r.denominator == 1 and abs(r) <= 64:
                    return l ** int(r)
                return float(l) ** float(r)
            return _BINOPS[type(node.op)](l, r)
        if isinstance(node, ast.Name) and node.id in _CONSTS:
            return _CONSTS[node.id]
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords:
            return _FUNCS[node.func.id](float(ev(node.args[0])))
        raise ValueError(f"unsupported expression element {type(node).__name__}")

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except ZeroDivisionError:
        raise ValueError("division by zero") from None
    except SyntaxError as exc:
        raise ValueError(f"malformed number {text!r}") from exc


_TOKEN = re.compile(r"\S+")


def _tokenize(text: str, source: str) -> list[_Token]:
    out = []
    for ln, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0]
        for m in _TOKEN.finditer(body):
            tok = m.group()
            col = m.start() + 1
            if "=" not in tok:
                raise SpecError(f"expected key=value, got {tok!r}", ln, col, source)
            key, value = tok.split("=", 1)
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*", key):
                raise SpecError(f"bad key {key!r}", ln, col, source)
            if not value:
                raise SpecError(f"empty value for {key!r}", ln, col + len(key) + 1, source)
            out.append(_Token(key, value, ln, col + len(key) + 1))
    return out


class _Reader:
    """Typed access to the tokens of one (possibly nested) description."""

    def __init__(self, tokens: list[_Token], source: str, base_dir: Path, prefix: str = ""):
        self.tokens, self.source, self.base_dir, self.prefix = tokens, source, base_dir, prefix
        self.used: set[int] = set()

    def _find(self, key: str) -> list[int]:
        return [i for i, t in enumerate(self.tokens) if t.key == self.prefix + key]

    def err(self, msg: str, tok: _Token | None = None) -> SpecError:
        if tok is None:
            tok = self.tokens[0] if self.tokens else _Token("", "", 1, 1)
        return SpecError(msg, tok.line, tok.col, self.source)

    def raw(self, key: str, default=None, many: bool = False):
        idx = self._find(key)
        if not idx:
            if default is None and not many:
                raise self.err(f"missing {self.prefix + key}")
            return [] if many else default
        if len(idx) > 1 and not many:
            raise self.err(f"{self.prefix + key} given twice", self.tokens[idx[1]])
        self.used.update(idx)
        toks = [self.tokens[i] for i in idx]
        return toks if many else toks[0]

    def number(self, key: str, default=None):
        tok = self.raw(key, default)
        if not isinstance(tok, _Token):
            return tok
        try:
            return evaluate_number(tok.value)
        except ValueError as exc:
            raise self.err(str(exc), tok) from None

    def integer(self, key: str, default=None) -> int:
        tok = self.raw(key, default)
        if not isinstance(tok, _Token):
            return tok
        v = self.number(key)
        if not (isinstance(v, Fraction) and v.denominator == 1):
            raise self.err(f"{self.prefix + key} must be an integer", tok)
        return int(v)

    def numbers(self, key: str) -> list:
        tok = self.raw(key)
        out = []
        for part in tok.value.split(","):
            try:
                out.append(evaluate_number(part))
            except ValueError as exc:
                raise self.err(str(exc), tok) from None
        return out

    def sub(self, name: str) -> "_Reader":
        r = _Reader(self.tokens, self.source, self.base_dir, self.prefix + name + ".")
        r.used = self.used
        return r

    def check_unused(self) -> None:
        for i, t in enumerate(self.tokens):
            if i not in self.used:
                raise self.err(f"unknown key {t.key!r}", t)


def _build(r: _Reader) -> tuple[str, FractalSet, dict, object]:
    kind_tok = r.raw("kind")
    kind = kind_tok.value
    try:
        if kind == "cantor":
            m, a = r.integer("m"), r.number("a")
            return kind, make_cantor(m, float(a)), {"m": m, "a": float(a)}, None
        if kind == "astring":
            a = float(r.number("a"))
            return kind, make_astring(a), {"a": a}, None
        if kind == "string":
            if r._find("lengths"):
                l = [float(v) for v in r.numbers("lengths")]
                return kind, make_fractal_string(l), {"lengths": l}, None
            first, ratio = float(r.number("first")), float(r.number("ratio"))
            if not 0 < ratio < 1:
                raise r.err("ratio must lie in (0, 1)", r.raw("ratio"))
            obj = make_fractal_string(lambda j: first * ratio ** (j - 1))
            return kind, obj, {"first": first, "ratio": ratio}, None
        if kind == "sphere":
            N = r.integer("N")
            return kind, make_sphere(N), {"N": N}, None
        if kind == "grill":
            d, L = r.integer("d"), float(r.number("L", Fraction(1)))
            bk, base, bp, _ = _build(r.sub("base"))
            return kind, make_grill(base, d, L), {"d": d, "L": L, "base": {"kind": bk, **bp}}, None
        if kind == "scaled":
            lam = float(r.number("lam"))
            bk, base, bp, _ = _build(r.sub("base"))
            return kind, scale(base, lam), {"lam": lam, "base": {"kind": bk, **bp}}, None
        if kind == "union":
            comps, desc = [], []
            for tok in r.raw("component", many=True):
                path, sep, off = tok.value.rpartition("@")
                if not sep:
                    raise r.err("component must look like <file>@<offset>", tok)
                try:
                    offset = float(evaluate_number(off))
                except ValueError as exc:
                    raise r.err(str(exc), tok) from None
                sub = load_spec((r.base_dir / path))
                comps.append((sub.obj, offset))
                desc.append({"kind": sub.kind, **sub.params, "offset": offset})
            if not comps:
                raise r.err("union needs at least one component")
            return kind, make_union(comps), {"components": desc}, None
        if kind == "quasi":
            from .quasi import build_quasiperiodic

            D = float(r.number("D"))
            moduli = []
            for v in r.numbers("moduli"):
                if not (isinstance(v, Fraction) and v.denominator == 1):
                    raise r.err("moduli must be integers", r.raw("moduli"))
                moduli.append(int(v))
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                union, qc = build_quasiperiodic(D, moduli)
            return kind, union, {"D": D, "moduli": moduli}, qc
    except (SetError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise r.err(str(exc), kind_tok) from None
    raise r.err(f"unknown kind {kind!r}", kind_tok)


def parse_spec(text: str, source: str = "<spec>", base_dir: Path | str = ".") -> SetSpec:
    tokens = _tokenize(text, source)
    if not tokens:
        raise SpecError("empty description", 1, 1, source)
    r = _Reader(tokens, source, Path(base_dir))
    kind, obj, params, extra = _build(r)
    r.check_unused()
    return SetSpec(kind, obj, params, extra, text)


def load_spec(path: Path | str) -> SetSpec:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read {p}: {exc.strerror}", 1, 1, str(p)) from None
    return parse_spec(text, str(p), p.parent)


# --------------------------------------------------------------------------
# summaries
# --------------------------------------------------------------------------


def default_delta(obj: FractalSet) -> float:
    """A delta for which the closed forms of the family apply."""
    if isinstance(obj, GeneralizedCantor):
        return (1 - obj.m * obj.a) / (2 * (obj.m - 1))
    if isinstance(obj, AString):
        return (1 - 2.0 ** (-obj.a)) / 2
    if isinstance(obj, FractalString):
        return max(obj.lengths) / 2
    if isinstance(obj, Sphere):
        return 0.5
    if isinstance(obj, Grill):
        return default_delta(obj.base)
    if isinstance(obj, Scaled):
        return obj.lam * default_delta(obj.base)
    if isinstance(obj, DisjointUnion):
        d = max(default_delta(s) for s, _ in obj.components)
        return min(d, 0.999 * obj.additivity_threshold)
    raise TypeError(f"no default delta for {obj.kind}")


def describe(spec: SetSpec, n_levels: int = 5) -> dict:
    obj = spec.obj
    out = {
        "kind": spec.kind,
        "params": spec.params,
        "ambient_dim": obj.ambient_dim,
        "D_hint": obj.dim,
        "hull": [list(iv) for iv in obj.hull],
    }
    gaps = obj.gaps
    if gaps is not None:
        out["gap_table_head"] = [[g, c] for g, c in gaps.levels(n_levels)]
    if spec.construction is not None:
        out["construction"] = spec.construction.record()
    return out
