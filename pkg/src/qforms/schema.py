"""JSON input files: payload schemas and job options.

Payloads are validated eagerly.  Malformed input raises :class:`ParseError`
with a JSON-path position; input that parses but violates a mathematical
invariant (Jacobi, action axioms, groupoid axioms) raises the matching
:class:`ValidationError`.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

from .algebroids import StructureData, make_section, require_jacobi
from .derivations import Derivation
from .errors import ParseError
from .gca import Element, GeneratorTable
from .models import check_action
from .simplicial import FiniteGroupoid, PolyActionGroupoid, slot_name

KINDS = ("check", "betti", "basic", "mqk", "double", "ginzburg", "vanest", "cartan-suite")
PAYLOADS = ("lie_algebra", "algebroid", "action", "bialgebra", "groupoid", "ginzburg", "fields")
COMPLEXES = ("ce", "weil", "brst", "cartan")


@dataclass
class JobSpec:
    kind: str | None
    payload_kind: str
    payload: Any
    window: tuple[int, int] | None = None
    weight: tuple[dict, int] | int | None = None
    format: str = "table"
    complex: str | None = None
    options: dict = field(default_factory=dict)


# scalars and polynomials


def parse_scalar(v, pos: str) -> Fraction:
    if isinstance(v, bool):
        raise ParseError("expected a number", pos)
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not a rational number: {v!r}", pos) from None
    if isinstance(v, float):
        raise ParseError("floats are not exact; write rationals as strings like \"1/2\"", pos)
    raise ParseError("expected a number", pos)


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z][A-Za-z0-9_']*)|(\^)|([-+*()]))")


def _tokens(text: str, pos: str) -> list[tuple[str, str]]:
    out = []
    k = 0
    text = text.rstrip()
    while k < len(text):
        m = _TOKEN.match(text, k)
        if not m or m.end() == k:
            raise ParseError(f"unexpected character {text[k:].strip()[:1]!r} in {text!r}", pos)
        num, name, caret, op = m.groups()
        if num:
            out.append(("num", num))
        elif name:
            out.append(("name", name))
        elif caret:
            out.append(("op", "^"))
        else:
            out.append(("op", op))
        k = m.end()
    return out


class _PolyParser:
    """Sums of products of rationals and generator powers, with parentheses."""

    def __init__(self, text: str, table: GeneratorTable, pos: str):
        self.toks = _tokens(text, pos)
        self.k = 0
        self.table = table
        self.pos = pos
        self.text = text

    def peek(self):
        return self.toks[self.k] if self.k < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.k += 1
        return tok

    def fail(self, msg: str):
        raise ParseError(f"{msg} in {self.text!r}", self.pos)

    def parse(self) -> Element:
        if not self.toks:
            self.fail("empty polynomial")
        out = self.sum()
        if self.k != len(self.toks):
            self.fail(f"unexpected {self.peek()[1]!r}")
        return out

    def sum(self) -> Element:
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        out = self.product() * sign
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            term = self.product()
            out = out + term if op == "+" else out - term
        return out

    def product(self) -> Element:
        out = self.power()
        while self.peek() == ("op", "*"):
            self.take()
            out = out * self.power()
        return out

    def power(self) -> Element:
        kind, val = self.take()
        if kind == "num":
            base = self.table.scalar(Fraction(val))
        elif kind == "name":
            if val not in self.table:
                self.fail(f"unknown generator {val!r}")
            base = self.table.gen(val)
        elif (kind, val) == ("op", "("):
            base = self.sum()
            if self.take() != ("op", ")"):
                self.fail("missing ')'")
        else:
            self.fail(f"unexpected {val!r}")
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num" or "/" in val:
                self.fail("exponents are non-negative integers")
            base = base ** int(val)
        return base


def parse_poly(v, table: GeneratorTable, pos: str) -> Element:
    """A polynomial: a number, an expression string, or ``{exponent vector: coefficient}``.

    Exponent vectors are comma-separated and follow the generator order of
    ``table``.
    """
    if isinstance(v, Mapping):
        out = table.zero()
        n = len(table)
        for key, c in v.items():
            parts = [p for p in str(key).replace(" ", "").split(",") if p != ""]
            if len(parts) != n or not all(p.isdigit() for p in parts):
                raise ParseError(f"exponent vector {key!r} needs {n} non-negative integers", pos)
            term = table.scalar(parse_scalar(c, f"{pos}[{key!r}]"))
            for name, e in zip(table.names, parts):
                if int(e):
                    term = term * table.gen(name) ** int(e)
            out = out + term
        return out
    if isinstance(v, str) and not _is_rational(v):
        return _PolyParser(v, table, pos).parse()
    return table.scalar(parse_scalar(v, pos))


def _is_rational(text: str) -> bool:
    try:
        Fraction(text.strip())
        return True
    except (ValueError, ZeroDivisionError):
        return False


# helpers


def _get(obj: Mapping, key: str, pos: str, kind=None, default=...):
    if not isinstance(obj, Mapping):
        raise ParseError("expected an object", pos)
    if key not in obj:
        if default is ...:
            raise ParseError(f"missing field {key!r}", pos)
        return default
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise ParseError(f"field {key!r} should be {names}", f"{pos}.{key}")
    return v


def _int(v, pos: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError("expected an integer", pos)
    return v


def _name_list(v, pos: str) -> list[tuple[str, int]]:
    """``["x", ...]`` or ``[{"name": "x", "degree": 0}, ...]``."""
    if not isinstance(v, list):
        raise ParseError("expected a list", pos)
    out = []
    for k, item in enumerate(v):
        p = f"{pos}[{k}]"
        if isinstance(item, str):
            out.append((item, 0))
        else:
            name = _get(item, "name", p, str)
            out.append((name, _int(_get(item, "degree", p, default=0), f"{p}.degree")))
    names = [n for n, _ in out]
    if len(set(names)) != len(names):
        raise ParseError("duplicate names", pos)
    for n in names:
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", n):
            raise ParseError(f"bad generator name {n!r}", pos)
    return out


def _index(key, names: Sequence[str], pos: str) -> int:
    if isinstance(key, int) and not isinstance(key, bool):
        if 0 <= key < len(names):
            return key
        raise ParseError(f"index {key} out of range", pos)
    if isinstance(key, str):
        if key in names:
            return names.index(key)
        if key.isdigit() and int(key) < len(names):
            return int(key)
    raise ParseError(f"unknown basis element {key!r}", pos)


# payloads


def parse_lie_algebra(obj, pos: str = "$.lie_algebra") -> StructureData:
    basis = _name_list(_get(obj, "basis", pos), f"{pos}.basis")
    names = [n for n, _ in basis]
    degrees = [d for _, d in basis]
    brackets: dict = {}
    for k, br in enumerate(_get(obj, "brackets", pos, list, default=[])):
        p = f"{pos}.brackets[{k}]"
        i = _index(_get(br, "i", p), names, f"{p}.i")
        j = _index(_get(br, "j", p), names, f"{p}.j")
        coeffs = _get(br, "coeffs", p, Mapping)
        entry = brackets.setdefault((i, j), {})
        for key, v in coeffs.items():
            e = _index(key, names, f"{p}.coeffs")
            entry[e] = entry.get(e, 0) + parse_scalar(v, f"{p}.coeffs.{key}")
    S = _structure(lambda: StructureData.lie_algebra(brackets, len(names), names, degrees), pos)
    require_jacobi(S)
    return S


def _structure(build, pos: str) -> StructureData:
    try:
        return build()
    except (ValueError, KeyError) as exc:
        raise ParseError(str(exc), pos) from None


def parse_algebroid(obj, pos: str = "$.algebroid") -> StructureData:
    if isinstance(obj, Mapping) and "tangent" in obj:
        base = GeneratorTable(_name_list(obj["tangent"], f"{pos}.tangent"))
        S = StructureData.tangent(base)
        require_jacobi(S)
        return S
    base = GeneratorTable(_name_list(_get(obj, "base", pos, default=[]), f"{pos}.base"))
    fibre = _name_list(_get(obj, "basis", pos), f"{pos}.basis")
    names = [n for n, _ in fibre]
    if set(names) & set(base.names):
        raise ParseError("fibre and base names clash", pos)
    anchor = {}
    for key, comps in _get(obj, "anchor", pos, Mapping, default={}).items():
        a = _index(key, names, f"{pos}.anchor")
        if not isinstance(comps, Mapping):
            raise ParseError("expected {coordinate: polynomial}", f"{pos}.anchor.{key}")
        for x, poly in comps.items():
            if x not in base:
                raise ParseError(f"unknown base coordinate {x!r}", f"{pos}.anchor.{key}")
            anchor[(a, x)] = parse_poly(poly, base, f"{pos}.anchor.{key}.{x}")
    brackets: dict = {}
    for key, comps in _get(obj, "structure", pos, Mapping, default={}).items():
        p = f"{pos}.structure.{key}"
        parts = [s.strip() for s in str(key).split(",")]
        if len(parts) != 2:
            raise ParseError("structure keys look like \"a,b\"", p)
        a, b = (_index(s, names, p) for s in parts)
        if not isinstance(comps, Mapping):
            raise ParseError("expected {basis element: polynomial}", p)
        entry = brackets.setdefault((a, b), {})
        for e_key, poly in comps.items():
            e = _index(e_key, names, p)
            entry[e] = parse_poly(poly, base, f"{p}.{e_key}")
    S = _structure(lambda: StructureData.from_brackets(base, names, [d for _, d in fibre], anchor, brackets), pos)
    require_jacobi(S)
    return S


@dataclass
class ActionPayload:
    g: StructureData
    base: GeneratorTable
    fields: tuple[Derivation, ...]


def _vector_field(obj, table: GeneratorTable, pos: str, degree: int | None = None) -> Derivation:
    if not isinstance(obj, Mapping):
        raise ParseError("expected {coordinate: polynomial}", pos)
    images = {}
    for x, poly in obj.items():
        if x not in table:
            raise ParseError(f"unknown coordinate {x!r}", pos)
        images[x] = parse_poly(poly, table, f"{pos}.{x}")
    return Derivation(table, images, degree)


def parse_action(obj, pos: str = "$.action") -> ActionPayload:
    g = parse_lie_algebra(_get(obj, "lie_algebra", pos), f"{pos}.lie_algebra")
    base = GeneratorTable(_name_list(_get(obj, "base", pos), f"{pos}.base"))
    if set(base.names) & set(g.fibre):
        raise ParseError("base and Lie algebra names clash", pos)
    vfs = _get(obj, "vector_fields", pos, Mapping)
    fields = []
    for k, name in enumerate(g.fibre):
        if name not in vfs and str(k) not in vfs:
            raise ParseError(f"missing vector field for {name!r}", f"{pos}.vector_fields")
        raw = vfs[name] if name in vfs else vfs[str(k)]
        fields.append(_vector_field(raw, base, f"{pos}.vector_fields.{name}", 0))
    check_action(g, fields)
    return ActionPayload(g, base, tuple(fields))


@dataclass
class BialgebraPayload:
    c: StructureData
    gamma: StructureData


def parse_bialgebra(obj, pos: str = "$.bialgebra") -> BialgebraPayload:
    c = parse_lie_algebra(_get(obj, "c", pos), f"{pos}.c")
    gamma = parse_lie_algebra(_get(obj, "gamma", pos), f"{pos}.gamma")
    if c.rank != gamma.rank:
        raise ParseError("g and its dual need the same dimension", pos)
    return BialgebraPayload(c, gamma)


@dataclass
class GinzburgPayload:
    algebroid: StructureData
    g: StructureData
    premoment: tuple


def parse_ginzburg(obj, pos: str = "$.ginzburg") -> GinzburgPayload:
    S = parse_algebroid(_get(obj, "algebroid", pos), f"{pos}.algebroid")
    g = parse_lie_algebra(_get(obj, "lie_algebra", pos), f"{pos}.lie_algebra")
    pm = _get(obj, "premoment", pos, Mapping)
    sections = []
    for k, name in enumerate(g.fibre):
        p = f"{pos}.premoment.{name}"
        raw = pm.get(name, pm.get(str(k)))
        if not isinstance(raw, Mapping):
            raise ParseError(f"missing section for {name!r}", f"{pos}.premoment")
        coeffs = [S.base.zero()] * S.rank
        for key, poly in raw.items():
            coeffs[_index(key, list(S.fibre), p)] = parse_poly(poly, S.base, f"{p}.{key}")
        sections.append(make_section(S, coeffs))
    return GinzburgPayload(S, g, tuple(sections))


def parse_groupoid(obj, pos: str = "$.groupoid"):
    mode = _get(obj, "mode", pos, str)
    if mode == "finite":
        return _parse_finite(obj, pos)
    if mode == "poly_action":
        return _parse_poly_action(obj, pos)
    raise ParseError(f"unknown groupoid mode {mode!r} (finite | poly_action)", f"{pos}.mode")


def _parse_finite(obj, pos: str) -> FiniteGroupoid:
    if "cyclic" in obj:
        n = _int(obj["cyclic"], f"{pos}.cyclic")
        if n < 1:
            raise ParseError("cyclic order is positive", f"{pos}.cyclic")
        return FiniteGroupoid.cyclic(n)
    if "group" in obj:
        grp = obj["group"]
        p = f"{pos}.group"
        elements = [str(e) for e in _get(grp, "elements", p, list)]
        unit = str(_get(grp, "unit", p))
        table = _get(grp, "table", p, list)
        if len(table) != len(elements) or any(not isinstance(r, list) or len(r) != len(elements) for r in table):
            raise ParseError("table is a square list of lists over the elements", f"{p}.table")
        prod = {(g, h): str(table[i][j]) for i, g in enumerate(elements) for j, h in enumerate(elements)}
        if unit not in elements or any(v not in elements for v in prod.values()):
            raise ParseError("table entries and unit must be elements", p)
        return FiniteGroupoid.from_group(elements, lambda g, h: prod[(g, h)], unit)
    objects = [str(o) for o in _get(obj, "objects", pos, list)]
    arrows = {}
    for name, ends in _get(obj, "arrows", pos, Mapping).items():
        if not isinstance(ends, list) or len(ends) != 2:
            raise ParseError("arrows map names to [source, target]", f"{pos}.arrows.{name}")
        arrows[name] = (str(ends[0]), str(ends[1]))
    mult = {}
    for k, row in enumerate(_get(obj, "mult", pos, list)):
        if not isinstance(row, list) or len(row) != 3:
            raise ParseError("mult rows are [g, h, gh]", f"{pos}.mult[{k}]")
        mult[(row[0], row[1])] = row[2]
    identities = {str(k): v for k, v in _get(obj, "identities", pos, Mapping).items()}
    inverses = dict(_get(obj, "inverses", pos, Mapping))
    return FiniteGroupoid(objects, arrows, mult, identities, inverses)


def _parse_poly_action(obj, pos: str) -> PolyActionGroupoid:
    base = [n for n, _ in _name_list(_get(obj, "base", pos, default=[]), f"{pos}.base")]
    group = [n for n, _ in _name_list(_get(obj, "group", pos), f"{pos}.group")]
    frame = _get(obj, "frame", pos, list, default=None)
    law = GeneratorTable((slot_name(a, k), 0) for k in (1, 2) for a in group)
    mu_raw = _get(obj, "mu", pos, Mapping)
    mu = {}
    for a in group:
        if a not in mu_raw:
            raise ParseError(f"missing group law component {a!r}", f"{pos}.mu")
        mu[a] = parse_poly(mu_raw[a], law, f"{pos}.mu.{a}")
    act_table = GeneratorTable([(x, 0) for x in base] + [(slot_name(a, 1), 0) for a in group])
    action = {}
    for x, poly in _get(obj, "action", pos, Mapping, default={}).items():
        if x not in base:
            raise ParseError(f"unknown base coordinate {x!r}", f"{pos}.action")
        action[x] = parse_poly(poly, act_table, f"{pos}.action.{x}")
    try:
        return PolyActionGroupoid(base, group, mu, action, frame)
    except ValueError as exc:
        raise ParseError(str(exc), pos) from None


def parse_fields(obj, pos: str = "$.fields") -> dict:
    """An algebra plus optional explicit vector fields for the Cartan suite."""
    table = GeneratorTable(_name_list(_get(obj, "algebra", pos), f"{pos}.algebra"))
    explicit = []
    for k, vf in enumerate(_get(obj, "vector_fields", pos, list, default=[])):
        explicit.append(_vector_field(vf, table, f"{pos}.vector_fields[{k}]"))
    if len(explicit) % 2:
        raise ParseError("vector fields come in pairs (X, Y)", f"{pos}.vector_fields")
    return {"table": table, "pairs": [(explicit[k], explicit[k + 1]) for k in range(0, len(explicit), 2)]}


_PARSERS = {
    "lie_algebra": parse_lie_algebra,
    "algebroid": parse_algebroid,
    "action": parse_action,
    "bialgebra": parse_bialgebra,
    "groupoid": parse_groupoid,
    "ginzburg": parse_ginzburg,
    "fields": parse_fields,
}


# job section


def parse_window(v, pos: str) -> tuple[int, int]:
    if isinstance(v, str):
        m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", v)
        if not m:
            raise ParseError(f"window looks like a..b, got {v!r}", pos)
        lo, hi = int(m.group(1)), int(m.group(2))
    elif isinstance(v, list) and len(v) == 2:
        lo, hi = _int(v[0], f"{pos}[0]"), _int(v[1], f"{pos}[1]")
    else:
        raise ParseError("window is [n0, n1]", pos)
    if lo > hi:
        raise ParseError(f"empty window {lo}..{hi}", pos)
    return lo, hi


def parse_job(doc: Mapping, kind: str | None = None) -> JobSpec:
    if not isinstance(doc, Mapping):
        raise ParseError("top level must be an object")
    present = [k for k in PAYLOADS if k in doc]
    unknown = sorted(set(doc) - set(PAYLOADS) - {"job"})
    if unknown:
        raise ParseError(f"unknown top-level fields {unknown}")
    if len(present) != 1:
        raise ParseError(f"expected exactly one payload among {list(PAYLOADS)}, found {present}")
    job = doc.get("job", {})
    if not isinstance(job, Mapping):
        raise ParseError("expected an object", "$.job")
    file_kind = job.get("kind")
    if file_kind is not None and file_kind not in KINDS:
        raise ParseError(f"unknown job kind {file_kind!r}", "$.job.kind")
    # the kind given on the command line wins over the file's default
    window = parse_window(job["window"], "$.job.window") if "window" in job else None
    weight = None
    if "weight" in job:
        w = job["weight"]
        if isinstance(w, Mapping):
            assignment = _get(w, "assignment", "$.job.weight", Mapping)
            weight = (
                {str(k): _int(v, f"$.job.weight.assignment.{k}") for k, v in assignment.items()},
                _int(_get(w, "value", "$.job.weight"), "$.job.weight.value"),
            )
        else:
            weight = _int(w, "$.job.weight")
    fmt = job.get("format", "table")
    if fmt not in ("table", "json"):
        raise ParseError("format is 'table' or 'json'", "$.job.format")
    cx = job.get("complex")
    if cx is not None and cx not in COMPLEXES:
        raise ParseError(f"complex is one of {list(COMPLEXES)}", "$.job.complex")
    options = {k: v for k, v in job.items() if k in ("seed", "samples", "reps")}
    pk = present[0]
    payload = _PARSERS[pk](doc[pk], f"$.{pk}")
    return JobSpec(kind or file_kind, pk, payload, window, weight, fmt, cx, options)


def load(path: str | Path, kind: str | None = None) -> JobSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return parse_job(doc, kind)


def loads(text: str, kind: str | None = None) -> JobSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return parse_job(doc, kind)
