"""Groupoid cochain complexes and the van Est map.

Two kinds of groupoid are supported.  A :class:`FiniteGroupoid` is given by
explicit tables and its cochains are value tables on composable tuples.  A
:class:`PolyActionGroupoid` is the action groupoid ``M x G`` of a polynomial
right action of a polynomial group on ``R^m``.  Its level-q cochains are
polynomials in ``x^i, g_1^a, ..., g_q^a``, where ``g_k`` is the k-th arrow of
a composable tuple and ``x`` is the target of the first arrow.

Nerve conventions: ``sigma_0`` drops the first arrow (moving the base point
along it), ``sigma_i`` multiplies arrows i and i+1, ``sigma_q`` drops the last
arrow; on single arrows ``sigma_0 = s`` and ``sigma_1 = t``.  The degeneracy
``Delta_i`` inserts an identity after the i-th arrow.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from . import linalg
from .algebroids import StructureData, build_differential
from .cohomology import BettiRow, BettiTable
from .derivations import Derivation, bracket
from .errors import (
    IndexOutOfRange,
    MismatchedGroupoid,
    NotNormalized,
    ShapeError,
    ValidationError,
)
from .gca import Element, GeneratorTable, substitute


# finite groupoids


class FiniteGroupoid:
    """Objects, arrows and a multiplication table ``mult[(g, h)] = gh``.

    ``(g, h)`` is composable when ``s(g) == t(h)``.  All groupoid axioms are
    checked on construction.
    """

    def __init__(
        self,
        objects: Iterable[Hashable],
        arrows: Mapping[Hashable, tuple[Hashable, Hashable]],
        mult: Mapping[tuple[Hashable, Hashable], Hashable],
        identities: Mapping[Hashable, Hashable],
        inverses: Mapping[Hashable, Hashable],
    ):
        self.objects = tuple(objects)
        self.arrows = tuple(arrows)
        self._ends = {g: (st[0], st[1]) for g, st in arrows.items()}
        self.mult = dict(mult)
        self.identities = dict(identities)
        self.inverses = dict(inverses)
        self._points: dict[int, tuple] = {}
        self._validate()

    @classmethod
    def from_group(
        cls, elements: Sequence[Hashable], product: Callable[[Hashable, Hashable], Hashable], unit: Hashable
    ) -> "FiniteGroupoid":
        elements = tuple(elements)
        mult = {(g, h): product(g, h) for g in elements for h in elements}
        inv = {}
        for g in elements:
            matches = [h for h in elements if mult[(g, h)] == unit]
            if len(matches) != 1:
                raise ValidationError("inverse", g)
            inv[g] = matches[0]
        pt = "*"
        return cls([pt], {g: (pt, pt) for g in elements}, mult, {pt: unit}, inv)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroupoid":
        """``Z/n`` with elements ``0..n-1``."""
        return cls.from_group(range(n), lambda a, b: (a + b) % n, 0)

    def s(self, g: Hashable) -> Hashable:
        return self._ends[g][0]

    def t(self, g: Hashable) -> Hashable:
        return self._ends[g][1]

    def _validate(self) -> None:
        objs = set(self.objects)
        for g, (src, tgt) in self._ends.items():
            if src not in objs or tgt not in objs:
                raise ValidationError("source and target are objects", g)
        for x in self.objects:
            e = self.identities.get(x)
            if e not in self._ends or self.s(e) != x or self.t(e) != x:
                raise ValidationError("identity arrow at each object", x)
        for g in self.arrows:
            for h in self.arrows:
                if self.s(g) != self.t(h):
                    continue
                gh = self.mult.get((g, h))
                if gh not in self._ends:
                    raise ValidationError("multiplication defined on composable pairs", (g, h))
                if self.s(gh) != self.s(h) or self.t(gh) != self.t(g):
                    raise ValidationError("source and target of a product", (g, h))
        for g in self.arrows:
            if self.mult[(g, self.identities[self.s(g)])] != g or self.mult[(self.identities[self.t(g)], g)] != g:
                raise ValidationError("identity law", g)
            gi = self.inverses.get(g)
            if gi not in self._ends or self.s(gi) != self.t(g) or self.t(gi) != self.s(g):
                raise ValidationError("inverse", g)
            if self.mult[(g, gi)] != self.identities[self.t(g)] or self.mult[(gi, g)] != self.identities[self.s(g)]:
                raise ValidationError("inverse", g)
        for g, h, k in self.points(3):
            if self.mult[(self.mult[(g, h)], k)] != self.mult[(g, self.mult[(h, k)])]:
                raise ValidationError("associativity", (g, h, k))

    def points(self, q: int) -> tuple:
        """``G^(q)``: objects for q = 0, composable q-tuples otherwise."""
        if q not in self._points:
            if q == 0:
                pts: tuple = self.objects
            elif q == 1:
                pts = tuple((g,) for g in self.arrows)
            else:
                pts = tuple(
                    p + (h,) for p in self.points(q - 1) for h in self.arrows if self.t(h) == self.s(p[-1])
                )
            self._points[q] = pts
        return self._points[q]

    def is_degenerate(self, point) -> bool:
        ids = set(self.identities.values())
        return isinstance(point, tuple) and any(g in ids for g in point)

    def face(self, i: int, q: int, point):
        if q == 1:
            return self.s(point[0]) if i == 0 else self.t(point[0])
        if i == 0:
            return point[1:]
        if i == q:
            return point[:-1]
        return point[: i - 1] + (self.mult[(point[i - 1], point[i])],) + point[i + 1 :]

    def degeneracy(self, i: int, q: int, point):
        if q == 0:
            return (self.identities[point],)
        if i < q:
            e = self.identities[self.t(point[i])]
        else:
            e = self.identities[self.s(point[-1])]
        return point[:i] + (e,) + point[i:]


# polynomial action groupoids


def slot_name(name: str, k: int) -> str:
    return f"{name}_{k}"


class PolyActionGroupoid:
    """Action groupoid of a polynomial right action ``s: R^m x G -> R^m``.

    ``mu`` gives the group law as polynomials in ``a_1, ..., a_2`` (the two
    factors, named with :func:`slot_name`); ``action`` gives ``s`` as
    polynomials in the base coordinates and ``a_1``.  The unit is the origin.
    """

    def __init__(
        self,
        base: Sequence[str],
        group: Sequence[str],
        mu: Mapping[str, Element],
        action: Mapping[str, Element] | None = None,
        frame_names: Sequence[str] | None = None,
    ):
        self.base = tuple(base)
        self.group = tuple(group)
        self.frame_names = tuple(frame_names or (f"th{k + 1}" for k in range(len(self.group))))
        if len(self.frame_names) != len(self.group):
            raise ShapeError("one frame name per group coordinate")
        self._tables: dict[int, GeneratorTable] = {}
        names = list(self.level_table(3).names) + list(self.frame_names)
        if len(set(names)) != len(names):
            raise ShapeError("coordinate names clash")
        self.law_table = GeneratorTable((slot_name(a, k), 0) for k in (1, 2) for a in self.group)
        self.action_table = self.level_table(1)
        self.mu = {a: mu[a].embed(self.law_table) for a in self.group}
        act = action or {}
        self.action = {
            x: (act[x].embed(self.action_table) if x in act else self.action_table.gen(x)) for x in self.base
        }
        self.group_table = GeneratorTable((a, 0) for a in self.group)
        self.base_table = self.level_table(0)
        self._validate_law()
        self.frame = self._left_invariant_frame()
        self.constants = self._frame_constants()

    def level_table(self, q: int) -> GeneratorTable:
        if q not in self._tables:
            gens = [(x, 0) for x in self.base]
            gens += [(slot_name(a, k), 0) for k in range(1, q + 1) for a in self.group]
            self._tables[q] = GeneratorTable(gens)
        return self._tables[q]

    def slot(self, q: int, k: int) -> dict[str, Element]:
        T = self.level_table(q)
        return {a: T.gen(slot_name(a, k)) for a in self.group}

    def multiply(self, g: Mapping[str, Element], h: Mapping[str, Element], target: GeneratorTable) -> dict:
        images = {slot_name(a, 1): g[a] for a in self.group}
        images.update({slot_name(a, 2): h[a] for a in self.group})
        return {a: substitute(self.mu[a], images, target) for a in self.group}

    def act(self, x: Mapping[str, Element], g: Mapping[str, Element], target: GeneratorTable) -> dict:
        images = dict(x)
        images.update({slot_name(a, 1): g[a] for a in self.group})
        return {n: substitute(self.action[n], images, target) for n in self.base}

    def _validate_law(self) -> None:
        T = self.level_table(3)
        zero = {a: T.zero() for a in self.group}
        x = {n: T.gen(n) for n in self.base}
        g1, g2, g3 = self.slot(3, 1), self.slot(3, 2), self.slot(3, 3)
        if self.multiply(g1, zero, T) != g1 or self.multiply(zero, g1, T) != g1:
            raise ValidationError("the origin is a two-sided unit of the group law")
        lhs = self.multiply(self.multiply(g1, g2, T), g3, T)
        rhs = self.multiply(g1, self.multiply(g2, g3, T), T)
        for a in self.group:
            if lhs[a] != rhs[a]:
                raise ValidationError(
                    "associativity of the group law", a, f"associativity of the group law fails in {a}: {lhs[a]} != {rhs[a]}"
                )
        if self.act(x, zero, T) != x:
            raise ValidationError("the unit acts trivially")
        lhs = self.act(self.act(x, g1, T), g2, T)
        rhs = self.act(x, self.multiply(g1, g2, T), T)
        for n in self.base:
            if lhs[n] != rhs[n]:
                raise ValidationError(
                    "right action axiom s(s(x,g),h) = s(x,gh)", n, f"right action axiom fails in {n}: {lhs[n]} != {rhs[n]}"
                )

    def _left_invariant_frame(self) -> tuple[Derivation, ...]:
        """``J_a = d mu(g, h)/d h^a at h = 0`` as vector fields on the group."""
        G = self.group_table
        to_group = {slot_name(a, 1): G.gen(a) for a in self.group}
        to_group.update({slot_name(a, 2): G.zero() for a in self.group})
        frame = []
        for b in self.group:
            dh = Derivation.partial(self.law_table, slot_name(b, 2))
            images = {a: substitute(dh(self.mu[a]), to_group, G) for a in self.group}
            frame.append(Derivation(G, images, 0))
        return tuple(frame)

    def _frame_constants(self) -> dict[tuple[int, int, int], Fraction]:
        n = len(self.group)
        out = {}
        for a in range(n):
            for b in range(n):
                br = bracket(self.frame[a], self.frame[b])
                # the frame is the identity at the origin
                coeffs = [img.constant_term() for img in br.images]
                rhs = Derivation.zero(self.group_table, 0)
                for e, c in enumerate(coeffs):
                    if c:
                        rhs = rhs + self.frame[e] * c
                        out[(a, b, e)] = c
                if br != rhs:
                    raise ValidationError(
                        "left-invariant frame closes with constant structure constants",
                        (self.group[a], self.group[b]),
                    )
        return out

    def algebroid(self) -> StructureData:
        """Frame data of the algebroid: anchor ``d s/d g^a at g = 0``, constants of the frame."""
        B = self.base_table
        at_unit = {slot_name(a, 1): B.zero() for a in self.group}
        anchor = {}
        for k, a in enumerate(self.group):
            dg = Derivation.partial(self.action_table, slot_name(a, 1))
            for x in self.base:
                rho = substitute(dg(self.action[x]), at_unit, B)
                if rho:
                    anchor[(k, x)] = rho
        brackets: dict = {}
        for (a, b, e), c in self.constants.items():
            if a < b:
                brackets.setdefault((a, b), {})[e] = c
        return StructureData.from_brackets(B, self.frame_names, (0,) * len(self.group), anchor, brackets)

    # nerve maps on coordinate rings

    def face_images(self, i: int, q: int) -> dict[str, Element]:
        """Pullbacks of the level q-1 coordinates along ``sigma_i^q``."""
        T = self.level_table(q)
        x = {n: T.gen(n) for n in self.base}
        slots = [self.slot(q, k) for k in range(1, q + 1)]
        if i == 0:
            x = self.act(x, slots[0], T)
            new = slots[1:]
        elif i == q:
            new = slots[:-1]
        else:
            new = slots[: i - 1] + [self.multiply(slots[i - 1], slots[i], T)] + slots[i + 1 :]
        images = dict(x)
        for k, g in enumerate(new, start=1):
            images.update({slot_name(a, k): g[a] for a in self.group})
        return images

    def degeneracy_images(self, i: int, q: int) -> dict[str, Element]:
        """Pullbacks of the level q+1 coordinates along ``Delta_i^q``."""
        T = self.level_table(q)
        images = {n: T.gen(n) for n in self.base}
        slots = [self.slot(q, k) for k in range(1, q + 1)]
        slots.insert(i, {a: T.zero() for a in self.group})
        for k, g in enumerate(slots, start=1):
            images.update({slot_name(a, k): g[a] for a in self.group})
        return images


Groupoid = FiniteGroupoid | PolyActionGroupoid


# cochains


@dataclass(frozen=True, eq=False)
class Cochain:
    """A function on ``G^(q)``: an :class:`Element` or a table ``point -> value``."""

    groupoid: Groupoid
    level: int
    value: object

    def __post_init__(self):
        if self.level < 0:
            raise IndexOutOfRange(f"negative level {self.level}")
        if isinstance(self.groupoid, PolyActionGroupoid):
            T = self.groupoid.level_table(self.level)
            if not isinstance(self.value, Element) or self.value.table != T:
                object.__setattr__(self, "value", _as_poly(self.value, T))
        else:
            pts = set(self.groupoid.points(self.level))
            table = {}
            for p, v in dict(self.value).items():
                if p not in pts:
                    raise ShapeError(f"{p!r} is not a point of level {self.level}")
                if v:
                    table[p] = Fraction(v)
            object.__setattr__(self, "value", table)

    def _same(self, other: "Cochain") -> None:
        if other.groupoid is not self.groupoid:
            raise MismatchedGroupoid("cochains live on different groupoids")
        if other.level != self.level:
            raise ShapeError(f"levels {self.level} and {other.level} differ")

    def _finite(self) -> bool:
        return isinstance(self.groupoid, FiniteGroupoid)

    def __call__(self, point):
        if not self._finite():
            raise TypeError("evaluate polynomial cochains with gca.substitute")
        return self.value.get(point, Fraction(0))

    def __add__(self, other: "Cochain") -> "Cochain":
        self._same(other)
        if self._finite():
            keys = set(self.value) | set(other.value)
            return Cochain(self.groupoid, self.level, {p: self(p) + other(p) for p in keys})
        return Cochain(self.groupoid, self.level, self.value + other.value)

    def __neg__(self) -> "Cochain":
        return self * -1

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def __mul__(self, c) -> "Cochain":
        if isinstance(c, Cochain):
            return cup(self, c)
        if self._finite():
            return Cochain(self.groupoid, self.level, {p: v * c for p, v in self.value.items()})
        return Cochain(self.groupoid, self.level, self.value * c)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.value

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return other.groupoid is self.groupoid and other.level == self.level and other.value == self.value

    __hash__ = None

    def __str__(self) -> str:
        if self._finite():
            return "{" + ", ".join(f"{p!r}: {v}" for p, v in sorted(self.value.items(), key=repr)) + "}"
        return str(self.value)


def _as_poly(value, T: GeneratorTable) -> Element:
    if isinstance(value, Element):
        return value.embed(T)
    return T.scalar(value)


def cochain(gpd: Groupoid, level: int, value) -> Cochain:
    return Cochain(gpd, level, value)


def _check_face_index(i: int, q: int) -> None:
    if q < 1 or not 0 <= i <= q:
        raise IndexOutOfRange(f"face sigma_{i}^{q} needs 0 <= i <= q and q >= 1")


def _check_degeneracy_index(i: int, q: int) -> None:
    if q < 0 or not 0 <= i <= q:
        raise IndexOutOfRange(f"degeneracy Delta_{i}^{q} needs 0 <= i <= q")


def face_pullback(gpd: Groupoid, i: int, q: int, f: Cochain) -> Cochain:
    """``(sigma_i^q)^* f`` for a cochain ``f`` of level q-1."""
    _check_face_index(i, q)
    if f.groupoid is not gpd:
        raise MismatchedGroupoid("cochain lives on a different groupoid")
    if f.level != q - 1:
        raise ShapeError(f"face sigma_{i}^{q} pulls back level {q - 1}, got level {f.level}")
    if isinstance(gpd, PolyActionGroupoid):
        return Cochain(gpd, q, substitute(f.value, gpd.face_images(i, q), gpd.level_table(q)))
    return Cochain(gpd, q, {p: f(gpd.face(i, q, p)) for p in gpd.points(q)})


def degeneracy_pullback(gpd: Groupoid, i: int, q: int, f: Cochain) -> Cochain:
    """``(Delta_i^q)^* f`` for a cochain ``f`` of level q+1."""
    _check_degeneracy_index(i, q)
    if f.groupoid is not gpd:
        raise MismatchedGroupoid("cochain lives on a different groupoid")
    if f.level != q + 1:
        raise ShapeError(f"degeneracy Delta_{i}^{q} pulls back level {q + 1}, got level {f.level}")
    if isinstance(gpd, PolyActionGroupoid):
        return Cochain(gpd, q, substitute(f.value, gpd.degeneracy_images(i, q), gpd.level_table(q)))
    return Cochain(gpd, q, {p: f(gpd.degeneracy(i, q, p)) for p in gpd.points(q)})


def delta(f: Cochain) -> Cochain:
    """``sum_i (-1)^i (sigma_i^{q+1})^* f``."""
    gpd, q = f.groupoid, f.level
    out = face_pullback(gpd, 0, q + 1, f)
    for i in range(1, q + 2):
        term = face_pullback(gpd, i, q + 1, f)
        out = out - term if i % 2 else out + term
    return out


def cup(f: Cochain, g: Cochain) -> Cochain:
    """Product of cochains: ``f`` on the first q arrows times ``g`` on the last q'.

    Built from outer faces: the last faces push ``f`` up and the zeroth faces
    push ``g`` up, then the two pullbacks are multiplied pointwise.
    """
    if f.groupoid is not g.groupoid:
        raise MismatchedGroupoid("cochains live on different groupoids")
    gpd, q, r = f.groupoid, f.level, g.level
    for k in range(q + 1, q + r + 1):
        f = face_pullback(gpd, k, k, f)
    for k in range(r + 1, q + r + 1):
        g = face_pullback(gpd, 0, k, g)
    if isinstance(gpd, PolyActionGroupoid):
        return Cochain(gpd, q + r, f.value * g.value)
    return Cochain(gpd, q + r, {p: v * g(p) for p, v in f.value.items()})


def normalize_check(f: Cochain) -> bool:
    """True iff every degeneracy pullback of ``f`` vanishes."""
    q = f.level
    return all(degeneracy_pullback(f.groupoid, i, q - 1, f).is_zero() for i in range(q))


# simplicial identities


def _probes(gpd: Groupoid, q: int) -> list[Cochain]:
    """Cochains whose pullbacks determine a map into level q."""
    if isinstance(gpd, PolyActionGroupoid):
        return [Cochain(gpd, q, g) for g in gpd.level_table(q).gens()]
    # one injective function is enough
    return [Cochain(gpd, q, {p: k + 1 for k, p in enumerate(gpd.points(q))})]


def _face(gpd, i, q):
    return lambda f: face_pullback(gpd, i, q, f)


def _degen(gpd, i, q):
    return lambda f: degeneracy_pullback(gpd, i, q, f)


def _pull(chain, f):
    # the map is applied right to left, so pullbacks run left to right
    for op in chain:
        f = op(f)
    return f


def simplicial_identities(gpd: Groupoid, max_level: int = 3) -> list[tuple[str, bool]]:
    """Check the face/face, degeneracy/degeneracy and face/degeneracy identities.

    Each entry is ``(label, holds)``; ``max_level`` bounds the top simplicial
    index q of every identity checked.
    """
    out = []

    def record(label, lhs, rhs, level):
        ok = all(_pull(lhs, f) == _pull(rhs, f) for f in _probes(gpd, level))
        out.append((label, ok))

    for q in range(2, max_level + 1):
        for j in range(q + 1):
            for i in range(j):
                # sigma_i^{q-1} sigma_j^q = sigma_{j-1}^{q-1} sigma_i^q
                record(
                    f"face{i},{j}@{q}",
                    [_face(gpd, i, q - 1), _face(gpd, j, q)],
                    [_face(gpd, j - 1, q - 1), _face(gpd, i, q)],
                    q - 2,
                )
    for q in range(0, max_level + 1):
        for j in range(q + 1):
            for i in range(j + 1):
                # Delta_i^{q+1} Delta_j^q = Delta_{j+1}^{q+1} Delta_i^q
                record(
                    f"degen{i},{j}@{q}",
                    [_degen(gpd, i, q + 1), _degen(gpd, j, q)],
                    [_degen(gpd, j + 1, q + 1), _degen(gpd, i, q)],
                    q + 2,
                )
    for q in range(0, max_level + 1):
        for j in range(q + 1):
            for i in range(q + 2):
                lhs = [_face(gpd, i, q + 1), _degen(gpd, j, q)]
                if i < j:
                    rhs = [_degen(gpd, j - 1, q - 1), _face(gpd, i, q)]
                elif i in (j, j + 1):
                    rhs = []
                else:
                    rhs = [_degen(gpd, j, q - 1), _face(gpd, i - 1, q)]
                record(f"facedegen{i},{j}@{q}", lhs, rhs, q)
    return out


# normalized complex of a finite groupoid


def _normalized_basis(gpd: FiniteGroupoid, q: int) -> list:
    return [p for p in gpd.points(q) if not gpd.is_degenerate(p)]


def _normalized_delta_rows(gpd: FiniteGroupoid, q: int) -> list[list[Fraction]]:
    """Images of the indicator cochains of level q, read on nondegenerate level q+1 points."""
    target = _normalized_basis(gpd, q + 1)
    rows = []
    for p in _normalized_basis(gpd, q):
        d = delta(Cochain(gpd, q, {p: 1}))
        rows.append([d(r) for r in target])
    return rows


def normalized_betti(gpd: FiniteGroupoid, window: tuple[int, int]) -> BettiTable:
    """Betti numbers of the normalized cochain complex over the rationals."""
    lo, hi = window
    if lo > hi or lo < 0:
        raise ValueError(f"bad window {window}")

    def rank(q: int) -> int:
        if q < 0:
            return 0
        rows = _normalized_delta_rows(gpd, q)
        return linalg.rank(rows) if rows and rows[0] else 0

    rows = []
    prev = rank(lo - 1)
    for q in range(lo, hi + 1):
        dim = len(_normalized_basis(gpd, q))
        r = rank(q)
        rows.append(BettiRow(q, dim, r, dim - r, dim - r - prev))
        prev = r
    return BettiTable(rows)


# random cochains


def _slot_of(name: str) -> int:
    return int(name.rsplit("_", 1)[1])


def random_cochain(
    gpd: Groupoid,
    q: int,
    rng: random.Random,
    normalized: bool = True,
    max_degree: int = 3,
    terms: int = 4,
    coeff_range: int = 3,
) -> Cochain:
    """A random cochain of level q (polynomials of total degree <= ``max_degree``).

    Normalized polynomial cochains are those in which every monomial involves
    every arrow slot.
    """
    if isinstance(gpd, FiniteGroupoid):
        pts = _normalized_basis(gpd, q) if normalized else list(gpd.points(q))
        return Cochain(gpd, q, {p: rng.randint(-coeff_range, coeff_range) for p in pts})
    T = gpd.level_table(q)
    names = T.names
    group_slots = {n: _slot_of(n) for n in names if n not in gpd.base}
    candidates = []
    for deg in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(len(names)), deg):
            slots = {group_slots[names[k]] for k in combo if names[k] in group_slots}
            if normalized and len(slots) < q:
                continue
            candidates.append(combo)
    if not candidates:
        raise ShapeError(f"no normalized monomials of degree <= {max_degree} at level {q}")
    value = T.zero()
    for combo in rng.sample(candidates, min(terms, len(candidates))):
        c = 0
        while c == 0:
            c = rng.randint(-coeff_range, coeff_range)
        mono = T.one()
        for k in combo:
            mono = mono * T.gen(names[k])
        value = value + mono * c
    return Cochain(gpd, q, value)


# van Est


class VanEst:
    """The van Est map of a polynomial action groupoid into its algebroid cochains."""

    def __init__(self, gpd: PolyActionGroupoid):
        self.groupoid = gpd
        self.algebroid = gpd.algebroid()
        self.table = self.algebroid.table
        self.d_A = build_differential(self.algebroid)
        self._lifts: dict[tuple[int, int], Derivation] = {}

    def _lift(self, a: int, q: int) -> Derivation:
        """The frame field ``J_a`` acting on the last slot of level q."""
        key = (a, q)
        if key not in self._lifts:
            gpd = self.groupoid
            T = gpd.level_table(q)
            last = gpd.slot(q, q)
            images = {n: T.zero() for n in T.names}
            for k, name in enumerate(gpd.group):
                images[slot_name(name, q)] = substitute(gpd.frame[a].images[k], last, T)
            self._lifts[key] = Derivation(T, images, 0)
        return self._lifts[key]

    def lowered(self, a: int, f: Element, q: int) -> Element:
        """``X_a^q f``: differentiate along the last slot, then set it to the identity."""
        gpd = self.groupoid
        below = gpd.level_table(q - 1)
        at_unit = {slot_name(n, q): below.zero() for n in gpd.group}
        return substitute(self._lift(a, q)(f), at_unit, below)

    def __call__(self, f: Cochain) -> Element:
        gpd = self.groupoid
        if f.groupoid is not gpd:
            raise MismatchedGroupoid("cochain lives on a different groupoid")
        if not normalize_check(f):
            raise NotNormalized(f"cochain of level {f.level} is not normalized")
        q = f.level
        S = self.algebroid
        out = self.table.zero()
        memo: dict[tuple[int, ...], Element] = {(): f.value}

        def applied(seq: tuple[int, ...]) -> Element:
            # seq lists the frame indices for slots q-len+1..q
            if seq not in memo:
                memo[seq] = self.lowered(seq[0], applied(seq[1:]), q - len(seq) + 1)
            return memo[seq]

        for subset in itertools.combinations(range(len(gpd.group)), q):
            coeff = gpd.base_table.zero()
            for perm in itertools.permutations(range(q)):
                term = applied(tuple(subset[k] for k in perm))
                coeff = coeff + term * _perm_sign(perm)
            if coeff:
                wedge = self.table.one()
                for a in subset:
                    wedge = wedge * S.fibre_gen(a)
                out = out + coeff.embed(self.table) * wedge
        return out


def _perm_sign(perm: Sequence[int]) -> int:
    inversions = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def van_est(gpd: PolyActionGroupoid, f: Cochain) -> Element:
    return VanEst(gpd)(f)
