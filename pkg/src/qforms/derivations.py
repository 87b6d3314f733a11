"""Graded derivations stored by their values on generators."""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DegreeMismatch, MismatchedAlgebra, NotNilpotent
from .gca import Element, GeneratorTable, Monomial, Scalar, _check_same


class Derivation:
    """A degree-``degree`` derivation of the algebra on ``table``.

    ``images`` may be a mapping from generator names to elements (missing
    generators map to zero) or a sequence aligned with the table.  When
    ``degree`` is omitted it is read off the nonzero images.
    """

    __slots__ = ("table", "degree", "images", "_cache")

    def __init__(
        self,
        table: GeneratorTable,
        images: Mapping[str, Element] | Sequence[Element],
        degree: int | None = None,
    ):
        self.table = table
        if isinstance(images, Mapping):
            unknown = set(images) - set(table.names)
            if unknown:
                raise KeyError(f"unknown generators {sorted(unknown)}")
            imgs = [images.get(n) or table.zero() for n in table.names]
        else:
            imgs = list(images)
            if len(imgs) != len(table):
                raise ValueError("one image per generator expected")
        for img in imgs:
            _check_same(img.table, table)
        found = None
        for i, img in enumerate(imgs):
            d = img.degree()
            if d is None:
                continue
            shift = d - table.degrees[i]
            if found is None:
                found = shift
            elif shift != found:
                raise DegreeMismatch(
                    f"image of {table.names[i]} has degree {d}; derivation degree {found} expected"
                )
        if degree is None:
            degree = found if found is not None else 0
        elif found is not None and found != degree:
            raise DegreeMismatch(f"declared degree {degree} but images have degree {found}")
        self.degree = int(degree)
        self.images: tuple[Element, ...] = tuple(imgs)
        self._cache: dict[Monomial, Element] = {}

    @classmethod
    def zero(cls, table: GeneratorTable, degree: int = 0) -> "Derivation":
        return cls(table, [table.zero()] * len(table), degree)

    @classmethod
    def partial(cls, table: GeneratorTable, name: str) -> "Derivation":
        """The coordinate derivation d/d(name)."""
        return cls(table, {name: table.one()}, -table.degree(name))

    def image(self, name: str) -> Element:
        return self.images[self.table.index(name)]

    def is_zero(self) -> bool:
        return not any(self.images)

    def __call__(self, a: Element) -> Element:
        return apply(self, a)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Derivation):
            return NotImplemented
        if self.table != other.table or self.images != other.images:
            return False
        return self.degree == other.degree or self.is_zero()

    def __hash__(self) -> int:
        return hash((self.table, self.images))

    def _combine(self, other: "Derivation", sign: int) -> "Derivation":
        _check_same(self.table, other.table)
        if self.degree != other.degree and not (self.is_zero() or other.is_zero()):
            raise DegreeMismatch(f"cannot add derivations of degree {self.degree} and {other.degree}")
        deg = other.degree if self.is_zero() else self.degree
        imgs = [a + b if sign > 0 else a - b for a, b in zip(self.images, other.images)]
        return Derivation(self.table, imgs, deg)

    def __add__(self, other: "Derivation") -> "Derivation":
        return self._combine(other, 1)

    def __sub__(self, other: "Derivation") -> "Derivation":
        return self._combine(other, -1)

    def __neg__(self) -> "Derivation":
        return Derivation(self.table, [-a for a in self.images], self.degree)

    def __mul__(self, c: Scalar) -> "Derivation":
        if not isinstance(c, (int, Fraction)):
            return NotImplemented
        return Derivation(self.table, [a * c for a in self.images], self.degree)

    def __rmul__(self, c) -> "Derivation":
        """Scalar multiple, or left multiplication ``f*D`` by a homogeneous element."""
        if isinstance(c, (int, Fraction)):
            return self * c
        if isinstance(c, Element):
            _check_same(c.table, self.table)
            d = c.degree()
            return Derivation(self.table, [c * a for a in self.images], self.degree + (d or 0))
        return NotImplemented

    def extend(self, table: GeneratorTable) -> "Derivation":
        """The derivation of a larger algebra that vanishes on the new generators."""
        imgs = {n: img.embed(table) for n, img in zip(self.table.names, self.images)}
        return Derivation(table, imgs, self.degree)

    def restrict(self, table: GeneratorTable) -> "Derivation":
        """Read this derivation on a subalgebra whose generators it preserves."""
        imgs = {}
        for name in table.names:
            img = self.image(name)
            imgs[name] = _restrict_element(img, table)
        return Derivation(table, imgs, self.degree)

    def __str__(self) -> str:
        parts = [f"{n} -> {img}" for n, img in zip(self.table.names, self.images) if img]
        return "{" + ", ".join(parts) + "}"

    def __repr__(self) -> str:
        return f"Derivation(degree={self.degree}, {self})"


def _restrict_element(a: Element, table: GeneratorTable) -> Element:
    names = a.table.names
    for m in a.terms:
        for i, _ in m:
            if names[i] not in table:
                raise MismatchedAlgebra(f"{a} involves {names[i]}, absent from the subalgebra")
    # monomials stay canonical when the subtable keeps the relative order
    idx = [table.index(n) if n in table else -1 for n in a.table.names]
    ordered = all(
        idx[i] < idx[j]
        for i in range(len(idx))
        for j in range(i + 1, len(idx))
        if idx[i] >= 0 and idx[j] >= 0
    )
    if not ordered:
        return a.embed(table)
    return Element(table, {tuple((idx[i], e) for i, e in m): c for m, c in a.terms.items()})


def apply(D: Derivation, a: Element) -> Element:
    """Leibniz extension of the generator images of ``D`` applied to ``a``."""
    _check_same(D.table, a.table)
    out = D.table.zero()
    for m, c in a.terms.items():
        img = _apply_monomial(D, m)
        if img:
            out = out + img * c
    return out


def _apply_monomial(D: Derivation, m: Monomial) -> Element:
    cached = D._cache.get(m)
    if cached is not None:
        return cached
    table = D.table
    degs = table.degrees
    result = table.zero()
    odd_d = D.degree & 1
    prefix_deg = 0
    for k, (i, e) in enumerate(m):
        img = D.images[i]
        if img:
            rest = list(m)
            if e == 1:
                del rest[k]
            else:
                rest[k] = (i, e - 1)
            before = tuple(rest[:k])
            after = tuple(rest[k:])
            # D passes the factors before g_i; the remaining g_i^(e-1) are even
            # when e > 1 and can be moved to the left freely.
            sign = -1 if odd_d and (prefix_deg & 1) else 1
            left = Element.monomial(table, before, sign * e)
            right = Element.monomial(table, after)
            result = result + left * img * right
        prefix_deg += degs[i] * e
    D._cache[m] = result
    return result


def compose(D1: Derivation, D2: Derivation, a: Element) -> Element:
    return apply(D1, apply(D2, a))


def bracket(D1: Derivation, D2: Derivation) -> Derivation:
    """Graded commutator ``D1 D2 - (-1)^{|D1||D2|} D2 D1``."""
    _check_same(D1.table, D2.table)
    sign = -1 if (D1.degree * D2.degree) & 1 else 1
    imgs = []
    for g1, g2 in zip(D1.images, D2.images):
        term = apply(D1, g2)
        other = apply(D2, g1)
        imgs.append(term + other if sign < 0 else term - other)
    return Derivation(D1.table, imgs, D1.degree + D2.degree)


def is_homological(D: Derivation) -> bool:
    return D.degree == 1 and bracket(D, D).is_zero()


def square_witness(D: Derivation) -> tuple[str, Element] | None:
    """A generator on which ``D∘D`` is nonzero, with the value."""
    for name, g in zip(D.table.names, D.table.gens()):
        v = apply(D, apply(D, g))
        if v:
            return name, v
    return None


def exp_nilpotent(N: Derivation, a: Element, cap: int = 64) -> Element:
    """``sum_k N^k(a)/k!`` for a degree-0 derivation nilpotent on ``a``."""
    if N.degree != 0 and not N.is_zero():
        raise DegreeMismatch("exp_nilpotent needs a degree-0 derivation")
    total = a
    term = a
    k = 0
    while True:
        k += 1
        if k > cap:
            raise NotNilpotent(f"N^k(a) nonzero up to k={cap}")
        term = apply(N, term) * Fraction(1, k)
        if not term:
            return total
        total = total + term


def conjugate(D: Derivation, N: Derivation, cap: int = 64) -> Derivation:
    """``Ad_{exp N} D = exp(ad_N) D`` summed until the iterated brackets vanish."""
    if N.degree != 0 and not N.is_zero():
        raise DegreeMismatch("conjugation needs a degree-0 derivation")
    total = D
    term = D
    k = 0
    while True:
        k += 1
        if k > cap:
            raise NotNilpotent(f"ad_N^k(D) nonzero up to k={cap}")
        term = bracket(N, term) * Fraction(1, k)
        if term.is_zero():
            return total
        total = total + term
