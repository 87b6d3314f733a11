"""Odd tangent algebras and the Cartan calculus ``d``, ``iota_X``, ``L_X``."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .derivations import Derivation, bracket
from .gca import Element, GeneratorTable, monomials_up_to, substitute


@dataclass(frozen=True, eq=False)
class OddTangentAlgebra:
    """Base generators followed by one dotted generator per base generator."""

    base: GeneratorTable
    table: GeneratorTable
    dotted: tuple[str, ...]
    d: Derivation

    def dot(self, name: str) -> str:
        return self.dotted[self.base.index(name)]

    def lift(self, a: Element) -> Element:
        """A base element read in the odd tangent algebra."""
        return a.embed(self.table)


def dotted_names(names: tuple[str, ...]) -> tuple[str, ...]:
    """Append the shortest run of primes that clashes with no existing name.

    A first odd tangent gives ``x -> x'``; taking it again gives
    ``x -> x''`` and ``x' -> x'''``.
    """
    taken = set(names)
    k = 1
    while True:
        out = tuple(n + "'" * k for n in names)
        if not taken & set(out) and len(set(out)) == len(out):
            return out
        k += 1


def odd_tangent(table: GeneratorTable) -> OddTangentAlgebra:
    dotted = dotted_names(table.names)
    full = table.extend((dn, deg + 1) for dn, deg in zip(dotted, table.degrees))
    d = Derivation(full, {n: full.gen(dn) for n, dn in zip(table.names, dotted)}, 1)
    return OddTangentAlgebra(table, full, dotted, d)


def contraction(X: Derivation, T: OddTangentAlgebra) -> Derivation:
    """``iota_X``: ``x -> 0``, ``x' -> X(x)``, of degree ``|X| - 1``."""
    images = {dn: X.images[i].embed(T.table) for i, dn in enumerate(T.dotted)}
    return Derivation(T.table, images, X.degree - 1)


def lie_derivative(X: Derivation, T: OddTangentAlgebra, iota: Callable | None = None) -> Derivation:
    """``L_X = [iota_X, d]``."""
    iota = iota or contraction
    return bracket(iota(X, T), T.d)


def pushforward_images(images: dict[str, Element], T_src: OddTangentAlgebra, T_dst: OddTangentAlgebra) -> dict:
    """Images of the odd tangent morphism: ``x -> mu*(x)``, ``x' -> d mu*(x)``."""
    out = {}
    for name in T_src.base.names:
        img = images[name].embed(T_dst.table)
        out[name] = img
        out[T_src.dot(name)] = T_dst.d(img)
    return out


def pullback_commutes(images: dict[str, Element], T_src: OddTangentAlgebra, T_dst: OddTangentAlgebra) -> bool:
    """Check ``mu* o d = d o mu*`` on every generator of the source."""
    full = pushforward_images(images, T_src, T_dst)
    for g in T_src.table.gens():
        if substitute(T_src.d(g), full, T_dst.table) != T_dst.d(substitute(g, full, T_dst.table)):
            return False
    return True


RELATIONS = ("[d,d]=0", "[i_X,i_Y]=0", "[L_X,i_Y]=i_[X,Y]", "[L_X,L_Y]=L_[X,Y]", "[d,L_X]=0")


@dataclass(frozen=True)
class RelationResult:
    relation: str
    passed: bool
    witness: str | None = None


def _witness(lhs: Derivation, rhs: Derivation | None) -> str | None:
    diff = lhs if rhs is None else lhs - rhs
    for name, img in zip(diff.table.names, diff.images):
        if img:
            return f"on {name}: {img}"
    return None


def cartan_suite(
    X: Derivation,
    Y: Derivation,
    T: OddTangentAlgebra | None = None,
    iota: Callable | None = None,
) -> list[RelationResult]:
    """Check the five commutation relations for base vector fields ``X``, ``Y``.

    ``iota`` replaces the contraction operator, which lets tests confirm the
    suite notices a wrong one.
    """
    T = T or odd_tangent(X.table)
    iota = iota or contraction
    d = T.d
    iX, iY = iota(X, T), iota(Y, T)
    LX, LY = bracket(iX, d), bracket(iY, d)
    XY = bracket(X, Y)
    checks = [
        (bracket(d, d), None),
        (bracket(iX, iY), None),
        (bracket(LX, iY), iota(XY, T)),
        (bracket(LX, LY), bracket(iota(XY, T), d)),
        (bracket(d, LX), None),
    ]
    out = []
    for name, (lhs, rhs) in zip(RELATIONS, checks):
        w = _witness(lhs, rhs)
        out.append(RelationResult(name, w is None, w))
    return out


def random_vector_field(
    table: GeneratorTable,
    rng: random.Random,
    degree: int | None = None,
    max_length: int = 2,
    coeff_range: int = 3,
) -> Derivation:
    """A random homogeneous vector field with coefficients of length <= ``max_length``.

    ``degree`` defaults to a random choice among -1, 0, 1 and 2, so both
    parities show up.
    """
    if degree is None:
        degree = rng.choice((-1, 0, 1, 2))
    by_degree: dict[int, list] = {}
    for m in monomials_up_to(table, max_length):
        by_degree.setdefault(table.monomial_degree(m), []).append(m)
    images = {}
    for name, deg in table:
        choices = by_degree.get(deg + degree, [])
        img = table.zero()
        for m in choices:
            if rng.random() < 0.4:
                img = img + Element.monomial(table, m, rng.randint(-coeff_range, coeff_range))
        images[name] = img
    return Derivation(table, images, degree)
