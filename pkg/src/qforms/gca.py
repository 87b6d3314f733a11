"""Free graded-commutative algebras with exact rational coefficients.

A :class:`GeneratorTable` fixes an ordered list of named generators with
integer degrees.  Parity is always ``degree % 2``: odd generators
anticommute and square to zero, even generators are polynomial variables.

Monomials are tuples of ``(generator index, exponent)`` pairs sorted by
index.  The product of two monomials is reordered into this canonical form
and picks up the sign of the permutation of odd factors.
"""
from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import DegreeMismatch, InfiniteBasis, MismatchedAlgebra

Monomial = tuple  # tuple[tuple[int, int], ...]
Scalar = Union[int, Fraction]

ONE: Monomial = ()


class GeneratorTable:
    """Ordered generators ``(name, degree)``; compared by value."""

    __slots__ = ("names", "degrees", "parities", "_index", "_hash")

    def __init__(self, generators: Iterable[tuple[str, int]]):
        gens = [(str(n), int(d)) for n, d in generators]
        self.names: tuple[str, ...] = tuple(n for n, _ in gens)
        self.degrees: tuple[int, ...] = tuple(d for _, d in gens)
        self.parities: tuple[int, ...] = tuple(d % 2 for d in self.degrees)
        self._index = {n: i for i, n in enumerate(self.names)}
        if len(self._index) != len(self.names):
            raise ValueError(f"duplicate generator names in {self.names}")
        self._hash = hash((self.names, self.degrees))

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[tuple[str, int]]:
        return iter(zip(self.names, self.degrees))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, GeneratorTable):
            return NotImplemented
        return self._hash == other._hash and self.names == other.names and self.degrees == other.degrees

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{n}:{d}" for n, d in self)
        return f"GeneratorTable({body})"

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no generator named {name!r} in {self!r}") from None

    def degree(self, name: str) -> int:
        return self.degrees[self.index(name)]

    def gen(self, name: str) -> "Element":
        return Element(self, {((self.index(name), 1),): Fraction(1)})

    def gens(self) -> list["Element"]:
        return [Element(self, {((i, 1),): Fraction(1)}) for i in range(len(self))]

    def one(self) -> "Element":
        return Element(self, {ONE: Fraction(1)})

    def zero(self) -> "Element":
        return Element(self, {})

    def scalar(self, c: Scalar) -> "Element":
        return Element(self, {ONE: Fraction(c)}) if c else Element(self, {})

    def extend(self, generators: Iterable[tuple[str, int]]) -> "GeneratorTable":
        return GeneratorTable(list(self) + list(generators))

    def monomial_degree(self, m: Monomial) -> int:
        degs = self.degrees
        return sum(degs[i] * e for i, e in m)


def _check_same(a: GeneratorTable, b: GeneratorTable) -> None:
    if a is not b and a != b:
        raise MismatchedAlgebra(f"{a!r} vs {b!r}")


def mul_monomials(parities: Sequence[int], a: Monomial, b: Monomial) -> tuple[int, Monomial]:
    """Return ``(sign, m)`` with ``a*b = sign*m``; sign 0 when an odd square appears."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    odd_a = [i for i, _ in a if parities[i]]
    odd_b = [i for i, _ in b if parities[i]]
    sign = 1
    if odd_a and odd_b:
        inversions = 0
        for j in odd_b:
            # odd factors of a sitting to the right of j in canonical order
            k = bisect_right(odd_a, j)
            if k and odd_a[k - 1] == j:
                return 0, ONE
            inversions += len(odd_a) - k
        if inversions & 1:
            sign = -1
    exps = dict(a)
    for i, e in b:
        exps[i] = exps.get(i, 0) + e
    return sign, tuple(sorted(exps.items()))


class Element:
    """An element of the free graded-commutative algebra on ``table``."""

    __slots__ = ("table", "terms")

    def __init__(self, table: GeneratorTable, terms: Mapping[Monomial, Scalar] | None = None):
        self.table = table
        self.terms: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[m] = c if isinstance(c, Fraction) else Fraction(c)

    @classmethod
    def _raw(cls, table: GeneratorTable, terms: dict) -> "Element":
        e = object.__new__(cls)
        e.table = table
        e.terms = terms
        return e

    @classmethod
    def monomial(cls, table: GeneratorTable, m: Monomial, coeff: Scalar = 1) -> "Element":
        return cls(table, {tuple(m): coeff})

    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            _check_same(self.table, other.table)
            return other
        if isinstance(other, (int, Fraction)):
            return self.table.scalar(other)
        return NotImplemented

    # arithmetic
    def __add__(self, other) -> "Element":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            v = terms.get(m, 0) + c
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
        return Element._raw(self.table, terms)

    __radd__ = __add__

    def __neg__(self) -> "Element":
        return Element._raw(self.table, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Element":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Element":
        return (-self) + other

    def __mul__(self, other) -> "Element":
        if isinstance(other, (int, Fraction)):
            if not other:
                return Element._raw(self.table, {})
            return Element._raw(self.table, {m: c * other for m, c in self.terms.items()})
        if not isinstance(other, Element):
            return NotImplemented
        _check_same(self.table, other.table)
        par = self.table.parities
        terms: dict[Monomial, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                s, m = mul_monomials(par, ma, mb)
                if not s:
                    continue
                v = terms.get(m, 0) + (ca * cb if s > 0 else -ca * cb)
                if v:
                    terms[m] = v
                else:
                    del terms[m]
        return Element._raw(self.table, terms)

    def __rmul__(self, other) -> "Element":
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __truediv__(self, other: Scalar) -> "Element":
        return self * (1 / Fraction(other))

    def __pow__(self, n: int) -> "Element":
        if n < 0:
            raise ValueError("negative power")
        out = self.table.one()
        for _ in range(n):
            out = out * self
        return out

    # comparison
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.terms == ({ONE: other} if other else {})
        if not isinstance(other, Element):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.table, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # inspection
    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(tuple(m), Fraction(0))

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items())

    def degree_components(self) -> dict[int, "Element"]:
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            out.setdefault(self.table.monomial_degree(m), {})[m] = c
        return {d: Element._raw(self.table, t) for d, t in sorted(out.items())}

    def degree(self) -> int | None:
        """Degree of a homogeneous element; None for zero; raises if inhomogeneous."""
        degs = {self.table.monomial_degree(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise DegreeMismatch(f"inhomogeneous element {self} has degrees {sorted(degs)}")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        return len({self.table.monomial_degree(m) for m in self.terms}) <= 1

    def max_length(self) -> int:
        """Largest number of generator factors in a monomial (-1 for zero)."""
        return max((sum(e for _, e in m) for m in self.terms), default=-1)

    def constant_term(self) -> Fraction:
        return self.terms.get(ONE, Fraction(0))

    def embed(self, table: GeneratorTable) -> "Element":
        """The same expression read in ``table``, matching generators by name."""
        if table == self.table:
            return self
        idx = [table.index(n) for n in self.table.names]
        for i, d in enumerate(self.table.degrees):
            if table.degrees[idx[i]] != d:
                raise DegreeMismatch(f"generator {self.table.names[i]} changes degree")
        if all(a < b for a, b in zip(idx, idx[1:])):
            # order-preserving inclusion keeps monomials canonical
            return Element._raw(
                table, {tuple((idx[i], e) for i, e in m): c for m, c in self.terms.items()}
            )
        out = table.zero()
        for m, c in self.terms.items():
            term = table.scalar(c)
            for i, e in m:
                term = term * table.gen(self.table.names[i]) ** e
            out = out + term
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            word = "*".join(
                self.table.names[i] + (f"^{e}" if e > 1 else "") for i, e in m
            )
            if not word:
                parts.append(str(c))
            elif c == 1:
                parts.append(word)
            elif c == -1:
                parts.append("-" + word)
            else:
                parts.append(f"{c}*{word}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Element({self})"


def add(a: Element, b: Element) -> Element:
    return a + b


def mul(a: Element, b: Element) -> Element:
    return a * b


def degree_components(a: Element) -> dict[int, Element]:
    return a.degree_components()


def substitute(a: Element, images: Mapping[str, Element], target: GeneratorTable | None = None) -> Element:
    """Apply the algebra morphism sending each generator to its image.

    ``images`` is keyed by generator name of ``a.table``.  Generators left
    out go to the same-named generator of ``target`` (default: the images'
    table, or ``a.table``).  Each image must be homogeneous of the degree of
    its generator, or zero.
    """
    src = a.table
    if target is None:
        target = next(iter(images.values())).table if images else src
    gen_images: list[Element] = []
    for i, name in enumerate(src.names):
        img = images.get(name)
        if img is None:
            img = target.gen(name)
            if target.degrees[target.index(name)] != src.degrees[i]:
                raise DegreeMismatch(f"generator {name} changes degree")
        else:
            _check_same(img.table, target)
            d = img.degree()
            if d is not None and d != src.degrees[i]:
                raise DegreeMismatch(f"image of {name} has degree {d}, expected {src.degrees[i]}")
        gen_images.append(img)
    unknown = set(images) - set(src.names)
    if unknown:
        raise KeyError(f"unknown generators {sorted(unknown)}")
    powers: dict[tuple[int, int], Element] = {}

    def power(i: int, e: int) -> Element:
        key = (i, e)
        if key not in powers:
            powers[key] = gen_images[i] if e == 1 else power(i, e - 1) * gen_images[i]
        return powers[key]

    out = target.zero()
    for m, c in a.sorted_terms():
        term = target.scalar(c)
        for i, e in m:
            term = term * power(i, e)
            if not term:
                break
        out = out + term
    return out


def basis(
    table: GeneratorTable,
    degree: int,
    weight: tuple[Mapping[str, int], int] | None = None,
) -> list[Monomial]:
    """All monomials of ``degree`` (and weight, if given), in lexicographic order.

    ``weight`` is ``(assignment, value)`` where ``assignment`` maps generator
    names to nonnegative integer weights (missing names weigh 0).
    """
    n = len(table)
    degs = table.degrees
    par = table.parities
    if weight is None:
        if any(d <= 0 for d in degs):
            raise InfiniteBasis("generators of degree <= 0 need a weight assignment")
        wts = [0] * n
        wcap = None
    else:
        assignment, wcap = weight
        unknown = set(assignment) - set(table.names)
        if unknown:
            raise KeyError(f"weight assignment names unknown generators {sorted(unknown)}")
        wts = [int(assignment.get(name, 0)) for name in table.names]
        if any(w < 0 for w in wts):
            raise InfiniteBasis("weights must be nonnegative")
        bad = [table.names[i] for i in range(n) if degs[i] <= 0 and wts[i] <= 0]
        if bad:
            raise InfiniteBasis(f"generators {bad} have degree <= 0 and no positive weight")
        if wcap < 0:
            return []

    # Upper bound on the exponent of each generator.
    neg_budget = 0
    if wcap is not None:
        neg_budget = sum(-degs[i] * (wcap // wts[i]) for i in range(n) if degs[i] < 0)
    caps = []
    for i in range(n):
        if par[i]:
            caps.append(1)
        elif wts[i] > 0:
            caps.append(wcap // wts[i])
        else:
            caps.append(max(0, (degree + neg_budget) // degs[i]))

    # Remaining reachable degree range from position i onward, for pruning.
    lo = [0] * (n + 1)
    hi = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        span = degs[i] * caps[i]
        lo[i] = lo[i + 1] + min(0, span)
        hi[i] = hi[i + 1] + max(0, span)

    out: list[Monomial] = []

    def rec(i: int, deg_left: int, w_left: int | None, acc: list) -> None:
        if i == n:
            if deg_left == 0 and (w_left is None or w_left == 0):
                out.append(tuple(acc))
            return
        if not (lo[i] <= deg_left <= hi[i]):
            return
        top = caps[i]
        if w_left is not None and wts[i] > 0:
            top = min(top, w_left // wts[i])
        for e in range(top + 1):
            nw = None if w_left is None else w_left - e * wts[i]
            if e:
                acc.append((i, e))
            rec(i + 1, deg_left - e * degs[i], nw, acc)
            if e:
                acc.pop()

    rec(0, degree, wcap, [])
    out.sort()
    return out


def monomials_up_to(table: GeneratorTable, length: int) -> list[Monomial]:
    """Every monomial with at most ``length`` generator factors (sorted)."""
    n = len(table)
    out: list[Monomial] = []

    def rec(i: int, left: int, acc: list) -> None:
        if i == n:
            out.append(tuple(acc))
            return
        top = min(left, 1) if table.parities[i] else left
        for e in range(top + 1):
            if e:
                acc.append((i, e))
            rec(i + 1, left - e, acc)
            if e:
                acc.pop()

    rec(0, length, [])
    out.sort()
    return out
