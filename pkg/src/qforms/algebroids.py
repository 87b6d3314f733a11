"""Lie (super)algebroids in a global frame and their cochain differentials.

An algebroid over coordinates ``x^i`` is described by a frame of sections
``X_a`` of degrees ``p_a``, an anchor ``rho(X_a) = rho_a^i d/dx^i`` and
structure functions ``[X_a, X_b] = c_ab^e X_e``.  Cochains live in the free
algebra on the base coordinates and fibre coordinates ``lambda^a`` dual to
the frame, shifted so that ``|lambda^a| = 1 - p_a``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .derivations import Derivation, bracket, is_homological, square_witness
from .errors import DegreeMismatch, JacobiFailure, NotMorphic, ShapeError, ValidationError
from .gca import Element, GeneratorTable


def _sign(exponent: int) -> int:
    return -1 if exponent & 1 else 1


@dataclass(eq=False)
class StructureData:
    """Frame data of an algebroid.

    ``anchor[(a, name)]`` is the coefficient of d/d(name) in ``rho(X_a)``;
    ``structure[(a, b, e)]`` is ``c_ab^e``.  Both are elements over ``base``
    and missing keys mean zero.  Brackets are stored for every ordered pair.
    """

    base: GeneratorTable
    fibre: tuple[str, ...]
    frame_degrees: tuple[int, ...]
    anchor: dict = field(default_factory=dict)
    structure: dict = field(default_factory=dict)

    def __post_init__(self):
        self.fibre = tuple(self.fibre)
        self.frame_degrees = tuple(int(p) for p in self.frame_degrees)
        if len(self.fibre) != len(self.frame_degrees):
            raise ValueError("one frame degree per fibre coordinate")
        self.table = self.base.extend((n, 1 - p) for n, p in zip(self.fibre, self.frame_degrees))
        self.anchor = {k: v for k, v in self.anchor.items() if v}
        self.structure = {k: v for k, v in self.structure.items() if v}
        self._validate()

    @property
    def rank(self) -> int:
        return len(self.fibre)

    def _validate(self) -> None:
        p = self.frame_degrees
        for (a, name), f in self.anchor.items():
            if f.table != self.base:
                raise ValueError("anchor coefficients must live on the base")
            want = self.base.degree(name) + p[a]
            if f.degree() != want:
                raise DegreeMismatch(f"anchor rho_{a}^{name} = {f} should have degree {want}")
        for (a, b, e), f in self.structure.items():
            if f.table != self.base:
                raise ValueError("structure functions must live on the base")
            want = p[a] + p[b] - p[e]
            if f.degree() != want:
                raise DegreeMismatch(f"c_{a}{b}^{e} = {f} should have degree {want}")
            other = self.c(b, a, e)
            if other != -f * _sign(p[a] * p[b]):
                raise ValidationError(
                    "graded antisymmetry of structure functions", (a, b, e),
                )

    def c(self, a: int, b: int, e: int) -> Element:
        return self.structure.get((a, b, e)) or self.base.zero()

    def rho(self, a: int, name: str) -> Element:
        return self.anchor.get((a, name)) or self.base.zero()

    def fibre_gen(self, a: int) -> Element:
        return self.table.gen(self.fibre[a])

    # constructors

    @classmethod
    def from_brackets(
        cls,
        base: GeneratorTable,
        fibre: Sequence[str],
        frame_degrees: Sequence[int],
        anchor: Mapping | None = None,
        brackets: Mapping | None = None,
    ) -> "StructureData":
        """Fill in ``c_ba`` from ``c_ab`` by graded antisymmetry.

        ``brackets`` maps ``(a, b)`` to ``{e: coefficient}``; coefficients may
        be scalars or base elements.
        """
        p = [int(x) for x in frame_degrees]
        struct: dict = {}
        for (a, b), coeffs in (brackets or {}).items():
            for e, v in coeffs.items():
                v = _as_element(base, v)
                if not v:
                    continue
                for key, val in (((a, b, e), v), ((b, a, e), -v * _sign(p[a] * p[b]))):
                    if key in struct and struct[key] != val:
                        raise ValidationError("graded antisymmetry of structure functions", key)
                    struct[key] = val
        anc = {k: _as_element(base, v) for k, v in (anchor or {}).items()}
        return cls(base, tuple(fibre), tuple(p), anc, struct)

    @classmethod
    def lie_algebra(
        cls,
        brackets: Mapping,
        dim: int,
        fibre: Sequence[str] | None = None,
        degrees: Sequence[int] | None = None,
    ) -> "StructureData":
        """A Lie (super)algebra as an algebroid over a point."""
        fibre = tuple(fibre) if fibre else tuple(f"th{k + 1}" for k in range(dim))
        degrees = tuple(degrees) if degrees else (0,) * dim
        return cls.from_brackets(GeneratorTable([]), fibre, degrees, None, brackets)

    @classmethod
    def tangent(cls, base: GeneratorTable, fibre: Sequence[str] | None = None) -> "StructureData":
        """The tangent algebroid: frame d/dx^i, anchor identity, zero bracket."""
        fibre = tuple(fibre) if fibre else tuple(n + "'" for n in base.names)
        degrees = tuple(-d for d in base.degrees)
        anchor = {(a, n): base.one() for a, n in enumerate(base.names)}
        return cls(base, fibre, degrees, anchor, {})

    @classmethod
    def action(
        cls,
        algebra: "StructureData",
        base: GeneratorTable,
        fields: Sequence[Derivation],
        fibre: Sequence[str] | None = None,
    ) -> "StructureData":
        """The action algebroid ``base x g`` for ``v_a -> fields[a]``."""
        if algebra.base.names:
            raise ValueError("the acting algebra must live over a point")
        if len(fields) != algebra.rank:
            raise ValueError("one vector field per basis element")
        anchor = {}
        for a, X in enumerate(fields):
            if X.table != base:
                raise ValueError("action vector fields must act on the base")
            for name, img in zip(base.names, X.images):
                if img:
                    anchor[(a, name)] = img
        struct = {k: base.scalar(v.constant_term()) for k, v in algebra.structure.items()}
        return cls(base, tuple(fibre) if fibre else algebra.fibre, algebra.frame_degrees, anchor, struct)

    def is_constant(self) -> bool:
        return all(v.max_length() == 0 for v in self.structure.values())

    def constants(self) -> dict:
        """``{(a, b, e): Fraction}`` for constant structure functions."""
        if not self.is_constant():
            raise ShapeError("structure functions are not constant")
        return {k: v.constant_term() for k, v in self.structure.items()}

    def anchor_field(self, a: int) -> Derivation:
        """``rho(X_a)`` as a derivation of the base algebra."""
        return Derivation(self.base, {n: self.rho(a, n) for n in self.base.names}, self.frame_degrees[a])


def _as_element(table: GeneratorTable, v) -> Element:
    if isinstance(v, Element):
        return v if v.table == table else v.embed(table)
    return table.scalar(Fraction(v))


@dataclass(frozen=True)
class Section:
    """``X = sum_a coefficients[a] X_a`` with coefficients over the base."""

    coefficients: tuple
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def __add__(self, other: "Section") -> "Section":
        return Section(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)), self.degree)

    def __sub__(self, other: "Section") -> "Section":
        return Section(tuple(a - b for a, b in zip(self.coefficients, other.coefficients)), self.degree)

    def __rmul__(self, f) -> "Section":
        if isinstance(f, Element):
            return Section(tuple(f * a for a in self.coefficients), self.degree + (f.degree() or 0))
        return Section(tuple(a * f for a in self.coefficients), self.degree)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Section):
            return NotImplemented
        if self.coefficients != other.coefficients:
            return False
        return self.degree == other.degree or self.is_zero()

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __str__(self) -> str:
        parts = [f"({c})*X{a + 1}" for a, c in enumerate(self.coefficients) if c]
        return " + ".join(parts) or "0"


def frame_section(S: StructureData, a: int) -> Section:
    coeffs = [S.base.one() if b == a else S.base.zero() for b in range(S.rank)]
    return Section(tuple(coeffs), S.frame_degrees[a])


def make_section(S: StructureData, coefficients: Sequence, degree: int | None = None) -> Section:
    coeffs = tuple(_as_element(S.base, c) for c in coefficients)
    if len(coeffs) != S.rank:
        raise ValueError("one coefficient per frame element")
    found = None
    for a, f in enumerate(coeffs):
        d = f.degree()
        if d is None:
            continue
        if found is None:
            found = d + S.frame_degrees[a]
        elif d + S.frame_degrees[a] != found:
            raise DegreeMismatch(f"section coefficients are not homogeneous: {coeffs}")
    if degree is None:
        degree = found if found is not None else 0
    elif found is not None and found != degree:
        raise DegreeMismatch(f"section has degree {found}, not {degree}")
    return Section(coeffs, degree)


def build_differential(S: StructureData) -> Derivation:
    """``d_A = lambda^a rho_a^i d/dx^i - (-1)^{p_a(p_b-1)} 1/2 lambda^a lambda^b c_ab^e d/dlambda^e``."""
    T = S.table
    p = S.frame_degrees
    lam = [S.fibre_gen(a) for a in range(S.rank)]
    images: dict[str, Element] = {}
    for name in S.base.names:
        img = T.zero()
        for a in range(S.rank):
            f = S.rho(a, name)
            if f:
                img = img + lam[a] * f.embed(T)
        images[name] = img
    half = Fraction(1, 2)
    for e in range(S.rank):
        img = T.zero()
        for a, b in product(range(S.rank), repeat=2):
            f = S.structure.get((a, b, e))
            if f:
                img = img - lam[a] * lam[b] * f.embed(T) * (half * _sign(p[a] * (p[b] - 1)))
        images[S.fibre[e]] = img
    return Derivation(T, images, 1)


def check_jacobi(S: StructureData) -> bool:
    return is_homological(build_differential(S))


def section_bracket_direct(S: StructureData, X: Section, Y: Section) -> Section:
    """``[X, Y]`` from the frame brackets, the anchor and the Leibniz rule.

    ``[f X_a, g X_b] = f rho_a(g) X_b + (-1)^{p_a |g|} f g c_ab^e X_e
    - (-1)^{|X||Y|} g rho_b(f) X_a``.
    """
    B = S.base
    p = S.frame_degrees
    out = [B.zero() for _ in range(S.rank)]
    for a, f in enumerate(X.coefficients):
        if not f:
            continue
        for b, g in enumerate(Y.coefficients):
            if not g:
                continue
            gd = g.degree() or 0
            # f X_a (g X_b) = f (rho_a(g) X_b + (-1)^{p_a|g|} g [X_a, X_b])
            out[b] = out[b] + f * S.anchor_field(a)(g)
            for e in range(S.rank):
                c = S.c(a, b, e)
                if c:
                    out[e] = out[e] + f * g * c * _sign(p[a] * gd)
            # - (-1)^{|X||Y|} g X_b (f) X_a, rewritten with f on the left
            t = g * S.anchor_field(b)(f)
            out[a] = out[a] - t * _sign(X.degree * Y.degree)
    return make_section(S, out, X.degree + Y.degree)


def jacobiator(S: StructureData, a: int, b: int, e: int) -> Section:
    """``[X_a,[X_b,X_e]] - [[X_a,X_b],X_e] - (-1)^{p_a p_b}[X_b,[X_a,X_e]]``."""
    Xa, Xb, Xe = (frame_section(S, k) for k in (a, b, e))
    br = lambda U, V: section_bracket_direct(S, U, V)  # noqa: E731
    sign = _sign(S.frame_degrees[a] * S.frame_degrees[b])
    first = br(Xa, br(Xb, Xe))
    second = br(br(Xa, Xb), Xe)
    third = br(Xb, br(Xa, Xe))
    coeffs = [f - g - h * sign for f, g, h in zip(first.coefficients, second.coefficients, third.coefficients)]
    return make_section(S, coeffs)


def jacobi_witness(S: StructureData):
    """First frame triple violating Jacobi, or pair violating the anchor identity.

    Returns ``None`` when ``d_A`` squares to zero.
    """
    D = build_differential(S)
    bad = square_witness(D)
    if bad is None:
        return None
    n = S.rank
    for a, b, e in product(range(n), repeat=3):
        J = jacobiator(S, a, b, e)
        if not J.is_zero():
            return ("jacobi", (a, b, e), str(J))
    for a, b in product(range(n), repeat=2):
        lhs = anchor_of(S, section_bracket_direct(S, frame_section(S, a), frame_section(S, b)))
        rhs = bracket(S.anchor_field(a), S.anchor_field(b))
        if lhs != rhs:
            return ("anchor", (a, b), str(lhs - rhs))
    return ("square", bad[0], str(bad[1]))


def require_jacobi(S: StructureData) -> None:
    w = jacobi_witness(S)
    if w is not None:
        where = w[1] if w[0] == "square" else ", ".join(S.fibre[k] for k in w[1])
        raise JacobiFailure(
            f"{w[0]} identity", w[1], f"d_A does not square to zero; {w[0]} identity fails at ({where}) with value {w[2]}"
        )


def extract_structure(
    D: Derivation,
    base: Sequence[str] | int,
    fibre: Sequence[str] | int | None = None,
) -> StructureData:
    """Read anchor and structure functions off a degree-1 derivation.

    ``base``/``fibre`` name the coordinates; integers mean "the first
    ``base`` generators are base coordinates and the next ``fibre`` are
    fibre coordinates".
    """
    T = D.table
    if isinstance(base, int):
        nb = base
        nf = len(T) - nb if fibre is None else int(fibre)
        base_names = T.names[:nb]
        fibre_names = T.names[nb:nb + nf]
    else:
        base_names = tuple(base)
        fibre_names = tuple(fibre) if fibre is not None else tuple(n for n in T.names if n not in base_names)
    if set(base_names) | set(fibre_names) != set(T.names):
        raise ShapeError("base and fibre coordinates must cover every generator")
    if D.degree != 1 and not D.is_zero():
        raise ShapeError(f"an algebroid differential has degree 1, not {D.degree}")
    B = GeneratorTable((n, T.degree(n)) for n in base_names)
    p = tuple(1 - T.degree(n) for n in fibre_names)
    fibre_idx = {T.index(n) for n in fibre_names}

    def fibre_length(m) -> int:
        return sum(e for i, e in m if i in fibre_idx)

    partials = [Derivation.partial(T, n) for n in fibre_names]
    anchor = {}
    for name in base_names:
        img = D.image(name)
        if any(fibre_length(m) != 1 for m in img.terms):
            raise ShapeError(f"image of base coordinate {name} is not linear in the fibre: {img}")
        for a, da in enumerate(partials):
            f = da(img)
            if f:
                anchor[(a, name)] = _to_base(f, B)
    struct = {}
    for e, name in enumerate(fibre_names):
        img = D.image(name)
        if any(fibre_length(m) != 2 for m in img.terms):
            raise ShapeError(f"image of fibre coordinate {name} is not quadratic in the fibre: {img}")
        for a in range(len(fibre_names)):
            for b in range(a, len(fibre_names)):
                f = partials[b](partials[a](img))
                if f:
                    c = -_to_base(f, B) * _sign(p[a] * (p[b] - 1))
                    struct[(a, b, e)] = c
                    if a != b:
                        struct[(b, a, e)] = -c * _sign(p[a] * p[b])
    return StructureData(B, fibre_names, p, anchor, struct)


def _to_base(f: Element, B: GeneratorTable) -> Element:
    names = f.table.names
    out = B.zero()
    for m, c in f.terms.items():
        term = B.scalar(c)
        for i, e in m:
            term = term * B.gen(names[i]) ** e
        out = out + term
    return out


def section_contraction(X: Section, S: StructureData) -> Derivation:
    """``iota_X = f^a d/dlambda^a``, a derivation of degree ``|X| - 1``."""
    T = S.table
    images = {S.fibre[a]: f.embed(T) for a, f in enumerate(X.coefficients) if f}
    return Derivation(T, images, X.degree - 1)


def read_contraction(D: Derivation, S: StructureData) -> Section:
    """The section ``X`` with ``iota_X = D``; ShapeError if ``D`` is not of that form."""
    T = S.table
    fibre_idx = {T.index(n) for n in S.fibre}
    for name in S.base.names:
        if D.image(name):
            raise ShapeError(f"not a contraction: {name} -> {D.image(name)}")
    coeffs = []
    for name in S.fibre:
        img = D.image(name)
        if any(i in fibre_idx for m in img.terms for i, _ in m):
            raise ShapeError(f"not a contraction: {name} -> {img}")
        coeffs.append(_to_base(img, S.base))
    return make_section(S, coeffs, D.degree + 1)


def anchor_of(S: StructureData, X: Section, d_A: Derivation | None = None) -> Derivation:
    """``rho(X)`` recovered as ``[iota_X, d_A]`` on base functions."""
    d_A = d_A or build_differential(S)
    L = bracket(section_contraction(X, S), d_A)
    images = {}
    for name in S.base.names:
        img = L.image(name)
        images[name] = _to_base(img, S.base) if img else S.base.zero()
        if img and any(S.table.names[i] in S.fibre for m in img.terms for i, _ in m):
            raise ShapeError(f"anchor image of {name} depends on the fibre")
    return Derivation(S.base, images, X.degree)


def section_bracket(S: StructureData, X: Section, Y: Section, d_A: Derivation | None = None) -> Section:
    """``[X, Y]`` from the derived bracket ``iota_[X,Y] = [[iota_X, d_A], iota_Y]``."""
    d_A = d_A or build_differential(S)
    inner = bracket(section_contraction(X, S), d_A)
    return read_contraction(bracket(inner, section_contraction(Y, S)), S)


def is_linear(Xi: Derivation, S: StructureData) -> bool:
    T = Xi.table
    fibre_idx = {T.index(n) for n in S.fibre}
    for name, img in zip(T.names, Xi.images):
        want = 1 if name in S.fibre else 0
        for m in img.terms:
            if sum(e for i, e in m if i in fibre_idx) != want:
                return False
    return True


def morphic_action(Xi: Derivation, X: Section, S: StructureData, d_A: Derivation | None = None) -> Section:
    """The section ``D_Xi X`` defined by ``iota_{D_Xi X} = [Xi, iota_X]``."""
    if Xi.table != S.table:
        raise ShapeError("Xi must act on the cochain algebra of S")
    if not is_linear(Xi, S):
        raise ShapeError("Xi is not a linear vector field")
    d_A = d_A or build_differential(S)
    defect = bracket(Xi, d_A)
    if not defect.is_zero():
        name = next(n for n, img in zip(defect.table.names, defect.images) if img)
        raise NotMorphic("[Xi, d_A] = 0", (name, str(defect.image(name))))
    return read_contraction(bracket(Xi, section_contraction(X, S)), S)


def base_field(Xi: Derivation, S: StructureData) -> Derivation:
    """The base vector field of a linear vector field."""
    return Derivation(S.base, {n: _to_base(Xi.image(n), S.base) for n in S.base.names}, Xi.degree)
