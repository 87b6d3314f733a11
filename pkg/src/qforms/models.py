"""Named differentials: Weil, BRST, Cartan model, the conjugation identity,
Lie bialgebra doubles, equivariant algebroid (Ginzburg) complexes and
twisted algebroids.

Every builder assembles its differential from the primitives in
``derivations``, ``algebroids`` and ``cartan`` and checks that the result
squares to zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebroids import (
    Section,
    StructureData,
    base_field,
    build_differential,
    frame_section,
    morphic_action,
    require_jacobi,
    section_bracket,
    section_contraction,
)
from .cartan import OddTangentAlgebra, contraction, lie_derivative, odd_tangent
from .cohomology import ComplexSpec
from .derivations import Derivation, bracket, conjugate, is_homological, square_witness
from .errors import NotAnAction, NotMorphic, ShapeError, ValidationError
from .gca import GeneratorTable


def _require_homological(D: Derivation, what: str) -> None:
    if not is_homological(D):
        raise ValidationError(f"{what} squares to zero", square_witness(D))


def _require_lie_algebra(g: StructureData) -> None:
    if g.base.names:
        raise ShapeError("expected a Lie algebra (an algebroid over a point)")
    if any(p != 0 for p in g.frame_degrees):
        raise ShapeError("expected an ordinary Lie algebra (all frame degrees 0)")
    require_jacobi(g)


# Weil algebra


@dataclass(eq=False)
class WeilAlgebra:
    g: StructureData
    tangent: OddTangentAlgebra
    d_K: Derivation
    d_g: Derivation
    d_W: Derivation

    @property
    def table(self) -> GeneratorTable:
        return self.tangent.table

    @property
    def contractions(self) -> list[Derivation]:
        return [Derivation.partial(self.table, n) for n in self.g.fibre]

    @property
    def invariance(self) -> list[Derivation]:
        return [bracket(I, self.d_W) for I in self.contractions]

    def spec(self, window: tuple[int, int]) -> ComplexSpec:
        return ComplexSpec(self.table, self.d_W, window)


def tangent_lie_differential(g: StructureData, T: OddTangentAlgebra) -> Derivation:
    """``-1/2 c_ij^k th^i th^j d/dth^k - c_ij^k th^i th'^j d/dth'^k``."""
    tab = T.table
    th = [tab.gen(n) for n in g.fibre]
    thd = [tab.gen(T.dot(n)) for n in g.fibre]
    images = {n: tab.zero() for n in tab.names}
    for (i, j, k), c in g.constants().items():
        k_name = g.fibre[k]
        images[k_name] = images[k_name] - th[i] * th[j] * (c / 2)
        images[T.dot(k_name)] = images[T.dot(k_name)] - th[i] * thd[j] * c
    return Derivation(tab, images, 1)


def weil(g: StructureData) -> WeilAlgebra:
    _require_lie_algebra(g)
    T = odd_tangent(g.table)
    d_g = tangent_lie_differential(g, T)
    d_W = d_g + T.d
    _require_homological(d_W, "Weil differential")
    return WeilAlgebra(g, T, T.d, d_g, d_W)


def tangent_lie_structure(g: StructureData) -> StructureData:
    """Frame data of ``[-1]Tg``: complete lifts (degree 0) then minus vertical lifts (degree -1)."""
    _require_lie_algebra(g)
    n = g.rank
    fibre = tuple(g.fibre) + tuple(nm + "'" for nm in g.fibre)
    brackets: dict = {}
    for (a, b, e), c in g.constants().items():
        brackets.setdefault((a, b), {})[e] = c
        # [X^C_a, -X^V_b] = c_ab^e (-X^V_e)
        brackets.setdefault((a, n + b), {})[n + e] = c
    return StructureData.from_brackets(GeneratorTable([]), fibre, (0,) * n + (-1,) * n, None, brackets)


# BRST model


@dataclass(eq=False)
class BRSTComplex:
    g: StructureData
    base: GeneratorTable
    fields: tuple[Derivation, ...]
    algebroid: StructureData
    tangent: OddTangentAlgebra
    D_B: Derivation
    weil: WeilAlgebra

    @property
    def table(self) -> GeneratorTable:
        return self.tangent.table

    @property
    def weights(self) -> dict[str, int]:
        """Polynomial degree in the base coordinates and their differentials."""
        out = {n: 0 for n in self.table.names}
        for n in self.base.names:
            out[n] = 1
            out[self.tangent.dot(n)] = 1
        return out

    @property
    def contractions(self) -> list[Derivation]:
        return [Derivation.partial(self.table, n) for n in self.g.fibre]

    def spec(self, window: tuple[int, int], weight: int | None = None) -> ComplexSpec:
        w = None if weight is None else (self.weights, weight)
        return ComplexSpec(self.table, self.D_B, window, w)


def check_action(g: StructureData, fields: Sequence[Derivation]) -> None:
    """``[rho(v_i), rho(v_j)] = c_ij^k rho(v_k)`` for every pair."""
    consts = g.constants()
    for i in range(g.rank):
        for j in range(i, g.rank):
            lhs = bracket(fields[i], fields[j])
            rhs = Derivation.zero(lhs.table, lhs.degree)
            for k in range(g.rank):
                c = consts.get((i, j, k))
                if c:
                    rhs = rhs + fields[k] * c
            if lhs != rhs:
                raise NotAnAction(
                    "action is a Lie algebra homomorphism",
                    (i, j),
                    f"action is not a Lie algebra homomorphism at ({i}, {j}): defect {lhs - rhs}",
                )


def brst(g: StructureData, base: GeneratorTable, fields: Sequence[Derivation]) -> BRSTComplex:
    """``D_B = d_M + d_W + th^i L_{rho(v_i)} - th'^i iota_{rho(v_i)}``.

    The algebra is the odd tangent of ``base x [-1]g``, so generators come in
    the order base, fibre, dotted base, dotted fibre.
    """
    _require_lie_algebra(g)
    fields = tuple(fields)
    if len(fields) != g.rank:
        raise ValueError("one vector field per basis element")
    if any(X.degree != 0 for X in fields if not X.is_zero()):
        raise ShapeError("action vector fields have degree 0")
    check_action(g, fields)
    A = StructureData.action(g, base, fields)
    T = odd_tangent(A.table)
    W = weil(g)
    M = odd_tangent(base)
    d_M = M.d.extend(T.table)
    D = d_M + W.d_W.extend(T.table)
    for i, X in enumerate(fields):
        th = T.table.gen(g.fibre[i])
        thd = T.table.gen(T.dot(g.fibre[i]))
        D = D + th * lie_derivative(X, M).extend(T.table)
        D = D - thd * contraction(X, M).extend(T.table)
    _require_homological(D, "BRST differential")
    return BRSTComplex(g, base, fields, A, T, D, W)


# conjugation identity


def mqk_pair(d_A: Derivation, T: OddTangentAlgebra | None = None) -> tuple[Derivation, Derivation]:
    """``(exp(ad iota_{d_A}) d, d + L_{d_A})`` on the odd tangent of ``d_A``'s algebra."""
    _require_homological(d_A, "algebroid differential")
    T = T or odd_tangent(d_A.table)
    iota = contraction(d_A, T)
    return conjugate(T.d, iota), T.d + bracket(iota, T.d)


def mqk(b: BRSTComplex) -> tuple[Derivation, Derivation]:
    return mqk_pair(build_differential(b.algebroid), b.tangent)


# Cartan model


def horizontal_table(b: BRSTComplex) -> GeneratorTable:
    return GeneratorTable((n, d) for n, d in b.table if n not in b.g.fibre)


def cartan_model(
    b: BRSTComplex, window: tuple[int, int], weight: int | None = None
) -> ComplexSpec:
    """``d_C = d_M - th'^i iota_{rho(v_i)}`` on forms with values in S(g*),
    restricted to the kernel of ``L_i = -th'^j c_ij^k d/dth'^k + L_{rho(v_i)}``."""
    H = horizontal_table(b)
    M = odd_tangent(b.base)
    g = b.g
    d_C = M.d.extend(H)
    for i, X in enumerate(b.fields):
        d_C = d_C - H.gen(g.fibre[i] + "'") * contraction(X, M).extend(H)
    ann = []
    consts = g.constants()
    for i, X in enumerate(b.fields):
        L = lie_derivative(X, M).extend(H)
        images = {n: H.zero() for n in H.names}
        for (a, j, k), c in consts.items():
            if a == i:
                kn = g.fibre[k] + "'"
                images[kn] = images[kn] - H.gen(g.fibre[j] + "'") * c
        ann.append(L + Derivation(H, images, 0))
    w = None if weight is None else ({n: b.weights[n] for n in H.names}, weight)
    return ComplexSpec(H, d_C, window, w, ann)


# Lie bialgebra doubles


@dataclass(eq=False)
class BialgebraDouble:
    c: StructureData
    gamma: StructureData
    table: GeneratorTable
    d: Derivation
    Xi: Derivation
    compatible: bool
    homological: bool
    witness: str | None

    @property
    def total(self) -> Derivation:
        return self.d + self.Xi


def _coadjoint_differential(c: StructureData, table: GeneratorTable, th: Sequence[str], v: Sequence[str]) -> Derivation:
    """``th^i c_ij^k v_k d/dv_j - 1/2 th^i th^j c_ij^k d/dth^k``."""
    images = {n: table.zero() for n in table.names}
    T = [table.gen(n) for n in th]
    V = [table.gen(n) for n in v]
    for (i, j, k), val in c.constants().items():
        images[v[j]] = images[v[j]] + T[i] * V[k] * val
        images[th[k]] = images[th[k]] - T[i] * T[j] * (val / 2)
    return Derivation(table, images, 1)


def bialgebra_double(
    c: StructureData,
    gamma: StructureData,
    theta_names: Sequence[str] | None = None,
    v_names: Sequence[str] | None = None,
) -> BialgebraDouble:
    """Differentials ``d`` (from the bracket of g) and ``Xi`` (from the bracket of g*)
    on the algebra with generators ``th^i`` and ``v_i``, all of degree 1."""
    _require_lie_algebra(c)
    _require_lie_algebra(gamma)
    n = c.rank
    if gamma.rank != n:
        raise ShapeError("g and g* must have the same dimension")
    th = tuple(theta_names or (f"th{k + 1}" for k in range(n)))
    v = tuple(v_names or (f"v{k + 1}" for k in range(n)))
    table = GeneratorTable([(x, 1) for x in th] + [(x, 1) for x in v])
    d = _coadjoint_differential(c, table, th, v)
    # the same formula with the roles of th and v exchanged
    Xi = _coadjoint_differential(gamma, table, v, th)
    br = bracket(d, Xi)
    witness = None
    for name, img in zip(table.names, br.images):
        if img:
            witness = f"[d, Xi]({name}) = {img}"
            break
    total = d + Xi
    return BialgebraDouble(c, gamma, table, d, Xi, br.is_zero(), is_homological(total), witness)


# equivariant algebroid cohomology


@dataclass(eq=False)
class GinzburgModel:
    algebroid: StructureData
    g: StructureData
    premoment: tuple[Section, ...]
    table: GeneratorTable
    full: Derivation
    d_A: Derivation
    d_K: Derivation
    d_C: Derivation
    Q: Derivation
    horizontal: GeneratorTable
    invariance: tuple[Derivation, ...]

    @property
    def total(self) -> Derivation:
        return self.full + self.d_A + self.d_K

    @property
    def contractions(self) -> list[Derivation]:
        return [Derivation.partial(self.table, n) for n in self.g.fibre]

    def basic(self, window: tuple[int, int], weight: tuple | None = None) -> ComplexSpec:
        return ComplexSpec(self.horizontal, self.d_C, window, weight, self.invariance)


def ginzburg(
    S: StructureData,
    g: StructureData,
    premoment: Sequence[Section],
    theta_names: Sequence[str] | None = None,
) -> GinzburgModel:
    """``full = th^b L_{a(v_b)} - th'^b iota_{a(v_b)} + d_{[-1]Tg}`` on ``[-1]A x [-1]g x [-2]g``."""
    require_jacobi(S)
    _require_lie_algebra(g)
    premoment = tuple(premoment)
    if len(premoment) != g.rank:
        raise ValueError("one section per basis element of g")
    d_A = build_differential(S)
    consts = g.constants()
    for i in range(g.rank):
        for j in range(i, g.rank):
            lhs = section_bracket(S, premoment[i], premoment[j], d_A)
            coeffs = [S.base.zero() for _ in range(S.rank)]
            for k in range(g.rank):
                val = consts.get((i, j, k))
                if val:
                    coeffs = [a + b * val for a, b in zip(coeffs, premoment[k].coefficients)]
            if list(lhs.coefficients) != coeffs:
                raise NotAnAction("pre-moment map is a Lie algebra homomorphism", (i, j))
    th = tuple(theta_names or g.fibre)
    if set(th) & set(S.table.names):
        raise ValueError("Lie algebra coordinates clash with algebroid coordinates")
    gT = odd_tangent(GeneratorTable((n, 1) for n in th))
    table = S.table.extend(list(gT.table))
    g_named = StructureData(GeneratorTable([]), th, g.frame_degrees, {}, dict(g.structure))
    d_g = tangent_lie_differential(g_named, gT).extend(table)
    full = d_g
    Q = Derivation.zero(table, 0)
    dA = d_A.extend(table)
    for b, X in enumerate(premoment):
        iota = section_contraction(X, S).extend(table)
        L = bracket(iota, dA)
        full = full + table.gen(th[b]) * L - table.gen(gT.dot(th[b])) * iota
        Q = Q + table.gen(th[b]) * iota
    for (a, b, e), val in consts.items():
        Q = Q - Derivation(table, {gT.dot(th[e]): table.gen(th[a]) * table.gen(th[b]) * (val / 2)}, 0)
    d_K = gT.d.extend(table)
    _require_homological(full, "algebroid differential of [-1]A x [-1]Tg")
    _require_homological(full + dA + d_K, "total differential")
    H = GeneratorTable((n, d) for n, d in table if n not in th)
    d_C = dA.restrict(H)
    for b, X in enumerate(premoment):
        d_C = d_C - H.gen(gT.dot(th[b])) * section_contraction(X, S).extend(H)
    total = full + dA + d_K
    inv = tuple(bracket(Derivation.partial(table, n), total).restrict(H) for n in th)
    return GinzburgModel(S, g_named, premoment, table, full, dA, d_K, d_C, Q, H, inv)


# twisted algebroids


def twisted(S: StructureData, Xi: Derivation, gamma) -> Derivation:
    """``d_A + gamma * Xi`` for a homological morphic vector field ``Xi``."""
    d_A = build_differential(S)
    if Xi.table != S.table:
        raise ShapeError("Xi must act on the cochain algebra of S")
    if not bracket(Xi, d_A).is_zero():
        raise NotMorphic("[Xi, d_A] = 0", str(bracket(Xi, d_A)))
    if not (is_homological(Xi) or Xi.is_zero()):
        raise ValidationError("Xi squares to zero", square_witness(Xi))
    out = d_A + Xi * Fraction(gamma)
    _require_homological(out, "twisted differential")
    return out


def twisted_structure(S: StructureData, Xi: Derivation, name: str = "gamma") -> StructureData:
    """Frame data of ``A + [1]R``: anchor ``rho(eps) = phi``, ``[X, eps] = (-1)^{|X|-1} D_Xi X``."""
    if Xi.degree != 1:
        raise ShapeError("the twisting field has degree 1")
    d_A = build_differential(S)
    n = S.rank
    anchor = dict(S.anchor)
    phi = base_field(Xi, S)
    for nm, img in zip(S.base.names, phi.images):
        if img:
            anchor[(n, nm)] = img
    struct = dict(S.structure)
    for a in range(n):
        X = frame_section(S, a)
        DX = morphic_action(Xi, X, S, d_A)
        sign = -1 if (X.degree - 1) & 1 else 1
        for e, f in enumerate(DX.coefficients):
            if f:
                struct[(a, n, e)] = f * sign
                # graded antisymmetry with |eps| = 1
                struct[(n, a, e)] = -f * sign * (-1 if X.degree & 1 else 1)
    return StructureData(S.base, tuple(S.fibre) + (name,), tuple(S.frame_degrees) + (1,), anchor, struct)
