"""Cohomology of finite pieces of differential graded algebras.

A :class:`ComplexSpec` picks a degree window (and optionally a weight) in
which every graded piece is finite-dimensional.  Optional annihilator
derivations cut out a subcomplex as their joint kernel, which is how basic
subcomplexes are handled.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .derivations import Derivation, bracket, is_homological, square_witness
from .errors import NotClosed, ValidationError, WeightNotPreserved
from .gca import Element, GeneratorTable, basis


@dataclass
class ComplexSpec:
    table: GeneratorTable
    differential: Derivation
    window: tuple[int, int]
    weight: tuple[Mapping[str, int], int] | None = None
    annihilators: Sequence[Derivation] = ()

    def __post_init__(self):
        D = self.differential
        if D.table != self.table:
            raise ValueError("differential acts on a different algebra")
        if D.degree != 1 and not D.is_zero():
            raise ValidationError("differential has degree 1", D.degree)
        lo, hi = self.window
        if lo > hi:
            raise ValueError(f"empty degree window {self.window}")
        self.window = (int(lo), int(hi))
        self.annihilators = tuple(self.annihilators)
        for A in self.annihilators:
            if A.table != self.table:
                raise ValueError("annihilator acts on a different algebra")
        if not self.annihilators and not is_homological(D) and not D.is_zero():
            raise ValidationError("differential squares to zero", square_witness(D))
        if self.weight is not None:
            for op in (D, *self.annihilators):
                bad = weight_defect(op, self.weight[0])
                if bad is not None:
                    raise WeightNotPreserved(f"{bad[0]} -> {bad[1]} changes weight")
        self._bases: dict[int, list] = {}
        self._index: dict[int, dict] = {}
        self._subspaces: dict[int, list] = {}

    def basis(self, n: int) -> list:
        if n not in self._bases:
            b = basis(self.table, n, self.weight)
            self._bases[n] = b
            self._index[n] = {m: k for k, m in enumerate(b)}
        return self._bases[n]

    def to_vector(self, a: Element, n: int) -> list[Fraction]:
        self.basis(n)
        idx = self._index[n]
        v = [Fraction(0)] * len(idx)
        for m, c in a.terms.items():
            k = idx.get(m)
            if k is None:
                raise ValueError(f"monomial outside degree {n}, weight {self.weight}: {m}")
            v[k] = c
        return v

    def to_element(self, v: Sequence[Fraction], n: int) -> Element:
        b = self.basis(n)
        return Element(self.table, {m: c for m, c in zip(b, v) if c})

    def images(self, op: Derivation, n: int) -> list[list[Fraction]]:
        """Coordinate vectors of ``op`` applied to each basis monomial of degree n."""
        target = n + op.degree
        return [
            self.to_vector(op(Element.monomial(self.table, m)), target)
            for m in self.basis(n)
        ]

    def subspace(self, n: int) -> list[list[Fraction]] | None:
        """Basis of the joint kernel of the annihilators in degree n (None: everything)."""
        if not self.annihilators:
            return None
        if n not in self._subspaces:
            dim = len(self.basis(n))
            rows: list = []
            for A in self.annihilators:
                cols = self.images(A, n)
                if cols:
                    rows.extend(linalg.transpose(cols, len(cols[0])))
            self._subspaces[n] = linalg.nullspace(rows, dim) if dim else []
        return self._subspaces[n]


def weight_defect(op: Derivation, assignment: Mapping[str, int]):
    table = op.table
    w = [int(assignment.get(n, 0)) for n in table.names]
    for i, img in enumerate(op.images):
        for m in img.terms:
            if sum(w[j] * e for j, e in m) != w[i]:
                return table.names[i], img
    return None


@dataclass(frozen=True)
class BettiRow:
    degree: int
    dim: int
    rank: int
    kernel: int
    h: int


@dataclass
class BettiTable:
    rows: list[BettiRow] = field(default_factory=list)

    def dims(self) -> tuple[int, ...]:
        return tuple(r.h for r in self.rows)

    def __getitem__(self, degree: int) -> BettiRow:
        for r in self.rows:
            if r.degree == degree:
                return r
        raise KeyError(degree)

    def to_records(self) -> list[dict]:
        return [
            {"degree": r.degree, "dim": r.dim, "rank": r.rank, "kernel": r.kernel, "h": r.h}
            for r in self.rows
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_records(), sort_keys=True)

    def to_text(self) -> str:
        head = ("degree", "dim", "rank", "kernel", "h")
        body = [[str(v) for v in (r.degree, r.dim, r.rank, r.kernel, r.h)] for r in self.rows]
        widths = [max(len(h), *(len(row[k]) for row in body)) if body else len(h) for k, h in enumerate(head)]
        lines = ["  ".join(h.rjust(w) for h, w in zip(head, widths))]
        lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in body]
        return "\n".join(lines)


def differential_matrix(spec: ComplexSpec, n: int) -> list[list[Fraction]]:
    """Matrix of ``C^n -> C^{n+1}`` (rows indexed by the degree n+1 basis)."""
    cols = spec.images(spec.differential, n)
    rows = len(spec.basis(n + 1))
    return [[c[r] for c in cols] for r in range(rows)]


def _combine(vectors: Sequence[Sequence[Fraction]], coeffs: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(vectors[0]) if vectors else 0)
    for c, v in zip(coeffs, vectors):
        if c:
            for k, x in enumerate(v):
                if x:
                    out[k] += c * x
    return out


def _piece(spec: ComplexSpec, n: int):
    """``(subspace basis, images of it under D)`` in ambient coordinates."""
    sub = spec.subspace(n)
    cols = spec.images(spec.differential, n)
    if sub is None:
        dim = len(cols)
        sub = [[Fraction(int(i == j)) for i in range(dim)] for j in range(dim)]
        return sub, cols
    return sub, [_combine(cols, s) for s in sub]


def _check_closed(spec: ComplexSpec, n: int, images: list) -> None:
    if not spec.annihilators:
        return
    for A in spec.annihilators:
        for v in images:
            img = A(spec.to_element(v, n + 1))
            if img:
                raise NotClosed(
                    f"differential leaves the subcomplex: {spec.to_element(v, n + 1)} -> {img}"
                )
    for v in images:
        dd = spec.differential(spec.to_element(v, n + 1))
        if dd:
            raise ValidationError("differential squares to zero on the subcomplex", str(dd))


def _rank(vectors: list) -> int:
    return linalg.rank(vectors) if vectors and vectors[0] else 0


def betti(spec: ComplexSpec) -> BettiTable:
    lo, hi = spec.window
    rows = []
    prev_rank = _rank(_piece(spec, lo - 1)[1])
    for n in range(lo, hi + 1):
        sub, imgs = _piece(spec, n)
        _check_closed(spec, n, imgs)
        r = _rank(imgs)
        kernel = len(sub) - r
        rows.append(BettiRow(n, len(sub), r, kernel, kernel - prev_rank))
        prev_rank = r
    return BettiTable(rows)


def basic_spec(spec: ComplexSpec, contractions: Sequence[Derivation]) -> ComplexSpec:
    """The subcomplex killed by every ``I`` and every ``[I, D]``."""
    ann = list(spec.annihilators)
    for I in contractions:
        ann.append(I)
        ann.append(bracket(I, spec.differential))
    return ComplexSpec(spec.table, spec.differential, spec.window, spec.weight, ann)


def basic_betti(spec: ComplexSpec, contractions: Sequence[Derivation]) -> BettiTable:
    return betti(basic_spec(spec, contractions))


def representatives(spec: ComplexSpec, n: int) -> list[Element]:
    """Cocycles spanning ``H^n``, each scaled to leading coefficient 1."""
    sub, imgs = _piece(spec, n)
    if not sub:
        return []
    if imgs and imgs[0]:
        rows = linalg.transpose(imgs, len(imgs[0]))
        null = linalg.nullspace(rows, len(sub))
    else:
        null = [[Fraction(int(i == j)) for i in range(len(sub))] for j in range(len(sub))]
    cocycles = [_combine(sub, v) for v in null]
    _, prev_imgs = _piece(spec, n - 1)
    boundaries = [v for v in prev_imgs if any(v)]
    chosen = linalg.independent_subset(cocycles, boundaries)
    out = []
    for k in chosen:
        v = cocycles[k]
        lead = next(x for x in v if x)
        out.append(spec.to_element([x / lead for x in v], n))
    return out
